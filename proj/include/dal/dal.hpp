#pragma once
// Umbrella header.

#include "dal/agent.hpp"
#include "dal/covering.hpp"
#include "dal/detect/glr.hpp"
#include "dal/envs/environment.hpp"
#include "dal/envs/replay.hpp"
#include "dal/envs/reward_model.hpp"
#include "dal/envs/schedule.hpp"
#include "dal/harness/config.hpp"
#include "dal/harness/csv.hpp"
#include "dal/harness/runner.hpp"
#include "dal/policies/finite_ucb.hpp"
#include "dal/policies/glm_ucb.hpp"
#include "dal/policies/gp_ucb.hpp"
#include "dal/policies/linucb.hpp"
#include "dal/policies/policy.hpp"
#include "dal/policies/squarecb.hpp"
#include "dal/rng.hpp"
#include "dal/scheduler.hpp"
#include "dal/types.hpp"

#pragma once
// Trial runner. Every trial is fully determined by (config, base_seed +
// trial index): the environment and the policy each get their own RNG
// sub-stream, so the realized environment is identical across policies and
// the aggregate is identical across parallelism levels.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dal/agent.hpp"
#include "dal/envs/replay.hpp"
#include "dal/harness/config.hpp"
#include "dal/policies/finite_ucb.hpp"
#include "dal/policies/glm_ucb.hpp"
#include "dal/policies/gp_ucb.hpp"
#include "dal/policies/linucb.hpp"
#include "dal/policies/squarecb.hpp"

namespace dal::harness {

struct RegretTrace {
    std::vector<double> inst_regret;  // true-mean gap per round
    std::vector<double> cum_regret;
    std::vector<double> cum_reward;  // observed reward, cumulative
    long restarts = 0;
    std::vector<long> restart_times;
    long forced_rounds = 0;
    double wall_sec = 0.0;
};

struct AggregateResult {
    long T = 0;
    std::vector<double> mean_regret;    // mean cumulative regret per round
    std::vector<double> stderr_regret;  // sample std / sqrt(trials)
    std::vector<double> mean_reward;    // mean cumulative reward per round
    std::vector<long> restart_counts;   // per trial
    std::vector<double> wall_sec;       // per trial
};

namespace internal {

// Stream ids per trial seed.
inline constexpr std::uint64_t kEnvStream = 0;
inline constexpr std::uint64_t kPolicyStream = 1;

inline std::unique_ptr<envs::MeanRewardEnv> make_env(const ExperimentConfig& cfg,
                                                     SplitMix64 rng) {
    if (cfg.is_replay) {
        envs::NoiseSpec noise;
        if (cfg.replay_bernoulli) {
            noise.kind = envs::NoiseSpec::Kind::bernoulli_of_mean;
        } else {
            noise.kind = envs::NoiseSpec::Kind::gaussian;
            noise.sigma2 = cfg.env.noise_sigma2;
        }
        return std::make_unique<envs::MatrixReplayEnv>(
            envs::load_replay_matrix(cfg.replay_path), noise, rng);
    }
    return std::make_unique<envs::SyntheticEnv>(cfg.env, rng);
}

inline std::unique_ptr<policies::Policy> make_policy(const ExperimentConfig& cfg,
                                                     const envs::MeanRewardEnv& env) {
    const int dim = static_cast<int>(env.actions().front().size());
    const double delta = cfg.delta > 0.0 ? cfg.delta
                                         : 1.0 / static_cast<double>(cfg.T);
    switch (cfg.policy) {
        case PolicyKind::linucb: {
            policies::LinUcb::Config c;
            c.dim = dim;
            c.lambda = cfg.lambda;
            c.S = cfg.env.S;
            c.L = cfg.env.L;
            c.noise_sigma2 = std::max(cfg.env.noise_sigma2, 1e-12);
            c.delta = delta;
            c.fixed_beta = cfg.fixed_beta;
            return std::make_unique<policies::LinUcb>(c);
        }
        case PolicyKind::glmucb: {
            policies::GlmUcb::Config c;
            c.dim = dim;
            c.lambda = cfg.lambda;
            c.S = cfg.env.S;
            c.L = cfg.env.L;
            c.delta = delta;
            c.width_scale = cfg.width_scale;
            c.fixed_beta = cfg.fixed_beta;
            return std::make_unique<policies::GlmUcb>(c);
        }
        case PolicyKind::gpucb: {
            policies::GpUcb::Config c;
            c.dim = dim;
            c.lengthscale = cfg.lengthscale > 0.0 ? cfg.lengthscale
                                                  : cfg.env.kernel_lengthscale;
            c.noise_sigma2 = std::max(cfg.env.noise_sigma2, 1e-12);
            c.delta = cfg.gp_delta;
            c.max_points = static_cast<std::size_t>(cfg.gp_max_points);
            c.fixed_beta = cfg.fixed_beta;
            return std::make_unique<policies::GpUcb>(c);
        }
        case PolicyKind::squarecb: {
            policies::SquareCb::Config c;
            c.n_actions = env.actions().size();
            c.feature_dim = env.n_contexts() > 1 ? cfg.env.context_dim : dim;
            c.learning_rate = cfg.lr;
            c.gamma_scale = cfg.gamma_scale;
            c.logistic = env.rewards_binary();
            return std::make_unique<policies::SquareCb>(c);
        }
        case PolicyKind::ucb1:
        case PolicyKind::ducb: {
            policies::FiniteUcb::Config c;
            c.n_arms = env.actions().size();
            c.gamma = cfg.policy == PolicyKind::ucb1 ? 1.0 : cfg.gamma;
            c.xi = cfg.ucb_xi;
            return std::make_unique<policies::FiniteUcb>(c);
        }
        case PolicyKind::uniform:
            return std::make_unique<policies::UniformRandom>();
        case PolicyKind::oracle:
            return nullptr;  // handled by the runner loop
    }
    throw std::logic_error("make_policy: unknown policy kind");
}

// Covering-set assembly. Kernel mode builds the grid over an affine copy of
// the actions normalized into [0, R]^d; the returned indices refer to the
// original set.
inline CoveringSet build_cover(const ExperimentConfig& cfg, const ActionSet& actions) {
    CoverModeChoice mode = cfg.cover_mode;
    if (mode == CoverModeChoice::automatic) {
        switch (cfg.env.variant) {
            case envs::Variant::lb:
            case envs::Variant::glb:
            case envs::Variant::scb:
                mode = cfg.is_replay ? CoverModeChoice::full : CoverModeChoice::linear;
                break;
            default:
                mode = CoverModeChoice::full;
        }
        if (cfg.is_replay) mode = CoverModeChoice::full;
    }
    switch (mode) {
        case CoverModeChoice::linear:
            return build_cover_linear(actions, cfg.cover_tol);
        case CoverModeChoice::full:
            return full_cover(actions);
        case CoverModeChoice::kernel: {
            const int d = static_cast<int>(actions.front().size());
            Eigen::VectorXd lo = actions.front(), hi = actions.front();
            for (const auto& a : actions) {
                lo = lo.cwiseMin(a);
                hi = hi.cwiseMax(a);
            }
            const double edge = (hi - lo).maxCoeff();
            const double R = cfg.cover_R > 0.0 ? cfg.cover_R : 1.0;
            const double scale = edge > 0.0 ? R / edge : 1.0;
            ActionSet normalized;
            normalized.reserve(actions.size());
            for (const auto& a : actions)
                normalized.push_back((a - lo) * scale);
            CoveringConfig cc;
            cc.mode = CoverMode::kernel_cover;
            cc.tol = cfg.cover_tol;
            cc.R = R;
            cc.d = d;
            cc.p = cfg.cover_p;
            cc.q = cfg.cover_q;
            cc.C = cfg.cover_C;
            cc.gamma_T = cfg.cover_gamma_T > 0.0
                             ? cfg.cover_gamma_T
                             : std::pow(std::log(static_cast<double>(cfg.T)),
                                        static_cast<double>(d) + 1.0);
            CoveringSet cover = build_cover_kernel(normalized, cc);
            for (std::size_t i = 0; i < cover.size(); ++i)
                cover.actions[i] = actions[cover.source_indices[i]];
            return cover;
        }
        case CoverModeChoice::automatic:
            break;
    }
    throw std::logic_error("build_cover: unresolved mode");
}

inline DalOptions make_dal_options(const ExperimentConfig& cfg,
                                   const envs::MeanRewardEnv& env) {
    DalOptions opt;
    opt.detector_kind = cfg.detector;
    opt.oracle_change_points = env.change_points();
    opt.monitor_all = cfg.monitor_all != TriState::off;  // auto -> on
    opt.scan_stride = cfg.scan_stride;
    const double T = static_cast<double>(cfg.T);
    opt.detector.delta_F = cfg.delta_F > 0.0 ? cfg.delta_F : 1.0 / T;
    opt.detector.delta_D = cfg.delta_D > 0.0 ? cfg.delta_D : 1.0 / T;
    opt.detector.max_history = static_cast<std::size_t>(cfg.max_history);
    const bool bernoulli_family =
        cfg.family == TriState::automatic ? env.rewards_binary()
                                          : cfg.family == TriState::on;
    if (bernoulli_family) {
        opt.detector.family.kind = detect::KlFamily::bernoulli;
    } else {
        opt.detector.family.kind = detect::KlFamily::gaussian;
        opt.detector.family.sigma2 =
            cfg.dal_sigma2 > 0.0
                ? cfg.dal_sigma2
                : (cfg.env.noise_sigma2 > 0.0 ? cfg.env.noise_sigma2 : 0.25);
    }
    return opt;
}

}  // namespace internal

inline RegretTrace run_trial(const ExperimentConfig& cfg, int trial_index) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(trial_index);
    SplitMix64 policy_rng = make_stream(seed, internal::kPolicyStream);

    RegretTrace trace;

    if (cfg.is_replay && cfg.replay_logged) {
        const envs::LoggedReplay log = envs::load_replay_logged(cfg.replay_path);
        ActionSet actions;
        actions.reserve(log.n_actions);
        for (std::size_t a = 0; a < log.n_actions; ++a) {
            Eigen::VectorXd e =
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(log.n_actions));
            e[static_cast<Eigen::Index>(a)] = 1.0;
            actions.push_back(std::move(e));
        }
        ExperimentConfig pc = cfg;
        pc.env.variant = envs::Variant::lb;  // irrelevant for finite policies
        std::unique_ptr<policies::Policy> policy;
        {
            // Minimal stand-in env to size the policy.
            envs::MatrixReplay m;
            m.n_arms = log.n_actions;
            m.T = 1;
            m.means.assign(log.n_actions, std::vector<double>(1, 0.0));
            envs::MatrixReplayEnv sizing(m, {}, SplitMix64(0));
            policy = internal::make_policy(pc, sizing);
        }
        if (!policy)
            throw ConfigError("oracle policy is undefined for logged replay");
        std::unique_ptr<DalAgent> agent;
        if (cfg.dal_enabled) {
            DalOptions opt;
            opt.detector_kind = cfg.detector;
            opt.monitor_all = cfg.monitor_all != TriState::off;
            opt.scan_stride = cfg.scan_stride;
            opt.detector.family.kind = detect::KlFamily::bernoulli;
            const double T = static_cast<double>(log.rows.size());
            opt.detector.delta_F = cfg.delta_F > 0.0 ? cfg.delta_F : 1.0 / std::max(T, 3.0);
            opt.detector.delta_D = opt.detector.delta_F;
            opt.detector.max_history = static_cast<std::size_t>(cfg.max_history);
            agent = std::make_unique<DalAgent>(std::move(policy), full_cover(actions),
                                               std::move(opt),
                                               std::max<long>(3, static_cast<long>(
                                                                     log.rows.size())),
                                               1);
        }
        const StepContext ctx;
        long t = 0;
        double cum_reward = 0.0;
        for (const auto& row : log.rows) {
            ++t;
            const std::span<const std::size_t> cands(row.candidates.data(),
                                                     row.candidates.size());
            std::size_t chosen;
            if (agent)
                chosen = agent->select(t, ctx, actions, cands, policy_rng);
            else
                chosen = policy->select(ctx, actions, cands, policy_rng);
            // Off-policy credit: the logged reward counts only when the
            // learner picked the displayed action; other rounds teach nothing.
            if (chosen == row.displayed) {
                cum_reward += row.reward;
                if (agent) {
                    if (agent->observe(t, ctx, actions, chosen, row.reward)) {
                        trace.restart_times.push_back(t);
                        ++trace.restarts;
                    }
                } else {
                    policy->update(ctx, actions, chosen, row.reward);
                }
            }
            trace.inst_regret.push_back(0.0);
            trace.cum_regret.push_back(0.0);
            trace.cum_reward.push_back(cum_reward);
        }
        trace.wall_sec = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        return trace;
    }

    auto env = internal::make_env(cfg, make_stream(seed, internal::kEnvStream));
    std::unique_ptr<policies::Policy> policy = internal::make_policy(cfg, *env);
    const bool oracle_policy = cfg.policy == PolicyKind::oracle;

    std::unique_ptr<DalAgent> agent;
    if (cfg.dal_enabled && !oracle_policy) {
        agent = std::make_unique<DalAgent>(
            std::move(policy), internal::build_cover(cfg, env->actions()),
            internal::make_dal_options(cfg, *env), cfg.T, env->n_contexts());
    }

    const ActionSet& actions = env->actions();
    std::vector<std::size_t> all_ids(actions.size());
    for (std::size_t i = 0; i < all_ids.size(); ++i) all_ids[i] = i;
    const std::span<const std::size_t> cands(all_ids.data(), all_ids.size());

    trace.inst_regret.reserve(cfg.T);
    trace.cum_regret.reserve(cfg.T);
    trace.cum_reward.reserve(cfg.T);
    double cum_regret = 0.0, cum_reward = 0.0;

    for (long t = 1; t <= cfg.T; ++t) {
        const StepContext ctx = env->begin_round(t);
        std::size_t chosen;
        if (oracle_policy)
            chosen = env->oracle_best().first;
        else if (agent)
            chosen = agent->select(t, ctx, actions, cands, policy_rng);
        else
            chosen = policy->select(ctx, actions, cands, policy_rng);

        const auto [best, best_mean] = env->oracle_best();
        const double gap = best_mean - env->true_mean(chosen);
        const double reward = env->sample_reward(chosen);

        if (agent) {
            if (agent->last_was_forced()) ++trace.forced_rounds;
            if (agent->observe(t, ctx, actions, chosen, reward)) {
                trace.restart_times.push_back(t);
                ++trace.restarts;
            }
        } else if (!oracle_policy) {
            policy->update(ctx, actions, chosen, reward);
        }

        cum_regret += gap;
        cum_reward += reward;
        trace.inst_regret.push_back(gap);
        trace.cum_regret.push_back(cum_regret);
        trace.cum_reward.push_back(cum_reward);
    }
    trace.wall_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    return trace;
}

inline AggregateResult aggregate(const std::vector<RegretTrace>& traces) {
    AggregateResult agg;
    if (traces.empty()) return agg;
    const std::size_t T = traces.front().cum_regret.size();
    for (const auto& tr : traces)
        if (tr.cum_regret.size() != T)
            throw std::logic_error("aggregate: trial length mismatch");
    const double n = static_cast<double>(traces.size());
    agg.T = static_cast<long>(T);
    agg.mean_regret.resize(T);
    agg.stderr_regret.resize(T);
    agg.mean_reward.resize(T);
    for (std::size_t i = 0; i < T; ++i) {
        double s = 0.0, sr = 0.0;
        for (const auto& tr : traces) {
            s += tr.cum_regret[i];
            sr += tr.cum_reward[i];
        }
        const double mean = s / n;
        agg.mean_regret[i] = mean;
        agg.mean_reward[i] = sr / n;
        if (traces.size() > 1) {
            double ss = 0.0;
            for (const auto& tr : traces) {
                const double d = tr.cum_regret[i] - mean;
                ss += d * d;
            }
            agg.stderr_regret[i] = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
        } else {
            agg.stderr_regret[i] = 0.0;
        }
    }
    for (const auto& tr : traces) {
        agg.restart_counts.push_back(tr.restarts);
        agg.wall_sec.push_back(tr.wall_sec);
    }
    return agg;
}

// Runs all trials (across up to cfg.parallelism threads) and aggregates.
// Results are keyed by trial index, so the aggregate does not depend on the
// thread count.
inline AggregateResult run_experiment(const ExperimentConfig& cfg) {
    std::vector<RegretTrace> traces(static_cast<std::size_t>(cfg.trials));
    std::vector<std::exception_ptr> errors(traces.size());
    std::atomic<int> next{0};
    const int workers = std::min(cfg.parallelism, cfg.trials);
    auto work = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                traces[static_cast<std::size_t>(i)] = run_trial(cfg, i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return aggregate(traces);
}

}  // namespace dal::harness

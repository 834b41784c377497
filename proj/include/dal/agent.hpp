#pragma once
// Detection-augmented learning: wraps a stationary policy with a forced
// exploration schedule over a covering set and a per-(context, action) GLR
// change test. On every round the scheduler either forces the next covering
// action (whose reward feeds only the detection buffers) or delegates to the
// base policy (whose reward additionally feeds the buffers in monitor-all
// mode). A detection resets the policy, clears every buffer, and begins the
// next exploration phase.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dal/covering.hpp"
#include "dal/detect/glr.hpp"
#include "dal/envs/reward_model.hpp"
#include "dal/policies/policy.hpp"
#include "dal/scheduler.hpp"
#include "dal/types.hpp"

namespace dal {

enum class DetectorKind { glr, never_fire, oracle };

struct DalOptions {
    detect::GlrConfig detector{};
    DetectorKind detector_kind = DetectorKind::glr;
    std::vector<long> oracle_change_points;  // used by DetectorKind::oracle
    bool monitor_all = true;  // scan delegated plays too (finite action sets)
    int scan_stride = 1;      // run the scan every stride-th sample per buffer
};

class DalAgent {
public:
    DalAgent(std::unique_ptr<policies::Policy> policy, CoveringSet cover,
             DalOptions opts, long horizon, long n_contexts)
        : policy_(std::move(policy)),
          cover_(std::move(cover)),
          opts_(std::move(opts)),
          sched_(horizon, static_cast<long>(cover_.size()), n_contexts) {
        if (cover_.size() == 0) throw std::domain_error("DalAgent: empty cover");
        if (opts_.scan_stride < 1)
            throw std::domain_error("DalAgent: scan_stride must be >= 1");
    }

    // Chooses this round's action id. Exactly one of forced/delegated happens;
    // the policy's rng is consumed only on delegated rounds.
    std::size_t select(long t, const StepContext& ctx, const ActionSet& actions,
                       std::span<const std::size_t> candidates, SplitMix64& rng) {
        const SchedulerPosition pos = sched_.position(t);
        pending_forced_ = false;
        if (pos.forced) {
            const std::size_t gid = cover_.source_indices[pos.cover_index];
            for (std::size_t c : candidates) {
                if (c == gid) {
                    pending_forced_ = true;
                    return gid;
                }
            }
            // Covering action unavailable this round (partial candidate sets
            // in replay); fall through to the base policy.
        }
        return policy_->select(ctx, actions, candidates, rng);
    }

    // Consumes the observed reward; returns true when a restart fired.
    bool observe(long t, const StepContext& ctx, const ActionSet& actions,
                 std::size_t action_id, double reward) {
        bool scan = false;
        if (pending_forced_) {
            scan = true;
        } else {
            policy_->update(ctx, actions, action_id, reward);
            scan = opts_.monitor_all;
        }
        if (!scan) return false;

        detect::ObservationBuffer& buf = buffer(ctx.context_id, action_id);
        buf.push(reward);
        if (!detect_on(buf, t)) return false;
        restart(t);
        return true;
    }

    const ExplorationScheduler& scheduler() const { return sched_; }
    const CoveringSet& cover() const { return cover_; }
    policies::Policy& policy() { return *policy_; }
    long restarts() const { return restarts_; }
    const std::vector<long>& restart_times() const { return restart_times_; }
    bool last_was_forced() const { return pending_forced_; }
    std::size_t buffer_count() const { return buffers_.size(); }

    std::size_t buffer_size(int context_id, std::size_t action_id) const {
        const auto it = buffers_.find(key(context_id, action_id));
        return it == buffers_.end() ? 0 : it->second.size();
    }

private:
    static std::uint64_t key(int context_id, std::size_t action_id) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(context_id))
                << 32) |
               static_cast<std::uint32_t>(action_id);
    }

    detect::ObservationBuffer& buffer(int context_id, std::size_t action_id) {
        const std::uint64_t k = key(context_id, action_id);
        auto it = buffers_.find(k);
        if (it == buffers_.end())
            it = buffers_
                     .emplace(k,
                              detect::ObservationBuffer(opts_.detector.max_history))
                     .first;
        return it->second;
    }

    bool detect_on(const detect::ObservationBuffer& buf, long t) {
        switch (opts_.detector_kind) {
            case DetectorKind::never_fire:
                return false;
            case DetectorKind::oracle: {
                while (oracle_next_ < opts_.oracle_change_points.size() &&
                       opts_.oracle_change_points[oracle_next_] <= sched_.tau)
                    ++oracle_next_;
                return oracle_next_ < opts_.oracle_change_points.size() &&
                       t >= opts_.oracle_change_points[oracle_next_];
            }
            case DetectorKind::glr: {
                if (buf.size() % static_cast<std::size_t>(opts_.scan_stride) != 0)
                    return false;
                return detect::glr_scan(buf, opts_.detector).detected;
            }
        }
        return false;
    }

    void restart(long t) {
        policy_->reset();
        buffers_.clear();
        sched_.restart(t);
        ++restarts_;
        restart_times_.push_back(t);
    }

    std::unique_ptr<policies::Policy> policy_;
    CoveringSet cover_;
    DalOptions opts_;
    ExplorationScheduler sched_;
    std::unordered_map<std::uint64_t, detect::ObservationBuffer> buffers_;
    std::vector<long> restart_times_;
    long restarts_ = 0;
    std::size_t oracle_next_ = 0;
    bool pending_forced_ = false;
};

// Largest mean shift between two models over the monitored (context, action)
// pairs: the detectability margin of a change. Pass an empty context list for
// non-contextual models.
inline double min_detectable_shift(const envs::RewardModel& before,
                                   const envs::RewardModel& after,
                                   const CoveringSet& cover,
                                   const std::vector<Eigen::VectorXd>& contexts) {
    double shift = 0.0;
    auto eval = [&](const Eigen::VectorXd* c) {
        for (std::size_t i = 0; i < cover.size(); ++i) {
            const std::size_t id = cover.source_indices[i];
            const double d =
                std::fabs(envs::model_mean(before, c, cover.actions[i], id) -
                          envs::model_mean(after, c, cover.actions[i], id));
            shift = std::max(shift, d);
        }
    };
    if (contexts.empty()) {
        eval(nullptr);
    } else {
        for (const auto& c : contexts) eval(&c);
    }
    return shift;
}

}  // namespace dal

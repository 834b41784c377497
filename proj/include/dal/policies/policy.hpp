#pragma once

#include <cstddef>
#include <span>

#include "dal/rng.hpp"
#include "dal/types.hpp"

namespace dal::policies {

// Stationary bandit policy. `candidates` lists the action ids (indices into
// `actions`) available this round; select returns one of them. Policies that
// randomize draw only from the rng handed to select, so a policy replayed on
// an identical transcript makes identical choices.
class Policy {
public:
    virtual ~Policy() = default;

    virtual void reset() = 0;

    virtual std::size_t select(const StepContext& ctx, const ActionSet& actions,
                               std::span<const std::size_t> candidates,
                               SplitMix64& rng) = 0;

    virtual void update(const StepContext& ctx, const ActionSet& actions,
                        std::size_t action_id, double reward) = 0;

    virtual const char* name() const = 0;
};

// Lowest-index argmax over the candidate list.
template <typename Score>
std::size_t argmax_candidate(std::span<const std::size_t> candidates,
                             Score&& score) {
    std::size_t best = candidates[0];
    double best_v = score(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double v = score(candidates[i]);
        if (v > best_v) {
            best_v = v;
            best = candidates[i];
        }
    }
    return best;
}

inline double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                    : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace dal::policies

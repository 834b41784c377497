#pragma once
// Finite-armed UCB over discounted pull statistics:
//
//   score(a) = mean_gamma(a) + sqrt(xi * log(N_gamma) / n_gamma(a)),
//   n_gamma(a) = sum_s gamma^{t-s} 1{a_s = a},   N_gamma = sum_a n_gamma(a).
//
// gamma = 1 is UCB1; gamma < 1 is the discounted variant (D-UCB). Arms never
// pulled are tried first, lowest index first.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"

namespace dal::policies {

class FiniteUcb final : public Policy {
public:
    struct Config {
        std::size_t n_arms = 0;
        double gamma = 1.0;
        double xi = 2.0;
    };

    explicit FiniteUcb(Config cfg) : cfg_(cfg) {
        if (cfg_.n_arms < 1)
            throw std::domain_error("FiniteUcb: n_arms must be positive");
        if (!(cfg_.gamma > 0.0 && cfg_.gamma <= 1.0))
            throw std::domain_error("FiniteUcb: gamma must lie in (0,1]");
        reset();
    }

    void reset() override {
        counts_.assign(cfg_.n_arms, 0.0);
        sums_.assign(cfg_.n_arms, 0.0);
        pulls_.assign(cfg_.n_arms, 0L);
    }

    std::size_t select(const StepContext&, const ActionSet&,
                       std::span<const std::size_t> candidates,
                       SplitMix64&) override {
        for (std::size_t id : candidates)
            if (pulls_[id] == 0) return id;
        double total = 0.0;
        for (std::size_t id : candidates) total += counts_[id];
        const double logN = std::log(std::max(total, 1.0));
        return argmax_candidate(candidates, [&](std::size_t id) {
            return sums_[id] / counts_[id] +
                   std::sqrt(cfg_.xi * logN / counts_[id]);
        });
    }

    void update(const StepContext&, const ActionSet&, std::size_t action_id,
                double reward) override {
        if (cfg_.gamma < 1.0) {
            for (std::size_t a = 0; a < cfg_.n_arms; ++a) {
                counts_[a] *= cfg_.gamma;
                sums_[a] *= cfg_.gamma;
            }
        }
        counts_[action_id] += 1.0;
        sums_[action_id] += reward;
        ++pulls_[action_id];
    }

    const char* name() const override { return cfg_.gamma < 1.0 ? "d-ucb" : "ucb1"; }

    double discounted_count(std::size_t a) const { return counts_[a]; }
    double discounted_sum(std::size_t a) const { return sums_[a]; }

private:
    Config cfg_;
    std::vector<double> counts_, sums_;
    std::vector<long> pulls_;
};

// Uniform-random baseline.
class UniformRandom final : public Policy {
public:
    void reset() override {}

    std::size_t select(const StepContext&, const ActionSet&,
                       std::span<const std::size_t> candidates,
                       SplitMix64& rng) override {
        const std::size_t i = static_cast<std::size_t>(
            uniform01(rng) * static_cast<double>(candidates.size()));
        return candidates[i < candidates.size() ? i : candidates.size() - 1];
    }

    void update(const StepContext&, const ActionSet&, std::size_t,
                double) override {}

    const char* name() const override { return "uniform"; }
};

}  // namespace dal::policies

#pragma once
// SquareCB: inverse-gap weighting over a pointwise regression oracle
// (Foster & Rakhlin). With m candidates, greedy arm b and predictions yhat,
//
//   P(a) = 1 / (m + gamma_t * (yhat(b) - yhat(a)))   for a != b,
//   P(b) = 1 - sum_{a != b} P(a),       gamma_t = c * sqrt(m * t).
//
// The oracle is one online regressor per action over the round's feature
// vector (the context when present, the action features otherwise), trained
// by single-step gradient updates: squared loss (ridge mode) or logistic
// loss.

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"

namespace dal::policies {

// Inverse-gap weights for a score vector; index `best` receives the residual
// mass. Exposed for direct testing.
inline std::vector<double> inverse_gap_weights(const std::vector<double>& scores,
                                               std::size_t best, double gamma) {
    const double m = static_cast<double>(scores.size());
    std::vector<double> p(scores.size(), 0.0);
    double rest = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (i == best) continue;
        p[i] = 1.0 / (m + gamma * (scores[best] - scores[i]));
        rest += p[i];
    }
    p[best] = 1.0 - rest;
    return p;
}

class SquareCb final : public Policy {
public:
    struct Config {
        std::size_t n_actions = 0;
        int feature_dim = 0;
        double learning_rate = 0.05;
        double gamma_scale = 1.0;  // c in gamma_t = c * sqrt(m t)
        bool logistic = true;      // false = online ridge
    };

    explicit SquareCb(Config cfg) : cfg_(cfg) {
        if (cfg_.n_actions < 1 || cfg_.feature_dim < 1)
            throw std::domain_error("SquareCb: n_actions and feature_dim must be positive");
        reset();
    }

    void reset() override {
        W_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg_.n_actions),
                                   cfg_.feature_dim);
        t_ = 0;
    }

    double predict(std::size_t action_id, const Eigen::VectorXd& phi) const {
        const double z = W_.row(static_cast<Eigen::Index>(action_id)).dot(phi);
        return cfg_.logistic ? sigmoid(z) : z;
    }

    std::size_t select(const StepContext& ctx, const ActionSet& actions,
                       std::span<const std::size_t> candidates,
                       SplitMix64& rng) override {
        std::vector<double> scores(candidates.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            scores[i] = predict(candidates[i], features(ctx, actions, candidates[i]));
            if (scores[i] > scores[best]) best = i;
        }
        const double gamma =
            cfg_.gamma_scale * std::sqrt(static_cast<double>(candidates.size()) *
                                         static_cast<double>(t_ + 1));
        const std::vector<double> p = inverse_gap_weights(scores, best, gamma);
        double u = uniform01(rng);
        for (std::size_t i = 0; i < p.size(); ++i) {
            u -= p[i];
            if (u < 0.0) return candidates[i];
        }
        return candidates.back();
    }

    void update(const StepContext& ctx, const ActionSet& actions,
                std::size_t action_id, double reward) override {
        const Eigen::VectorXd phi = features(ctx, actions, action_id);
        const double err = reward - predict(action_id, phi);
        W_.row(static_cast<Eigen::Index>(action_id)) +=
            cfg_.learning_rate * err * phi.transpose();
        ++t_;
    }

    const char* name() const override { return "squarecb"; }

    long updates() const { return t_; }

private:
    static const Eigen::VectorXd& features(const StepContext& ctx,
                                           const ActionSet& actions,
                                           std::size_t action_id) {
        return ctx.context != nullptr ? *ctx.context : actions[action_id];
    }

    Config cfg_;
    Eigen::MatrixXd W_;
    long t_ = 0;
};

}  // namespace dal::policies

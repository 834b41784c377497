#pragma once
// GLM-UCB (Filippi et al. style) for the logistic link. The point estimate is
// the penalized quasi-MLE
//
//   theta_hat = argmin sum_i [log(1 + e^{z_i}) - X_i z_i] + (lambda/2)||theta||^2,
//   z_i = <theta, a_i>,
//
// refitted by damped Newton after every update and projected onto the S-ball.
// Scores are mu(<theta_hat, a>) + beta * ||a||_{V^{-1}} with the same ridge
// design V as LinUCB and a LinUCB-shaped width (Bernoulli rewards are 1/2-sub-
// Gaussian); `width_scale` exposes the usual practical rescaling knob.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"

namespace dal::policies {

class GlmUcb final : public Policy {
public:
    struct Config {
        int dim = 0;
        double lambda = 1.0;
        double S = 1.0;
        double L = 1.0;
        double delta = 1e-4;
        double width_scale = 1.0;
        double fixed_beta = 0.0;
        int max_newton = 50;
        double newton_tol = 1e-8;
    };

    explicit GlmUcb(Config cfg) : cfg_(cfg) {
        if (cfg_.dim < 1) throw std::domain_error("GlmUcb: dim must be positive");
        if (!(cfg_.lambda > 0.0))
            throw std::domain_error("GlmUcb: lambda must be positive");
        reset();
    }

    void reset() override {
        history_.clear();
        Vinv_ = (1.0 / cfg_.lambda) * Eigen::MatrixXd::Identity(cfg_.dim, cfg_.dim);
        theta_ = Eigen::VectorXd::Zero(cfg_.dim);
    }

    std::size_t select(const StepContext&, const ActionSet& actions,
                       std::span<const std::size_t> candidates,
                       SplitMix64&) override {
        const double beta = width();
        return argmax_candidate(candidates, [&](std::size_t id) {
            const Eigen::VectorXd& a = actions[id];
            return sigmoid(theta_.dot(a)) + beta * std::sqrt(a.dot(Vinv_ * a));
        });
    }

    void update(const StepContext&, const ActionSet& actions,
                std::size_t action_id, double reward) override {
        const Eigen::VectorXd& a = actions[action_id];
        history_.emplace_back(a, reward);
        const Eigen::VectorXd u = Vinv_ * a;
        Vinv_.noalias() -= u * u.transpose() / (1.0 + a.dot(u));
        refit();
    }

    const char* name() const override { return "glm-ucb"; }

    double width() const {
        if (cfg_.fixed_beta > 0.0) return cfg_.fixed_beta;
        const double d = static_cast<double>(cfg_.dim);
        const double n = static_cast<double>(history_.size());
        const double logdet =
            d * std::log((d * cfg_.lambda + n * cfg_.L * cfg_.L) / (d * cfg_.lambda));
        return cfg_.width_scale *
               (0.5 * std::sqrt(2.0 * std::log(1.0 / cfg_.delta) + logdet) +
                std::sqrt(cfg_.lambda) * cfg_.S);
    }

    const Eigen::VectorXd& estimate() const { return theta_; }
    long updates() const { return static_cast<long>(history_.size()); }

private:
    double objective(const Eigen::VectorXd& th) const {
        double v = 0.5 * cfg_.lambda * th.squaredNorm();
        for (const auto& [a, x] : history_) {
            const double z = th.dot(a);
            // log(1 + e^z), overflow-safe
            v += (z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)));
            v -= x * z;
        }
        return v;
    }

    // Damped Newton, warm-started from the previous estimate. A step that
    // fails to decrease the objective is halved; a non-finite iterate rolls
    // back to the previous estimate.
    void refit() {
        Eigen::VectorXd th = theta_;
        double obj = objective(th);
        for (int it = 0; it < cfg_.max_newton; ++it) {
            Eigen::VectorXd g = cfg_.lambda * th;
            Eigen::MatrixXd H =
                cfg_.lambda * Eigen::MatrixXd::Identity(cfg_.dim, cfg_.dim);
            for (const auto& [a, x] : history_) {
                const double m = sigmoid(th.dot(a));
                g.noalias() += (m - x) * a;
                H.noalias() += m * (1.0 - m) * a * a.transpose();
            }
            if (g.norm() <= cfg_.newton_tol) break;
            const Eigen::VectorXd step = H.ldlt().solve(g);
            double t = 1.0;
            Eigen::VectorXd cand;
            double cand_obj = obj;
            bool ok = false;
            for (int half = 0; half < 30; ++half) {
                cand = th - t * step;
                cand_obj = objective(cand);
                if (std::isfinite(cand_obj) && cand_obj <= obj) {
                    ok = true;
                    break;
                }
                t *= 0.5;
            }
            if (!ok) break;
            th = cand;
            obj = cand_obj;
        }
        if (th.allFinite()) {
            const double n = th.norm();
            if (n > cfg_.S) th *= cfg_.S / n;
            theta_ = th;
        }
    }

    Config cfg_;
    std::vector<std::pair<Eigen::VectorXd, double>> history_;
    Eigen::MatrixXd Vinv_;
    Eigen::VectorXd theta_;
};

}  // namespace dal::policies

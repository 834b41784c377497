#pragma once
// LinUCB with a ridge design matrix V = lambda*I + sum a a^T and moment
// vector b = sum X a. Scores are <theta_hat, a> + beta * ||a||_{V^{-1}} with
// the self-normalized confidence width of Abbasi-Yadkori et al.:
//
//   beta_n = sigma * sqrt(2 log(1/delta) + d log((d lambda + n L^2)/(d lambda)))
//            + sqrt(lambda) * S.
//
// V^{-1} is maintained by rank-one (Sherman-Morrison) updates.

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"

namespace dal::policies {

class LinUcb final : public Policy {
public:
    struct Config {
        int dim = 0;
        double lambda = 1.0;
        double S = 1.0;           // parameter norm bound
        double L = 1.0;           // action norm bound
        double noise_sigma2 = 0.01;
        double delta = 1e-4;
        double fixed_beta = 0.0;  // > 0 overrides the schedule
    };

    explicit LinUcb(Config cfg) : cfg_(cfg) {
        if (cfg_.dim < 1) throw std::domain_error("LinUcb: dim must be positive");
        if (!(cfg_.lambda > 0.0))
            throw std::domain_error("LinUcb: lambda must be positive");
        reset();
    }

    void reset() override {
        V_ = cfg_.lambda * Eigen::MatrixXd::Identity(cfg_.dim, cfg_.dim);
        Vinv_ = (1.0 / cfg_.lambda) * Eigen::MatrixXd::Identity(cfg_.dim, cfg_.dim);
        b_ = Eigen::VectorXd::Zero(cfg_.dim);
        n_ = 0;
    }

    std::size_t select(const StepContext&, const ActionSet& actions,
                       std::span<const std::size_t> candidates,
                       SplitMix64&) override {
        const Eigen::VectorXd theta = Vinv_ * b_;
        const double beta = width();
        return argmax_candidate(candidates, [&](std::size_t id) {
            const Eigen::VectorXd& a = actions[id];
            return theta.dot(a) + beta * std::sqrt(a.dot(Vinv_ * a));
        });
    }

    void update(const StepContext&, const ActionSet& actions,
                std::size_t action_id, double reward) override {
        const Eigen::VectorXd& a = actions[action_id];
        V_.noalias() += a * a.transpose();
        b_.noalias() += reward * a;
        const Eigen::VectorXd u = Vinv_ * a;
        Vinv_.noalias() -= u * u.transpose() / (1.0 + a.dot(u));
        ++n_;
    }

    const char* name() const override { return "linucb"; }

    double width() const {
        if (cfg_.fixed_beta > 0.0) return cfg_.fixed_beta;
        const double d = static_cast<double>(cfg_.dim);
        const double n = static_cast<double>(n_);
        const double logdet =
            d * std::log((d * cfg_.lambda + n * cfg_.L * cfg_.L) / (d * cfg_.lambda));
        return std::sqrt(cfg_.noise_sigma2) *
                   std::sqrt(2.0 * std::log(1.0 / cfg_.delta) + logdet) +
               std::sqrt(cfg_.lambda) * cfg_.S;
    }

    const Eigen::MatrixXd& gram() const { return V_; }
    const Eigen::MatrixXd& gram_inverse() const { return Vinv_; }
    const Eigen::VectorXd& moment() const { return b_; }
    long updates() const { return n_; }

private:
    Config cfg_;
    Eigen::MatrixXd V_, Vinv_;
    Eigen::VectorXd b_;
    long n_ = 0;
};

}  // namespace dal::policies

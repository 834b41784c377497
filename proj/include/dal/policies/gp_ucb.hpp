#pragma once
// GP-UCB with a squared-exponential kernel k(x,y) = exp(-||x-y||^2 / (2 l^2)).
// Posterior given observations (X, y) and noise variance s2:
//
//   mean(a) = k_a^T (K + s2 I)^{-1} y,   var(a) = k(a,a) - ||L^{-1} k_a||^2,
//
// with L the lower Cholesky factor of K + s2 I, grown one row per update and
// shrunk from the front (rank-one update of the trailing block) when the
// observation cap is hit. The default width follows the usual practical
// schedule beta_n = sqrt(2 log(n^{d/2 + 2} pi^2 / (3 delta))).

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"

namespace dal::policies {

class GpUcb final : public Policy {
public:
    struct Config {
        int dim = 0;
        double lengthscale = 0.2;
        double noise_sigma2 = 0.01;
        double delta = 0.1;
        std::size_t max_points = 2000;  // drop-oldest beyond this
        double fixed_beta = 0.0;
    };

    explicit GpUcb(Config cfg) : cfg_(cfg) {
        if (cfg_.dim < 1) throw std::domain_error("GpUcb: dim must be positive");
        if (!(cfg_.lengthscale > 0.0))
            throw std::domain_error("GpUcb: lengthscale must be positive");
        if (!(cfg_.noise_sigma2 > 0.0))
            throw std::domain_error("GpUcb: noise variance must be positive");
        reset();
    }

    void reset() override {
        X_.clear();
        y_.clear();
        L_.resize(0, 0);
        alpha_.resize(0);
    }

    double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        const double d2 = (a - b).squaredNorm();
        return std::exp(-d2 / (2.0 * cfg_.lengthscale * cfg_.lengthscale));
    }

    struct Posterior {
        double mean = 0.0;
        double var = 1.0;
    };

    Posterior posterior(const Eigen::VectorXd& a) const {
        Posterior p;
        p.var = kernel(a, a);
        if (X_.empty()) return p;
        const Eigen::Index m = static_cast<Eigen::Index>(X_.size());
        Eigen::VectorXd k(m);
        for (Eigen::Index i = 0; i < m; ++i) k[i] = kernel(X_[i], a);
        p.mean = k.dot(alpha_);
        const Eigen::VectorXd v =
            L_.triangularView<Eigen::Lower>().solve(k);
        p.var = std::max(0.0, p.var - v.squaredNorm());
        return p;
    }

    std::size_t select(const StepContext&, const ActionSet& actions,
                       std::span<const std::size_t> candidates,
                       SplitMix64&) override {
        const double beta = width();
        return argmax_candidate(candidates, [&](std::size_t id) {
            const Posterior p = posterior(actions[id]);
            return p.mean + beta * std::sqrt(p.var);
        });
    }

    void update(const StepContext&, const ActionSet& actions,
                std::size_t action_id, double reward) override {
        append(actions[action_id], reward);
        if (X_.size() > cfg_.max_points) drop_oldest();
        refresh_alpha();
    }

    const char* name() const override { return "gp-ucb"; }

    double width() const {
        if (cfg_.fixed_beta > 0.0) return cfg_.fixed_beta;
        const double n = static_cast<double>(X_.size()) + 1.0;
        const double d = static_cast<double>(cfg_.dim);
        const double pi2 = std::numbers::pi * std::numbers::pi;
        return std::sqrt(2.0 * std::log(std::pow(n, d / 2.0 + 2.0) * pi2 /
                                        (3.0 * cfg_.delta)));
    }

    std::size_t points() const { return X_.size(); }
    const std::vector<Eigen::VectorXd>& inputs() const { return X_; }
    const std::vector<double>& targets() const { return y_; }

private:
    void append(const Eigen::VectorXd& x, double y) {
        const Eigen::Index m = static_cast<Eigen::Index>(X_.size());
        Eigen::VectorXd k(m);
        for (Eigen::Index i = 0; i < m; ++i) k[i] = kernel(X_[i], x);
        const Eigen::VectorXd l21 =
            m > 0 ? L_.triangularView<Eigen::Lower>().solve(k).eval()
                  : Eigen::VectorXd(0);
        double d2 = kernel(x, x) + cfg_.noise_sigma2 - l21.squaredNorm();
        double jitter = 1e-8;
        int attempts = 0;
        while (d2 <= 0.0 && attempts < 3) {
            d2 += jitter;
            jitter *= 10.0;
            ++attempts;
        }
        if (d2 <= 0.0)
            throw std::runtime_error("GpUcb: kernel matrix not positive definite");

        Eigen::MatrixXd L(m + 1, m + 1);
        L.setZero();
        L.topLeftCorner(m, m) = L_;
        L.block(m, 0, 1, m) = l21.transpose();
        L(m, m) = std::sqrt(d2);
        L_.swap(L);
        X_.push_back(x);
        y_.push_back(y);
    }

    // Removing the first observation: if L = [[l11, 0], [l21, L22]], the
    // trailing block of the shrunk matrix factors as chol(L22 L22^T +
    // l21 l21^T), a positive rank-one update of L22.
    void drop_oldest() {
        const Eigen::Index m = L_.rows();
        Eigen::MatrixXd L22 = L_.bottomRightCorner(m - 1, m - 1);
        Eigen::VectorXd w = L_.block(1, 0, m - 1, 1);
        for (Eigen::Index j = 0; j < m - 1; ++j) {
            const double r = std::hypot(L22(j, j), w[j]);
            const double c = r / L22(j, j);
            const double s = w[j] / L22(j, j);
            L22(j, j) = r;
            for (Eigen::Index i = j + 1; i < m - 1; ++i) {
                L22(i, j) = (L22(i, j) + s * w[i]) / c;
                w[i] = c * w[i] - s * L22(i, j);
            }
        }
        L_.swap(L22);
        X_.erase(X_.begin());
        y_.erase(y_.begin());
    }

    void refresh_alpha() {
        const Eigen::Index m = static_cast<Eigen::Index>(X_.size());
        Eigen::VectorXd yv(m);
        for (Eigen::Index i = 0; i < m; ++i) yv[i] = y_[i];
        alpha_ = L_.transpose().triangularView<Eigen::Upper>().solve(
            L_.triangularView<Eigen::Lower>().solve(yv));
    }

    Config cfg_;
    std::vector<Eigen::VectorXd> X_;
    std::vector<double> y_;
    Eigen::MatrixXd L_;
    Eigen::VectorXd alpha_;
};

}  // namespace dal::policies

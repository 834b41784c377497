#pragma once
// Ground-truth reward models for the synthetic benchmark families.
//
//   linear       f(a) = <theta, a>
//   glm          f(a) = mu(<theta, a>),  mu = sigmoid
//   scb          same mean as glm, Bernoulli rewards, larger S
//   kernel       f(x) = sum_i w_i k(x, x_i), squared-exponential k
//   contextual   f(c, a) = clip(b_a + z_sig mu(<u_a,c>) + z_sin sin(<v_a,c>)
//                               + z_xpr c_2 c_3, 0, 1)
//
// (c_2, c_3 are the second and third context coordinates.)

#include <cmath>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dal/policies/policy.hpp"
#include "dal/rng.hpp"
#include "dal/types.hpp"

namespace dal::envs {

using policies::sigmoid;

struct LinearModel {
    Eigen::VectorXd theta;
};

struct GlmModel {
    Eigen::VectorXd theta;
};

struct ScbModel {
    Eigen::VectorXd theta;
};

struct KernelModel {
    std::vector<Eigen::VectorXd> centers;
    std::vector<double> weights;
    double lengthscale = 0.2;

    double evaluate(const Eigen::VectorXd& x) const {
        double v = 0.0;
        const double l2 = 2.0 * lengthscale * lengthscale;
        for (std::size_t i = 0; i < centers.size(); ++i)
            v += weights[i] * std::exp(-(x - centers[i]).squaredNorm() / l2);
        return v;
    }
};

struct ContextualArm {
    Eigen::VectorXd u, v;
    double bias = 0.0;
    double z_sig = 0.0, z_sin = 0.0, z_xpr = 0.0;
};

struct ContextualModel {
    std::vector<ContextualArm> arms;
};

using RewardModel =
    std::variant<LinearModel, GlmModel, ScbModel, KernelModel, ContextualModel>;

inline double contextual_mean(const ContextualModel& m,
                              const Eigen::VectorXd& context,
                              std::size_t action_id) {
    if (action_id >= m.arms.size())
        throw std::domain_error("contextual_mean: action id out of range");
    const ContextualArm& arm = m.arms[action_id];
    if (arm.u.size() != context.size() || context.size() < 3)
        throw std::domain_error("contextual_mean: context dimension mismatch");
    const double v = arm.bias + arm.z_sig * sigmoid(arm.u.dot(context)) +
                     arm.z_sin * std::sin(arm.v.dot(context)) +
                     arm.z_xpr * context[1] * context[2];
    return std::min(1.0, std::max(0.0, v));
}

// Mean reward of `action` (with source id `action_id`) under the model;
// `context` may be null for the non-contextual families.
inline double model_mean(const RewardModel& model, const Eigen::VectorXd* context,
                         const Eigen::VectorXd& action, std::size_t action_id) {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearModel>) {
                return m.theta.dot(action);
            } else if constexpr (std::is_same_v<T, GlmModel> ||
                                 std::is_same_v<T, ScbModel>) {
                return sigmoid(m.theta.dot(action));
            } else if constexpr (std::is_same_v<T, KernelModel>) {
                return m.evaluate(action);
            } else {
                if (context == nullptr)
                    throw std::domain_error("model_mean: contextual model needs a context");
                return contextual_mean(m, *context, action_id);
            }
        },
        model);
}

// theta with coordinates U[-1,1], rescaled to norm exactly S. The measure-zero
// all-zero draw is redrawn.
inline Eigen::VectorXd make_parameter(SplitMix64& rng, int d, double S) {
    if (d < 1 || !(S > 0.0))
        throw std::domain_error("make_parameter: need d >= 1 and S > 0");
    Eigen::VectorXd theta = uniform_cube(rng, d, -1.0, 1.0);
    while (theta.norm() == 0.0) theta = uniform_cube(rng, d, -1.0, 1.0);
    return theta * (S / theta.norm());
}

// f = sum_{i<terms} w_i k(., x_i) with centers uniform in the radius-R ball
// (the action domain) and w_i ~ U[-1,1].
inline KernelModel make_kernel_model(SplitMix64& rng, int d, double domain_radius,
                                     int terms = 200, double lengthscale = 0.2) {
    if (d < 1 || terms < 1 || !(domain_radius > 0.0) || !(lengthscale > 0.0))
        throw std::domain_error("make_kernel_model: invalid parameters");
    KernelModel m;
    m.lengthscale = lengthscale;
    m.centers.reserve(terms);
    m.weights.reserve(terms);
    for (int i = 0; i < terms; ++i) {
        m.centers.push_back(uniform_ball(rng, d, domain_radius));
        m.weights.push_back(uniform(rng, -1.0, 1.0));
    }
    return m;
}

inline ContextualModel make_contextual_model(SplitMix64& rng,
                                             std::size_t n_actions,
                                             int context_dim) {
    if (n_actions < 1 || context_dim < 3)
        throw std::domain_error("make_contextual_model: invalid parameters");
    ContextualModel m;
    m.arms.resize(n_actions);
    for (auto& arm : m.arms) {
        arm.u = normal_vector(rng, context_dim);
        arm.v = normal_vector(rng, context_dim);
        arm.bias = uniform(rng, 0.3, 0.7);
        arm.z_sig = uniform(rng, 0.25, 0.45);
        arm.z_sin = uniform(rng, 0.15, 0.35);
        arm.z_xpr = uniform(rng, 0.10, 0.25);
    }
    return m;
}

}  // namespace dal::envs

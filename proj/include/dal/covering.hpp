#pragma once
// Covering sets for forced exploration.
//
// Linear reward models only need a basis: a maximal linearly independent
// subset of the action set spans every direction the parameter can move in.
// Kernel models need a metric cover: a delta_T-net of the action domain with
//
//   delta_T = R * d^{1/2 - 2p/d} / (2 * (C * gamma_T^{2q})^{1/d}),
//
// realized by an axis-aligned grid of spacing 2*delta_T/sqrt(d) whose cells
// have half-diagonal exactly delta_T. When the grid needs more centers than
// there are actions, covering degenerates to the full action set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dal/types.hpp"

namespace dal {

struct CoveringSet {
    ActionSet actions;
    std::vector<std::size_t> source_indices;  // positions in the input set

    std::size_t size() const { return actions.size(); }
};

enum class CoverMode { linear_independent, kernel_cover, full_action_set };

struct CoveringConfig {
    CoverMode mode = CoverMode::linear_independent;
    double tol = 1e-8;  // relative residual tolerance, linear mode
    // Kernel mode geometry: actions lie in [0, R]^d after normalization.
    double R = 1.0;
    int d = 0;
    double p = 0.0;       // regret exponent
    double q = 0.0;       // delay exponent
    double C = 1.0;       // regret constant
    double gamma_T = 1.0; // information-gain proxy
};

inline CoveringSet full_cover(const ActionSet& actions) {
    CoveringSet cover;
    cover.actions = actions;
    cover.source_indices.resize(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) cover.source_indices[i] = i;
    return cover;
}

// Greedy scan in index order; an action joins the cover when its residual
// against the span of the kept ones exceeds tol (relative to its norm).
// A rank-0 input degenerates to the first action, with a warning.
inline CoveringSet build_cover_linear(const ActionSet& actions, double tol = 1e-8) {
    if (actions.empty())
        throw std::domain_error("build_cover_linear: empty action set");
    if (!(tol > 0.0))
        throw std::domain_error("build_cover_linear: tol must be positive");

    CoveringSet cover;
    std::vector<Eigen::VectorXd> basis;  // orthonormal
    const Eigen::Index d = actions[0].size();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        if (actions[i].size() != d)
            throw std::domain_error("build_cover_linear: inconsistent dimensions");
        const double norm = actions[i].norm();
        if (norm == 0.0) continue;
        Eigen::VectorXd r = actions[i];
        for (int pass = 0; pass < 2; ++pass)  // re-orthogonalize for stability
            for (const auto& q : basis) r -= q.dot(r) * q;
        if (r.norm() > tol * norm) {
            basis.push_back(r / r.norm());
            cover.actions.push_back(actions[i]);
            cover.source_indices.push_back(i);
            if (basis.size() == static_cast<std::size_t>(d)) break;
        }
    }
    if (cover.actions.empty()) {
        std::fprintf(stderr,
                     "warning: action set is numerically rank-0; covering with "
                     "the first action only\n");
        cover.actions.push_back(actions[0]);
        cover.source_indices.push_back(0);
    }
    return cover;
}

inline double delta_T(const CoveringConfig& cfg) {
    if (!(cfg.R > 0.0) || cfg.d < 1 || !(cfg.C > 0.0) || !(cfg.gamma_T > 0.0) ||
        cfg.p < 0.0 || cfg.q < 0.0)
        throw std::domain_error("delta_T: invalid covering configuration");
    const double d = static_cast<double>(cfg.d);
    return cfg.R * std::pow(d, 0.5 - 2.0 * cfg.p / d) /
           (2.0 * std::pow(cfg.C * std::pow(cfg.gamma_T, 2.0 * cfg.q), 1.0 / d));
}

namespace internal {

// ceil with a guard against values sitting an ulp above an integer.
inline long safe_ceil(double v) {
    return static_cast<long>(std::ceil(v - 1e-9 * std::max(1.0, std::fabs(v))));
}

}  // namespace internal

// Grid centers per axis: spacing 2*delta_T/sqrt(d), m = ceil(R / spacing)
// cells, centers at cell midpoints. The enumeration caps out as soon as the
// count exceeds `max_centers` (0 = unlimited).
inline std::vector<Eigen::VectorXd> cover_grid_centers(const CoveringConfig& cfg,
                                                       std::size_t max_centers = 0) {
    const double dT = delta_T(cfg);
    const double spacing = 2.0 * dT / std::sqrt(static_cast<double>(cfg.d));
    const long m = std::max(1L, internal::safe_ceil(cfg.R / spacing));

    double count = 1.0;
    for (int i = 0; i < cfg.d; ++i) count *= static_cast<double>(m);
    if (max_centers > 0 && count > static_cast<double>(max_centers)) return {};

    std::vector<Eigen::VectorXd> centers;
    centers.reserve(static_cast<std::size_t>(count));
    std::vector<long> digit(cfg.d, 0);
    while (true) {
        Eigen::VectorXd c(cfg.d);
        for (int i = 0; i < cfg.d; ++i)
            c[i] = (static_cast<double>(digit[i]) + 0.5) * spacing;
        centers.push_back(std::move(c));
        int axis = 0;
        while (axis < cfg.d && ++digit[axis] == m) digit[axis++] = 0;
        if (axis == cfg.d) break;
    }
    return centers;
}

// delta_T-cover of the action set. Precondition: actions lie in [0, R]^d.
// Falls back to the full action set when the grid would need more centers
// than there are actions.
inline CoveringSet build_cover_kernel(const ActionSet& actions,
                                      const CoveringConfig& cfg) {
    if (actions.empty())
        throw std::domain_error("build_cover_kernel: empty action set");
    const auto centers = cover_grid_centers(cfg, actions.size());
    if (centers.empty()) return full_cover(actions);

    CoveringSet cover;
    std::vector<bool> taken(actions.size(), false);
    for (const auto& c : centers) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < actions.size(); ++i) {
            const double dist = (actions[i] - c).norm();
            if (dist < best_d) {
                best_d = dist;
                best = i;
            }
        }
        if (!taken[best]) {
            taken[best] = true;
            cover.actions.push_back(actions[best]);
            cover.source_indices.push_back(best);
        }
    }
    return cover;
}

}  // namespace dal

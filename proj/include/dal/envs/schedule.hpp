#pragma once
// Non-stationarity schedules: piecewise-stationary change points (fixed or
// geometric with per-round probability rho = T^{-xi}), linear drift between
// two endpoint models, and bounded random-walk drift.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dal/rng.hpp"

namespace dal::envs {

struct ScheduleSpec {
    enum class Kind { none, piecewise, drift_linear, drift_walk };
    enum class ChangeKind { redraw, flip };

    Kind kind = Kind::none;
    // piecewise
    std::vector<long> change_points;  // strictly increasing, within (1, T]
    bool geometric = false;
    double xi = 0.6;  // rho = T^{-xi} when geometric
    ChangeKind change = ChangeKind::redraw;
    // drift_walk
    double walk_delta = 0.0;
};

// Change points with i.i.d. geometric gaps of success probability rho =
// T^{-xi}, accumulated from t = 1 and truncated at the horizon. xi = 0 makes
// every round a change point.
inline std::vector<long> sample_geometric_changepoints(long T, double xi,
                                                       SplitMix64& rng) {
    if (T < 1) throw std::domain_error("sample_geometric_changepoints: T >= 1");
    if (xi < 0.0)
        throw std::domain_error("sample_geometric_changepoints: xi must be >= 0");
    const double rho = std::pow(static_cast<double>(T), -xi);
    std::vector<long> points;
    long t = 1;
    while (true) {
        const long gap = geometric(rng, rho);
        if (gap > T - t) break;
        t += gap;
        points.push_back(t);
    }
    return points;
}

}  // namespace dal::envs

#pragma once
// Forced-exploration schedule.
//
// Within exploration phase k (restarts seen + 1) the exploration rate is
//
//   alpha_k = sqrt(k * |C| * N_e) / (2 * sqrt(T) * log^2 T),   clamped to (0, 1],
//
// realized deterministically: rounds since the last restart are chopped into
// cycles of ceil(N_e / alpha_k) rounds whose first N_e slots play the covering
// actions in order; every other slot delegates to the base policy.

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace dal {

inline double alpha_k(long k, long n_contexts, long n_cover, long horizon) {
    if (k < 1 || n_contexts < 1 || n_cover < 1)
        throw std::domain_error("alpha_k: k, |C|, N_e must be positive");
    if (horizon < 3)
        throw std::domain_error("alpha_k: horizon must be at least 3");
    const double T = static_cast<double>(horizon);
    const double lg = std::log(T);
    const double a =
        std::sqrt(static_cast<double>(k) * static_cast<double>(n_contexts) *
                  static_cast<double>(n_cover)) /
        (2.0 * std::sqrt(T) * lg * lg);
    return a > 1.0 ? 1.0 : a;
}

struct SchedulerPosition {
    bool forced = false;
    std::size_t cover_index = 0;  // 0-based position in the covering set
};

struct ExplorationScheduler {
    long tau = 0;  // last restart time (0 before any restart)
    long k = 1;    // exploration phase, restarts + 1
    long horizon = 0;
    long n_cover = 0;
    long n_contexts = 1;
    double alpha = 0.0;
    long cycle_length = 0;

    ExplorationScheduler(long T, long cover_size, long contexts)
        : horizon(T), n_cover(cover_size), n_contexts(contexts) {
        recompute();
    }

    void recompute() {
        alpha = alpha_k(k, n_contexts, n_cover, horizon);
        cycle_length = static_cast<long>(
            std::ceil(static_cast<double>(n_cover) / alpha));
    }

    void restart(long t) {
        tau = t;
        ++k;
        recompute();
    }

    // Position of round t (requires t > tau). Offsets into the current cycle
    // below N_e force covering action #offset; the rest delegate.
    SchedulerPosition position(long t) const {
        if (t <= tau)
            throw std::domain_error("ExplorationScheduler: t must exceed tau");
        const long c = (t - tau - 1) % cycle_length;
        if (c < n_cover)
            return {true, static_cast<std::size_t>(c)};
        return {false, 0};
    }
};

}  // namespace dal

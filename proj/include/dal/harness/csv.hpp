#pragma once
// Aggregate traces as CSV: header t,mean_regret,stderr_regret,mean_reward,
// one row per (thinned) round, reals printed with 12 significant digits so a
// reload reproduces the in-memory values at that precision.

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "dal/harness/runner.hpp"

namespace dal::harness {

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// Thinning keeps every thin-th round plus the final one.
inline void emit_csv(const AggregateResult& agg, std::ostream& out, long thin = 1) {
    if (thin < 1) throw std::domain_error("emit_csv: thin must be positive");
    out << "t,mean_regret,stderr_regret,mean_reward\n";
    for (long t = 1; t <= agg.T; ++t) {
        if (t % thin != 0 && t != agg.T) continue;
        const std::size_t i = static_cast<std::size_t>(t - 1);
        out << t << ',' << format_real(agg.mean_regret[i]) << ','
            << format_real(agg.stderr_regret[i]) << ','
            << format_real(agg.mean_reward[i]) << '\n';
    }
}

inline void emit_csv_file(const AggregateResult& agg, const std::string& path,
                          long thin = 1) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    emit_csv(agg, out, thin);
    out.flush();
    if (!out) throw std::runtime_error("failed writing output file: " + path);
}

}  // namespace dal::harness

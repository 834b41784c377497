#pragma once
// Generalized likelihood ratio (GLR) change-point test for scalar reward
// streams, in the style of Besson, Kaufmann et al.
//
// Given samples X_1..X_n, every split s in {1, .., n-1} is scored with
//
//   GLR_s = s * kl(mean(1..s), mean(1..n)) + (n-s) * kl(mean(s+1..n), mean(1..n))
//
// and a change is declared as soon as some GLR_s reaches the threshold
//
//   beta(n, delta_F) = 6 log(1 + log n) + (5/2) log(4 n^{3/2} / delta_F) + 11.
//
// All logarithms are natural. kl is the Bernoulli divergence for rewards in
// [0,1] (exponential-family form, valid for any bounded stream) or the
// sigma^2-sub-Gaussian quadratic (x - y)^2 / (2 sigma^2).

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace dal::detect {

enum class KlFamily { bernoulli, gaussian };

struct GlrFamily {
    KlFamily kind = KlFamily::bernoulli;
    double sigma2 = 0.25;  // gaussian only
};

struct GlrConfig {
    GlrFamily family{};
    double delta_F = 1e-3;
    // Carried alongside delta_F for callers that track a delay budget; the
    // scan threshold depends on delta_F only.
    double delta_D = 1e-3;
    std::size_t max_history = 0;  // 0 = unbounded
};

struct DetectionResult {
    bool detected = false;
    std::optional<std::size_t> split_index;  // s, 1-based
    std::optional<double> statistic;         // GLR_s at the returned split
};

inline double kl_bernoulli(double x, double y) {
    if (!(x >= 0.0 && x <= 1.0) || !(y >= 0.0 && y <= 1.0))
        throw std::domain_error("kl_bernoulli: arguments must lie in [0,1]");
    if (y <= 0.0 || y >= 1.0) {
        if (x == y) return 0.0;
        throw std::domain_error("kl_bernoulli: infinite divergence at boundary y");
    }
    double v = 0.0;
    if (x > 0.0) v += x * std::log(x / y);
    if (x < 1.0) v += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return v > 0.0 ? v : 0.0;
}

inline double kl_gaussian(double x, double y, double sigma2) {
    if (!(sigma2 > 0.0))
        throw std::domain_error("kl_gaussian: sigma2 must be positive");
    const double d = x - y;
    return d * d / (2.0 * sigma2);
}

inline double glr_threshold(std::size_t n, double delta_F) {
    if (n < 2) throw std::domain_error("glr_threshold: need n >= 2");
    if (!(delta_F > 0.0 && delta_F < 1.0))
        throw std::domain_error("glr_threshold: delta_F must lie in (0,1)");
    const double nd = static_cast<double>(n);
    return 6.0 * std::log1p(std::log(nd)) +
           2.5 * std::log(4.0 * std::pow(nd, 1.5) / delta_F) + 11.0;
}

// Reward history for one (context, action) stream. Prefix sums give O(1)
// segment means; for binary streams an integer ones-count is kept so scans
// can run log-free (see glr_scan).
class ObservationBuffer {
public:
    ObservationBuffer() = default;
    explicit ObservationBuffer(std::size_t max_history)
        : max_history_(max_history) {}

    void push(double x) {
        if (max_history_ > 0 && values_.size() == max_history_) {
            values_.erase(values_.begin());
            rebuild();
        }
        values_.push_back(x);
        prefix_.push_back(prefix_.back() + x);
        ones_.push_back(ones_.back() + (x == 1.0 ? 1 : 0));
        if (x != 0.0 && x != 1.0) ++nonbinary_;
        if (!(x >= 0.0 && x <= 1.0)) ++out_of_unit_;
    }

    void clear() {
        values_.clear();
        prefix_.assign(1, 0.0);
        ones_.assign(1, 0);
        nonbinary_ = 0;
        out_of_unit_ = 0;
    }

    std::size_t size() const { return values_.size(); }
    std::size_t max_history() const { return max_history_; }
    const std::vector<double>& values() const { return values_; }

    bool all_binary() const { return nonbinary_ == 0; }
    bool all_in_unit_range() const { return out_of_unit_ == 0; }

    // Mean of values i..j-1 (0-based, half-open).
    double segment_mean(std::size_t i, std::size_t j) const {
        return (prefix_[j] - prefix_[i]) / static_cast<double>(j - i);
    }

    std::size_t ones_before(std::size_t j) const { return ones_[j]; }

private:
    void rebuild() {
        prefix_.assign(1, 0.0);
        ones_.assign(1, 0);
        nonbinary_ = 0;
        out_of_unit_ = 0;
        for (double x : values_) {
            prefix_.push_back(prefix_.back() + x);
            ones_.push_back(ones_.back() + (x == 1.0 ? 1 : 0));
            if (x != 0.0 && x != 1.0) ++nonbinary_;
            if (!(x >= 0.0 && x <= 1.0)) ++out_of_unit_;
        }
    }

    std::size_t max_history_ = 0;
    std::vector<double> values_;
    std::vector<double> prefix_{0.0};
    std::vector<std::uint32_t> ones_{0};
    std::size_t nonbinary_ = 0;
    std::size_t out_of_unit_ = 0;
};

namespace internal {

// kl_bernoulli without the boundary throw: infinite divergence becomes +inf,
// which any threshold comparison treats as a trigger.
inline double kl_bernoulli_inf(double x, double y) {
    if (y <= 0.0 || y >= 1.0)
        return x == y ? 0.0 : std::numeric_limits<double>::infinity();
    double v = 0.0;
    if (x > 0.0) v += x * std::log(x / y);
    if (x < 1.0) v += (1.0 - x) * std::log((1.0 - x) / (1.0 - y));
    return v > 0.0 ? v : 0.0;
}

// Table of m -> m * log(m), grown on demand, shared per thread.
inline const double* mlogm_table(std::size_t n) {
    thread_local std::vector<double> table{0.0};  // 0 * log 0 = 0
    while (table.size() <= n) {
        const double m = static_cast<double>(table.size());
        table.push_back(m * std::log(m));
    }
    return table.data();
}

}  // namespace internal

// GLR_s for a fixed split (s in 1..n-1), from the buffer's prefix sums.
inline double glr_statistic(const ObservationBuffer& buf, std::size_t split,
                            const GlrFamily& family) {
    const std::size_t n = buf.size();
    if (n < 2 || split < 1 || split >= n)
        throw std::domain_error("glr_statistic: split must lie in [1, n-1]");
    const double mu1 = buf.segment_mean(0, split);
    const double mu2 = buf.segment_mean(split, n);
    const double pooled = buf.segment_mean(0, n);
    const double s = static_cast<double>(split);
    const double m = static_cast<double>(n - split);
    if (family.kind == KlFamily::gaussian)
        return s * kl_gaussian(mu1, pooled, family.sigma2) +
               m * kl_gaussian(mu2, pooled, family.sigma2);
    return s * internal::kl_bernoulli_inf(mu1, pooled) +
           m * internal::kl_bernoulli_inf(mu2, pooled);
}

// Scans every split against the threshold and reports the first (lowest s)
// trigger. No detection is possible below two samples. Bernoulli streams with
// a degenerate pooled mean (all samples identical) score zero everywhere.
inline DetectionResult glr_scan(const ObservationBuffer& buf,
                                const GlrConfig& cfg) {
    DetectionResult res;
    const std::size_t n = buf.size();
    if (n < 2) return res;

    const bool bern = cfg.family.kind == KlFamily::bernoulli;
    if (bern && !buf.all_in_unit_range())
        throw std::domain_error("glr_scan: bernoulli family requires rewards in [0,1]");

    const double thresh = glr_threshold(n, cfg.delta_F);

    if (bern && buf.all_binary()) {
        // All segment means are integer ratios, so every term reduces to the
        // m*log(m) table and the scan is log-free.
        const double* W = internal::mlogm_table(n);
        const std::size_t K = buf.ones_before(n);
        if (K == 0 || K == n) return res;
        const double pooled_term = W[K] + W[n - K] - W[n];
        for (std::size_t s = 1; s < n; ++s) {
            const std::size_t k1 = buf.ones_before(s);
            const std::size_t k2 = K - k1;
            const double stat = (W[k1] + W[s - k1] - W[s]) +
                                (W[k2] + W[(n - s) - k2] - W[n - s]) -
                                pooled_term;
            if (stat >= thresh) {
                res.detected = true;
                res.split_index = s;
                res.statistic = stat;
                return res;
            }
        }
        return res;
    }

    if (bern) {
        const double pooled = buf.segment_mean(0, n);
        if (pooled <= 0.0 || pooled >= 1.0) return res;  // all samples identical
    }

    for (std::size_t s = 1; s < n; ++s) {
        const double stat = glr_statistic(buf, s, cfg.family);
        if (stat >= thresh) {
            res.detected = true;
            res.split_index = s;
            res.statistic = stat;
            return res;
        }
    }
    return res;
}

}  // namespace dal::detect

#ifndef GALLAB_PAIR_CORRELATION_HPP
#define GALLAB_PAIR_CORRELATION_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/gcd_sum.hpp"
#include "gallab/integer_set.hpp"
#include "gallab/parallel.hpp"
#include "gallab/rng.hpp"
#include "gallab/stats.hpp"

// Pair correlation of dilated differences mod 1. The distance to the nearest
// integer of alpha*(x_i - x_j) is evaluated through the per-element
// fractional parts frac(alpha*x_i): both counting strategies below apply the
// identical float predicate to the identical values, so they agree
// bit-exactly; the direct loop is the oracle for the sorted window counter.

namespace gallab {

enum class PairCountMethod { direct, sorted };

struct PairCorrResult {
    double alpha = 0.0;
    double s = 0.0;
    u64 n = 0;
    double f_value = 0.0;     // (1/N) * ordered pair count
    u64 ordered_pairs = 0;    // always even
    u64 borderline_pairs = 0; // unordered pairs within 1e-12 of the threshold
};

namespace detail {

// dist(u) = min(u, 1-u) <= threshold, evaluated exactly as the two-sided
// comparison so both counting strategies share the float semantics.
inline bool pair_within(double fi, double fj, double threshold) {
    const double u = std::fabs(fi - fj);
    return u <= threshold || (1.0 - u) <= threshold;
}

inline u64 count_within_direct(std::span<const double> fr, double threshold) {
    if (threshold < 0.0) return 0;
    u64 count = 0;
    for (std::size_t i = 0; i < fr.size(); ++i) {
        for (std::size_t j = i + 1; j < fr.size(); ++j) {
            if (pair_within(fr[i], fr[j], threshold)) ++count;
        }
    }
    return count;
}

// Two amortized-linear sweeps over sorted fractional parts: forward gaps
// u <= threshold form a prefix of each row, wraparound gaps 1-u <= threshold
// a suffix. For threshold < 0.5 the two conditions cannot hold at once
// (u <= thr forces 1-u to round strictly above thr), so no pair is counted
// twice.
inline u64 count_within_sorted(std::span<const double> sorted_fr, double threshold) {
    if (threshold < 0.0) return 0;
    const std::size_t n = sorted_fr.size();
    if (threshold >= 0.5) return static_cast<u64>(n) * (n - 1) / 2;
    u64 count = 0;
    std::size_t ja = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (ja < i + 1) ja = i + 1;
        while (ja < n && sorted_fr[ja] - sorted_fr[i] <= threshold) ++ja;
        count += ja - (i + 1);
    }
    std::size_t jb = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (jb < i + 1) jb = i + 1;
        while (jb < n && !(1.0 - (sorted_fr[jb] - sorted_fr[i]) <= threshold)) ++jb;
        count += n - jb;
    }
    return count;
}

inline std::vector<double> dilated_fractional_parts(const IntegerSet& set, double alpha) {
    std::vector<double> fr(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double t = alpha * static_cast<double>(set[i]);
        double f = t - std::floor(t);
        if (f >= 1.0) f = 0.0;
        fr[i] = f;
    }
    return fr;
}

inline u64 count_at_threshold(std::span<const double> fr, std::span<const double> sorted_fr,
                              double threshold, PairCountMethod method) {
    return method == PairCountMethod::direct ? count_within_direct(fr, threshold)
                                             : count_within_sorted(sorted_fr, threshold);
}

}  // namespace detail

// F(alpha, s, N) = (1/N) #{ordered pairs i != j : ||alpha(x_i - x_j)|| <= s/N}.
// Pairs within 1e-12 of the threshold count as inside and are also reported.
inline PairCorrResult pair_correlation(const IntegerSet& set, double alpha, double s,
                                       PairCountMethod method = PairCountMethod::sorted) {
    const std::size_t n = set.size();
    if (n < 2) throw std::invalid_argument("pair_correlation: need |A| >= 2");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("pair_correlation: alpha must lie in [0,1]");
    if (!(s > 0.0)) throw std::invalid_argument("pair_correlation: s must be > 0");

    const std::vector<double> fr = detail::dilated_fractional_parts(set, alpha);
    std::vector<double> sorted_fr;
    if (method == PairCountMethod::sorted) {
        sorted_fr = fr;
        std::sort(sorted_fr.begin(), sorted_fr.end());
    }

    constexpr double kTolerance = 1e-12;
    const double threshold = s / static_cast<double>(n);
    const u64 inside = detail::count_at_threshold(fr, sorted_fr, threshold + kTolerance, method);
    const double low = threshold - kTolerance;
    const u64 strictly_below =
        detail::count_at_threshold(fr, sorted_fr, std::nextafter(low, -HUGE_VAL), method);

    PairCorrResult out;
    out.alpha = alpha;
    out.s = s;
    out.n = static_cast<u64>(n);
    out.ordered_pairs = 2 * inside;
    out.f_value = static_cast<double>(out.ordered_pairs) / static_cast<double>(n);
    out.borderline_pairs = inside - strictly_below;
    return out;
}

// Exact mean of F over uniform alpha: each nonzero integer difference lands
// within delta of an integer on an alpha-set of measure exactly 2*delta
// (delta < 1/2), so E_alpha F = 2s(N-1)/N for every set.
inline double alpha_average_target(u64 n, double s) {
    return 2.0 * s * static_cast<double>(n - 1) / static_cast<double>(n);
}

namespace detail {

template <typename PerSample>
inline void sample_alphas(u64 samples, u64 seed, PerSample&& per_sample) {
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        Xoshiro256pp rng(child_seed(seed, static_cast<u64>(i)));
        per_sample(i, uniform_unit(rng));
    });
}

}  // namespace detail

// Monte Carlo mean of F over uniform alpha; compare with alpha_average_target.
inline MomentEstimate alpha_average_check(const IntegerSet& set, double s, u64 samples, u64 seed) {
    const u64 n = static_cast<u64>(set.size());
    if (n < 2) throw std::invalid_argument("alpha_average_check: need |A| >= 2");
    if (samples < 100) throw std::invalid_argument("alpha_average_check: need samples >= 100");
    if (!(s > 0.0) || !(s / static_cast<double>(n) < 0.5)) {
        throw std::invalid_argument("alpha_average_check: requires 0 < s/N < 1/2");
    }
    std::vector<double> values(static_cast<std::size_t>(samples));
    detail::sample_alphas(samples, seed, [&](std::size_t i, double alpha) {
        values[i] = pair_correlation(set, alpha, s).f_value;
    });
    MeanAccumulator acc;
    for (double v : values) acc.add({v, 0.0});
    return acc.estimate();
}

// Monte Carlo of the alpha-variance integral of |F - 2s|^2.
inline double variance_estimate(const IntegerSet& set, double s, u64 samples, u64 seed) {
    const u64 n = static_cast<u64>(set.size());
    if (n < 2) throw std::invalid_argument("variance_estimate: need |A| >= 2");
    if (samples < 100) throw std::invalid_argument("variance_estimate: need samples >= 100");
    if (!(s > 0.0) || !(s / static_cast<double>(n) < 0.5)) {
        throw std::invalid_argument("variance_estimate: requires 0 < s/N < 1/2");
    }
    std::vector<double> values(static_cast<std::size_t>(samples));
    detail::sample_alphas(samples, seed, [&](std::size_t i, double alpha) {
        const double f = pair_correlation(set, alpha, s).f_value;
        const double d = f - 2.0 * s;
        values[i] = d * d;
    });
    KahanSum acc;
    for (double v : values) acc.add(v);
    return acc.value() / static_cast<double>(samples);
}

// (log N / N^3) * gcd-sum of differences at alpha = 1/2: the computable side
// of the variance upper bound, up to its implied constant.
inline double variance_upper_panel(const IntegerSet& set) {
    if (set.size() < 3) throw std::invalid_argument("variance_upper_panel: need |A| >= 3");
    const double n = static_cast<double>(set.size());
    return std::log(n) / (n * n * n) * gcd_sum_of_differences(set, 0.5).value.real();
}

// N_j = floor(e^{eta*j}) for j = 1..j_max, adjacent duplicates collapsed.
// A floor this close to integers needs a snap: IEEE exp(3*ln 2) is
// 7.999999999999998, so values within relative 1e-12 of the next integer
// round up before flooring.
inline std::vector<u64> subsequence_schedule(double eta, u64 j_max) {
    if (!(eta > 0.0)) throw std::invalid_argument("subsequence_schedule: eta must be > 0");
    if (j_max < 1) throw std::invalid_argument("subsequence_schedule: j_max must be >= 1");
    std::vector<u64> out;
    for (u64 j = 1; j <= j_max; ++j) {
        const double y = std::exp(eta * static_cast<double>(j));
        if (!(y < 9.0e18)) throw std::invalid_argument("subsequence_schedule: entry exceeds 64-bit range");
        double k = std::floor(y);
        if ((k + 1.0) - y <= 1e-12 * (k + 1.0)) k += 1.0;
        const u64 value = static_cast<u64>(k);
        if (out.empty() || out.back() != value) out.push_back(value);
    }
    return out;
}

}  // namespace gallab

#endif  // GALLAB_PAIR_CORRELATION_HPP

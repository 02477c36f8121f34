#ifndef GALLAB_GCD_SUM_HPP
#define GALLAB_GCD_SUM_HPP

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/energy.hpp"
#include "gallab/parallel.hpp"
#include "gallab/sieve.hpp"
#include "gallab/stats.hpp"
#include "gallab/weight_function.hpp"

// Weighted GCD sums  sum_{a,b} f(a) conj(f(b)) (a,b)^{2*alpha} / (ab)^alpha,
// evaluated two independent ways: the direct pairwise loop and a divisor
// decomposition. The pair (a,b)<->(b,a) is folded together, so the computed
// value is exactly real for every complex f (the kernel is symmetric).

namespace gallab {

enum class GcdSumMethod { naive, divisor };

struct GcdSumReport {
    double alpha = 0.0;
    std::complex<double> value{0.0, 0.0};
    GcdSumMethod method = GcdSumMethod::naive;
    u64 pair_count = 0;  // ordered pairs, diagonal included
};

namespace detail {

// (g^2 / ab)^alpha. Integers below 2^53 are exactly representable, so the
// pow route is used there; above it the exp/log form avoids the conversion
// cliff on a and b themselves.
inline double gcd_kernel(u64 a, u64 b, u64 g, double alpha) {
    constexpr u64 kExactDouble = u64{1} << 53;
    if (a < kExactDouble && b < kExactDouble) {
        return std::pow(static_cast<double>(g), 2.0 * alpha) /
               (std::pow(static_cast<double>(a), alpha) * std::pow(static_cast<double>(b), alpha));
    }
    return std::exp(alpha * (2.0 * std::log(static_cast<double>(g)) -
                             std::log(static_cast<double>(a)) - std::log(static_cast<double>(b))));
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw std::invalid_argument("gcd sum: alpha must lie in (0, 1]");
    }
}

}  // namespace detail

// Direct O(S^2) evaluation with binary GCD. Off-diagonal pairs are folded:
// the (a,b)+(b,a) contribution is 2*Re(f(a)*conj(f(b)))*kernel, so the
// accumulator is a real compensated sum. Rows are processed in fixed-size
// chunks whose partial sums are combined in chunk order; the result does not
// depend on the worker count.
inline GcdSumReport gcd_sum_naive(const WeightFunction& f, double alpha) {
    detail::check_alpha(alpha);
    const auto& entries = f.entries();
    const std::size_t s = entries.size();

    std::vector<double> pow_alpha(s);
    for (std::size_t i = 0; i < s; ++i) {
        const u64 a = entries[i].first;
        pow_alpha[i] = a < (u64{1} << 53) ? std::pow(static_cast<double>(a), alpha)
                                          : std::exp(alpha * std::log(static_cast<double>(a)));
    }

    constexpr std::size_t kRowChunk = 64;
    const std::size_t chunks = (s + kRowChunk - 1) / kRowChunk;
    std::vector<double> partial(chunks, 0.0);

    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t row_begin = c * kRowChunk;
        const std::size_t row_end = std::min(s, row_begin + kRowChunk);
        KahanSum acc;
        for (std::size_t i = row_begin; i < row_end; ++i) {
            const u64 a = entries[i].first;
            const std::complex<double> fa = entries[i].second;
            acc.add(std::norm(fa));  // diagonal kernel is exactly 1
            for (std::size_t j = i + 1; j < s; ++j) {
                const u64 b = entries[j].first;
                const u64 g = gcd_u64(a, b);
                double kernel;
                if (a < (u64{1} << 53) && b < (u64{1} << 53)) {
                    kernel = std::pow(static_cast<double>(g), 2.0 * alpha) / (pow_alpha[i] * pow_alpha[j]);
                } else {
                    kernel = detail::gcd_kernel(a, b, g, alpha);
                }
                const double re = fa.real() * entries[j].second.real() + fa.imag() * entries[j].second.imag();
                acc.add(2.0 * re * kernel);
            }
        }
        partial[c] = acc.value();
    });

    KahanSum total;
    for (double p : partial) total.add(p);
    return GcdSumReport{alpha, {total.value(), 0.0}, GcdSumMethod::naive,
                        static_cast<u64>(s) * static_cast<u64>(s)};
}

// Divisor decomposition: writing (a,b)^{2a} = sum_{d | (a,b)} g(d) with the
// multiplicative g(p^k) = p^{2ak} - p^{2a(k-1)} >= 0 turns the double sum
// into sum_d g(d) * |T_d|^2 where T_d = sum_{d|a} f(a)/a^alpha. Cost is the
// divisor closure of the support, not S^2.
inline GcdSumReport gcd_sum_divisor(const WeightFunction& f, double alpha) {
    detail::check_alpha(alpha);
    const auto& entries = f.entries();

    struct Slot {
        double g = -1.0;  // filled on first visit
        std::complex<double> t{0.0, 0.0};
    };
    std::map<u64, Slot> closure;

    for (const auto& [a, fa] : entries) {
        const Factorization factors = factorize(a);
        const double inv_pow = 1.0 / (a < (u64{1} << 53) ? std::pow(static_cast<double>(a), alpha)
                                                         : std::exp(alpha * std::log(static_cast<double>(a))));
        const std::complex<double> term = fa * inv_pow;

        // enumerate divisors together with their g-values
        std::vector<std::pair<u64, double>> divisors{{1, 1.0}};
        for (const auto& [p, k] : factors) {
            const double p2a = std::pow(static_cast<double>(p), 2.0 * alpha);
            const std::size_t base = divisors.size();
            u64 pk = 1;
            double gp = 1.0;
            for (int e = 1; e <= k; ++e) {
                pk *= p;
                // g(p^e) = p^{2*alpha*e} - p^{2*alpha*(e-1)}
                gp = (e == 1) ? (p2a - 1.0) : gp * p2a;
                for (std::size_t i = 0; i < base; ++i) {
                    divisors.emplace_back(divisors[i].first * pk, divisors[i].second * gp);
                }
            }
        }
        for (const auto& [d, g] : divisors) {
            Slot& slot = closure[d];
            if (slot.g < 0.0) slot.g = g;
            slot.t += term;
        }
    }

    KahanSum total;
    for (const auto& [d, slot] : closure) {
        total.add(slot.g * std::norm(slot.t));
    }
    const std::size_t s = entries.size();
    return GcdSumReport{alpha, {total.value(), 0.0}, GcdSumMethod::divisor,
                        static_cast<u64>(s) * static_cast<u64>(s)};
}

// Eq-(1) sum with f(n) = r_A(n) on positive differences.
inline GcdSumReport gcd_sum_of_differences(const IntegerSet& set, double alpha,
                                           GcdSumMethod method = GcdSumMethod::divisor) {
    if (set.size() < 2) throw std::invalid_argument("gcd_sum_of_differences: need |A| >= 2");
    const WeightFunction f = WeightFunction::from_rep(rep_function(set));
    return method == GcdSumMethod::naive ? gcd_sum_naive(f, alpha) : gcd_sum_divisor(f, alpha);
}

// GCD sum of differences at alpha = 1/2 divided by the additive energy:
// the quantity whose sub-polynomial growth the scaling experiments probe.
inline double gcd_sum_energy_ratio(const IntegerSet& set) {
    if (set.size() < 3) throw std::invalid_argument("gcd_sum_energy_ratio: need |A| >= 3");
    const double numerator = gcd_sum_of_differences(set, 0.5).value.real();
    return numerator / static_cast<double>(additive_energy(set));
}

}  // namespace gallab

#endif  // GALLAB_GCD_SUM_HPP

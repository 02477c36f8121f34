#ifndef GALLAB_ENERGY_HPP
#define GALLAB_ENERGY_HPP

#include <algorithm>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/integer_set.hpp"
#include "gallab/rep_function.hpp"

// Additive energy, the multiplicative energy of the difference-representation
// function r, and the ratio/incidence counts that bound it. All counting is
// exact integer arithmetic; products of differences are held in 128 bits.

namespace gallab {

// E(A) = sum over all integers n of r(n)^2 with r(0)=N and r(-n)=r(n),
// i.e. N^2 + 2*sum_{n>0} r(n)^2. Equals the number of quadruples with
// a - b = c - d.
inline u64 additive_energy(const RepFunction& rep) {
    u128 acc = checked_mul(rep.set_size(), rep.set_size());
    for (const auto& [n, r] : rep.counts()) {
        acc = checked_add(acc, 2 * checked_mul(r, r));
    }
    if (acc > u128{UINT64_MAX}) throw std::overflow_error("additive_energy exceeds 64 bits");
    return static_cast<u64>(acc);
}

inline u64 additive_energy(const IntegerSet& set) { return additive_energy(rep_function(set)); }

// sum over positive differences k,l,m,n with k*l = m*n of r(k)r(l)r(m)r(n),
// via the keyed aggregation Q(p) = sum_{kl=p} r(k)r(l), result = sum_p Q(p)^2.
// O(S^2) time and memory in the support size S.
inline u128 mult_energy_of_r(const RepFunction& rep) {
    if (rep.set_size() < 2) throw std::invalid_argument("mult_energy_of_r: need |A| >= 2");
    const auto& counts = rep.counts();
    std::vector<std::pair<u128, u128>> products;
    products.reserve(counts.size() * (counts.size() + 1) / 2);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto [k, rk] = counts[i];
        products.emplace_back(checked_mul(u128{k}, u128{k}), checked_mul(rk, rk));
        for (std::size_t j = i + 1; j < counts.size(); ++j) {
            const auto [l, rl] = counts[j];
            // (k,l) and (l,k) contribute the same key
            products.emplace_back(checked_mul(u128{k}, u128{l}), 2 * checked_mul(rk, rl));
        }
    }
    std::sort(products.begin(), products.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    u128 result = 0;
    std::size_t i = 0;
    while (i < products.size()) {
        const u128 key = products[i].first;
        u128 q = 0;
        while (i < products.size() && products[i].first == key) {
            q = checked_add(q, products[i].second);
            ++i;
        }
        result = checked_add(result, checked_mul(q, q));
    }
    return result;
}

inline u128 mult_energy_of_r(const IntegerSet& set) { return mult_energy_of_r(rep_function(set)); }

// Ratio n/m in lowest terms. Ordered by value.
struct RatioKey {
    u64 num = 1;
    u64 den = 1;

    static RatioKey reduce(u64 n, u64 m) {
        if (n == 0 || m == 0) throw std::invalid_argument("RatioKey: components must be positive");
        const u64 g = gcd_u64(n, m);
        return RatioKey{n / g, m / g};
    }

    friend bool operator==(const RatioKey& a, const RatioKey& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const RatioKey& a, const RatioKey& b) {
        // compare a.num/a.den with b.num/b.den exactly
        const u128 lhs = u128{a.num} * b.den;
        const u128 rhs = u128{b.num} * a.den;
        return lhs < rhs;
    }
};

// S(z) = sum over ordered pairs (n,m) of positive differences with n/m = z
// of r(n)r(m). The squares of these row sums total mult_energy_of_r.
inline std::map<RatioKey, u64> ratio_energy_decomposition(const RepFunction& rep) {
    if (rep.set_size() < 2) throw std::invalid_argument("ratio_energy_decomposition: need |A| >= 2");
    std::map<RatioKey, u64> out;
    const auto& counts = rep.counts();
    for (const auto& [n, rn] : counts) {
        for (const auto& [m, rm] : counts) {
            const u128 w = checked_mul(rn, rm);
            if (w > u128{UINT64_MAX}) throw std::overflow_error("ratio weight overflow");
            auto& slot = out[RatioKey::reduce(n, m)];
            slot = checked_add_u64(slot, static_cast<u64>(w));
        }
    }
    return out;
}

inline std::map<RatioKey, u64> ratio_energy_decomposition(const IntegerSet& set) {
    return ratio_energy_decomposition(rep_function(set));
}

// sum_{n,m : n/m in Z} r(n)r(m) = sum_{z in Z} S(z). Z is deduplicated.
// O(|Z| * S log S) rather than a full decomposition.
inline u64 ratio_restricted_energy(const RepFunction& rep, std::span<const RatioKey> ratio_set) {
    if (rep.set_size() < 2) throw std::invalid_argument("ratio_restricted_energy: need |A| >= 2");
    std::vector<RatioKey> zs(ratio_set.begin(), ratio_set.end());
    std::sort(zs.begin(), zs.end());
    zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    const auto& counts = rep.counts();
    u64 acc = 0;
    for (const RatioKey& z : zs) {
        for (const auto& [m, rm] : counts) {
            if (m % z.den != 0) continue;
            const u128 n = u128{m / z.den} * z.num;
            if (n > rep.max_difference()) continue;
            const u64 rn = rep.at(static_cast<u64>(n));
            if (rn == 0) continue;
            const u128 w = checked_mul(rn, rm);
            if (w > u128{UINT64_MAX}) throw std::overflow_error("ratio weight overflow");
            acc = checked_add_u64(acc, static_cast<u64>(w));
        }
    }
    return acc;
}

inline u64 ratio_restricted_energy(const IntegerSet& set, std::span<const RatioKey> ratio_set) {
    return ratio_restricted_energy(rep_function(set), ratio_set);
}

// Signed rational with exact arithmetic, for incidence counting.
struct Rational {
    i64 num = 0;
    i64 den = 1;  // > 0

    static Rational of(i64 num, i64 den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (num == INT64_MIN || den == INT64_MIN) throw std::invalid_argument("Rational: component out of range");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const u64 g = gcd_u64(static_cast<u64>(num < 0 ? -num : num), static_cast<u64>(den));
        if (g > 1) {
            num /= static_cast<i64>(g);
            den /= static_cast<i64>(g);
        }
        return Rational{num, den};
    }
};

namespace detail {
inline i128 checked_mul_i128(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("128-bit product overflow");
    return r;
}
inline i128 checked_sub_i128(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("128-bit difference overflow");
    return r;
}
}  // namespace detail

// #{(a,b) in A^2 : a + b*z = y}, exactly. For each b the unique candidate
// a = y - b*z is tested for integrality and membership.
inline u64 incidence_count(const IntegerSet& set, Rational y, Rational z) {
    y = Rational::of(y.num, y.den);
    z = Rational::of(z.num, z.den);
    const i128 den = detail::checked_mul_i128(y.den, z.den);  // > 0
    u64 count = 0;
    for (u64 b : set.values()) {
        // a = (y.num*z.den - b*z.num*y.den) / (y.den*z.den)
        const i128 lhs = detail::checked_mul_i128(y.num, z.den);
        const i128 rhs = detail::checked_mul_i128(detail::checked_mul_i128(i128{z.num}, i128{y.den}), i128(b));
        const i128 numerator = detail::checked_sub_i128(lhs, rhs);
        if (numerator <= 0 || numerator % den != 0) continue;
        const i128 a = numerator / den;
        if (a > i128{kMaxElement}) continue;
        if (set.contains(static_cast<u64>(a))) ++count;
    }
    return count;
}

}  // namespace gallab

#endif  // GALLAB_ENERGY_HPP

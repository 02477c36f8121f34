#ifndef GALLAB_SIEVE_HPP
#define GALLAB_SIEVE_HPP

#include <vector>

#include "gallab/common.hpp"

namespace gallab {

struct PrimePower {
    u64 prime;
    int exponent;
};

using Factorization = std::vector<PrimePower>;

// Smallest-prime-factor table for 2..limit. Immutable after construction,
// safe to share across threads.
class SpfSieve {
public:
    explicit SpfSieve(u64 limit) : limit_(limit) {
        if (limit < 1) throw std::invalid_argument("SpfSieve: limit must be >= 1");
        if (limit > (u64{1} << 31)) throw std::invalid_argument("SpfSieve: limit too large");
        spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
        for (u64 i = 2; i <= limit; ++i) {
            if (spf_[i] == 0) {
                primes_.push_back(i);
                for (u64 j = i; j <= limit; j += i) {
                    if (spf_[j] == 0) spf_[j] = static_cast<u32>(i);
                }
            }
        }
    }

    u64 limit() const { return limit_; }
    const std::vector<u64>& primes() const { return primes_; }

    u64 smallest_factor(u64 n) const {
        if (n < 2 || n > limit_) throw std::out_of_range("SpfSieve: n out of range");
        return spf_[static_cast<std::size_t>(n)];
    }

    Factorization factorize(u64 n) const {
        if (n < 1 || n > limit_) throw std::out_of_range("SpfSieve: n out of range");
        Factorization out;
        while (n > 1) {
            const u64 p = spf_[static_cast<std::size_t>(n)];
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            out.push_back({p, k});
        }
        return out;
    }

private:
    u64 limit_;
    std::vector<u32> spf_;
    std::vector<u64> primes_;
};

// Trial division for values past any sieve. Fine for the desk-scale inputs
// this library targets (elements up to ~1e12).
inline Factorization factorize(u64 n) {
    if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
    Factorization out;
    for (u64 p : {u64{2}, u64{3}}) {
        if (n % p == 0) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            out.push_back({p, k});
        }
    }
    // 6k±1 wheel
    for (u64 p = 5; p <= n / p; p += (p % 6 == 5) ? 2 : 4) {
        if (n % p == 0) {
            int k = 0;
            while (n % p == 0) {
                n /= p;
                ++k;
            }
            out.push_back({p, k});
        }
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

// Calls fn(d) for every divisor d of the factored value, in recursive
// (not sorted) order.
template <typename Fn>
void for_each_divisor(const Factorization& factors, Fn&& fn) {
    std::vector<u64> divisors{1};
    for (const auto& [p, k] : factors) {
        const std::size_t base = divisors.size();
        u64 pk = 1;
        for (int e = 1; e <= k; ++e) {
            pk *= p;
            for (std::size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * pk);
        }
    }
    for (u64 d : divisors) fn(d);
}

}  // namespace gallab

#endif  // GALLAB_SIEVE_HPP

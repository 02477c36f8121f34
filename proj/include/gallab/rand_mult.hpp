#ifndef GALLAB_RAND_MULT_HPP
#define GALLAB_RAND_MULT_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/gcd_sum.hpp"
#include "gallab/parallel.hpp"
#include "gallab/rng.hpp"
#include "gallab/sieve.hpp"
#include "gallab/stats.hpp"
#include "gallab/weight_function.hpp"

// Random completely multiplicative functions: one independent uniform phase
// per prime, X(n) built up the smallest-prime-factor chain so that
// X(mn) = X(m)X(n) holds to rounding. The truncated zeta surrogate is the
// finite sum over n <= T; every expectation this module verifies is stated
// against the matching finite-T reference, never the infinite series.

namespace gallab {

class RandMultSampler {
public:
    RandMultSampler(u64 seed, u64 truncation)
        : RandMultSampler(seed, std::make_shared<const SpfSieve>(truncation)) {}

    RandMultSampler(u64 seed, std::shared_ptr<const SpfSieve> sieve)
        : sieve_(std::move(sieve)) {
        if (!sieve_) throw std::invalid_argument("RandMultSampler: null sieve");
        x_.resize(static_cast<std::size_t>(sieve_->limit()) + 1);
        phases_.resize(sieve_->primes().size());
        reseed(seed);
    }

    // Redraws all phases and rebuilds the X table in place.
    void reseed(u64 seed) {
        seed_ = seed;
        Xoshiro256pp rng(seed);
        const auto& primes = sieve_->primes();
        x_[0] = {0.0, 0.0};
        if (sieve_->limit() >= 1) x_[1] = {1.0, 0.0};
        // one phase per prime, drawn in ascending prime order
        for (std::size_t i = 0; i < primes.size(); ++i) {
            phases_[i] = 2.0 * std::numbers::pi * uniform_unit(rng);
        }
        std::vector<std::complex<double>> prime_value(primes.size());
        for (std::size_t i = 0; i < primes.size(); ++i) {
            prime_value[i] = {std::cos(phases_[i]), std::sin(phases_[i])};
        }
        // X(n) = X(spf(n)) * X(n / spf(n))
        std::size_t prime_index = 0;
        for (u64 n = 2; n <= sieve_->limit(); ++n) {
            const u64 p = sieve_->smallest_factor(n);
            if (p == n) {
                while (primes[prime_index] != n) ++prime_index;
                x_[static_cast<std::size_t>(n)] = prime_value[prime_index];
            } else {
                x_[static_cast<std::size_t>(n)] =
                    x_[static_cast<std::size_t>(p)] * x_[static_cast<std::size_t>(n / p)];
            }
        }
    }

    u64 seed() const { return seed_; }
    u64 truncation() const { return sieve_->limit(); }
    const SpfSieve& sieve() const { return *sieve_; }

    // Phase angle for a prime p <= T.
    double phase(u64 p) const {
        const auto& primes = sieve_->primes();
        const auto it = std::lower_bound(primes.begin(), primes.end(), p);
        if (it == primes.end() || *it != p) throw std::invalid_argument("phase: not a prime <= T");
        return phases_[static_cast<std::size_t>(it - primes.begin())];
    }

    std::complex<double> sample_x(u64 n) const {
        if (n < 1 || n > truncation()) throw std::out_of_range("sample_x: n outside [1, T]");
        return x_[static_cast<std::size_t>(n)];
    }

    // sum_{n<=T} X(n) / n^alpha
    std::complex<double> zeta_truncated(double alpha) const {
        if (!(alpha > 0.0)) throw std::invalid_argument("zeta_truncated: alpha must be > 0");
        KahanSum re, im;
        for (u64 n = 1; n <= truncation(); ++n) {
            const double w = std::pow(static_cast<double>(n), -alpha);
            const std::complex<double> x = x_[static_cast<std::size_t>(n)];
            re.add(x.real() * w);
            im.add(x.imag() * w);
        }
        return {re.value(), im.value()};
    }

    // Same sum with precomputed weights[n] = n^-alpha (see power_weights).
    std::complex<double> zeta_truncated(std::span<const double> weights) const {
        if (weights.size() != x_.size()) throw std::invalid_argument("zeta_truncated: weight table size mismatch");
        KahanSum re, im;
        for (std::size_t n = 1; n < x_.size(); ++n) {
            re.add(x_[n].real() * weights[n]);
            im.add(x_[n].imag() * weights[n]);
        }
        return {re.value(), im.value()};
    }

    // D(X) = sum_n f(n) X(n); the whole support must sit below T.
    std::complex<double> dirichlet_polynomial(const WeightFunction& f) const {
        if (f.max_key() > truncation()) throw std::out_of_range("dirichlet_polynomial: support exceeds T");
        KahanSum re, im;
        for (const auto& [n, v] : f.entries()) {
            const std::complex<double> t = v * x_[static_cast<std::size_t>(n)];
            re.add(t.real());
            im.add(t.imag());
        }
        return {re.value(), im.value()};
    }

private:
    std::shared_ptr<const SpfSieve> sieve_;
    u64 seed_ = 0;
    std::vector<double> phases_;             // aligned with sieve().primes()
    std::vector<std::complex<double>> x_;    // x_[n] = X(n), n <= T
};

// weights[n] = n^-alpha for n in [1, T]; weights[0] unused.
inline std::vector<double> power_weights(u64 truncation, double alpha) {
    std::vector<double> w(static_cast<std::size_t>(truncation) + 1, 0.0);
    for (u64 n = 1; n <= truncation; ++n) {
        w[static_cast<std::size_t>(n)] = std::pow(static_cast<double>(n), -alpha);
    }
    return w;
}

// E|D(X)|^4 evaluated exactly: group the pair products ab (128-bit keys) and
// sum |sum_{ab=p} f(a)f(b)|^2. Real and nonnegative by construction.
inline std::complex<double> fourth_moment_exact(const WeightFunction& f) {
    const auto& entries = f.entries();
    std::vector<std::pair<u128, std::complex<double>>> products;
    products.reserve(entries.size() * (entries.size() + 1) / 2);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [a, fa] = entries[i];
        products.emplace_back(checked_mul(u128{a}, u128{a}), fa * fa);
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            const auto& [b, fb] = entries[j];
            products.emplace_back(checked_mul(u128{a}, u128{b}), 2.0 * fa * fb);
        }
    }
    std::sort(products.begin(), products.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    KahanSum total;
    std::size_t i = 0;
    while (i < products.size()) {
        const u128 key = products[i].first;
        std::complex<double> inner{0.0, 0.0};
        while (i < products.size() && products[i].first == key) {
            inner += products[i].second;
            ++i;
        }
        total.add(std::norm(inner));
    }
    return {total.value(), 0.0};
}

// Monte Carlo of E|D(X)|^2 with per-sample seeds child_seed(seed, i).
// The exact value is ||f||_2^2.
inline MomentEstimate dirichlet_second_moment(const WeightFunction& f, u64 truncation,
                                              u64 samples, u64 seed) {
    if (samples < 2) throw std::invalid_argument("dirichlet_second_moment: need samples >= 2");
    if (f.max_key() > truncation) throw std::out_of_range("dirichlet_second_moment: support exceeds T");
    auto sieve = std::make_shared<const SpfSieve>(truncation);
    std::vector<double> values(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        thread_local std::unique_ptr<RandMultSampler> sampler;
        if (!sampler || &sampler->sieve() != sieve.get()) {
            sampler = std::make_unique<RandMultSampler>(child_seed(seed, i), sieve);
        } else {
            sampler->reseed(child_seed(seed, i));
        }
        values[i] = std::norm(sampler->dirichlet_polynomial(f));
    });

    MeanAccumulator acc;
    for (double v : values) acc.add({v, 0.0});
    return acc.estimate();
}

struct IdentityCheckResult {
    MomentEstimate estimate;   // Monte Carlo E|zeta_X^{(T)}(alpha) * D(X)|^2
    double exact_reference;    // closed-form finite-T value
    double sigmas_off() const { return sigmas_between(estimate, exact_reference); }
};

// Orthogonality of distinct X(n) collapses E|zeta^{(T)} D|^2 to
//   sum_{a,b} f(a)conj(f(b)) (a,b)^{2alpha}/(ab)^alpha * Zp(floor(T*(a,b)/max(a,b)))
// with Zp(M) = sum_{k<=M} k^{-2alpha}; as T grows Zp -> zeta(2alpha) and the
// classical GCD-sum identity reappears. The Monte Carlo estimate must sit
// within a few standard errors of the reference.
inline IdentityCheckResult identity_check(const WeightFunction& f, double alpha, u64 truncation,
                                          u64 samples, u64 seed) {
    if (!(alpha > 0.5)) throw std::invalid_argument("identity_check: alpha must be > 1/2");
    if (samples < 100) throw std::invalid_argument("identity_check: need samples >= 100");
    if (f.max_key() > truncation) throw std::out_of_range("identity_check: support exceeds T");

    // exact finite-T reference
    std::vector<double> zeta_prefix(static_cast<std::size_t>(truncation) + 1, 0.0);
    {
        KahanSum acc;
        for (u64 k = 1; k <= truncation; ++k) {
            acc.add(std::pow(static_cast<double>(k), -2.0 * alpha));
            zeta_prefix[static_cast<std::size_t>(k)] = acc.value();
        }
    }
    const auto& entries = f.entries();
    KahanSum ref;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& [a, fa] = entries[i];
        ref.add(std::norm(fa) * zeta_prefix[static_cast<std::size_t>(truncation)]);
        for (std::size_t j = i + 1; j < entries.size(); ++j) {
            const auto& [b, fb] = entries[j];
            const u64 g = gcd_u64(a, b);
            const u64 reach = truncation / (std::max(a, b) / g);  // floor(T*g/max(a,b))
            if (reach == 0) continue;
            const double kernel = detail::gcd_kernel(a, b, g, alpha);
            const double re = fa.real() * fb.real() + fa.imag() * fb.imag();
            ref.add(2.0 * re * kernel * zeta_prefix[static_cast<std::size_t>(reach)]);
        }
    }

    // Monte Carlo side
    auto sieve = std::make_shared<const SpfSieve>(truncation);
    const std::vector<double> weights = power_weights(truncation, alpha);
    std::vector<double> values(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        thread_local std::unique_ptr<RandMultSampler> sampler;
        if (!sampler || &sampler->sieve() != sieve.get()) {
            sampler = std::make_unique<RandMultSampler>(child_seed(seed, i), sieve);
        } else {
            sampler->reseed(child_seed(seed, i));
        }
        const std::complex<double> z = sampler->zeta_truncated(std::span<const double>(weights));
        const std::complex<double> d = sampler->dirichlet_polynomial(f);
        values[i] = std::norm(z * d);
    });
    MeanAccumulator acc;
    for (double v : values) acc.add({v, 0.0});
    return IdentityCheckResult{acc.estimate(), ref.value()};
}

// Monte Carlo of E|zeta_X^{(T)}(alpha)|^{2l} for real l >= 1, computed
// pointwise as exp(l * log|z|^2).
inline MomentEstimate moment_estimate(double alpha, double l, u64 truncation, u64 samples, u64 seed) {
    if (!(alpha > 0.5)) throw std::invalid_argument("moment_estimate: alpha must be > 1/2");
    if (l < 1.0) throw std::invalid_argument("moment_estimate: l must be >= 1");
    if (samples < 100) throw std::invalid_argument("moment_estimate: need samples >= 100");
    auto sieve = std::make_shared<const SpfSieve>(truncation);
    const std::vector<double> weights = power_weights(truncation, alpha);
    std::vector<double> values(static_cast<std::size_t>(samples));
    parallel_for(static_cast<std::size_t>(samples), [&](std::size_t i) {
        thread_local std::unique_ptr<RandMultSampler> sampler;
        if (!sampler || &sampler->sieve() != sieve.get()) {
            sampler = std::make_unique<RandMultSampler>(child_seed(seed, i), sieve);
        } else {
            sampler->reseed(child_seed(seed, i));
        }
        const std::complex<double> z = sampler->zeta_truncated(std::span<const double>(weights));
        const double m2 = std::norm(z);
        values[i] = (l == 1.0) ? m2 : ((m2 == 0.0) ? 0.0 : std::exp(l * std::log(m2)));
    });
    MeanAccumulator acc;
    for (double v : values) acc.add({v, 0.0});
    return acc.estimate();
}

}  // namespace gallab

#endif  // GALLAB_RAND_MULT_HPP

#ifndef GALLAB_STATS_HPP
#define GALLAB_STATS_HPP

#include <cmath>
#include <complex>
#include <stdexcept>

#include "gallab/common.hpp"

namespace gallab {

// Kahan-compensated accumulator. Pairwise loops at desk scale reach ~1e7
// terms; plain summation loses digits the oracle comparisons need.
class KahanSum {
public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

// One Monte Carlo answer: sample mean, its standard error, sample count.
struct MomentEstimate {
    std::complex<double> mean{0.0, 0.0};
    double std_error = 0.0;
    u64 samples = 0;
};

// Welford running mean/variance over complex samples (variance is the sum of
// the real and imaginary component variances, which reduces to the usual
// scalar formula for real-valued data).
class MeanAccumulator {
public:
    void add(std::complex<double> v) {
        ++count_;
        const std::complex<double> delta = v - mean_;
        mean_ += delta / static_cast<double>(count_);
        const std::complex<double> delta2 = v - mean_;
        m2_ += delta.real() * delta2.real() + delta.imag() * delta2.imag();
    }

    u64 count() const { return count_; }
    std::complex<double> mean() const { return mean_; }

    double std_error() const {
        if (count_ < 2) return 0.0;
        const double n = static_cast<double>(count_);
        return std::sqrt(m2_ / ((n - 1.0) * n));
    }

    MomentEstimate estimate() const {
        if (count_ < 2) throw std::logic_error("MomentEstimate needs at least 2 samples");
        return MomentEstimate{mean_, std_error(), count_};
    }

private:
    u64 count_ = 0;
    std::complex<double> mean_{0.0, 0.0};
    double m2_ = 0.0;
};

// |mean - reference| in units of the standard error.
inline double sigmas_between(const MomentEstimate& est, double reference) {
    const double diff = std::abs(est.mean - std::complex<double>{reference, 0.0});
    if (est.std_error == 0.0) return diff == 0.0 ? 0.0 : HUGE_VAL;
    return diff / est.std_error;
}

}  // namespace gallab

#endif  // GALLAB_STATS_HPP

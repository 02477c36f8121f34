#ifndef GALLAB_WEIGHT_FUNCTION_HPP
#define GALLAB_WEIGHT_FUNCTION_HPP

#include <complex>
#include <utility>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/integer_set.hpp"
#include "gallab/rep_function.hpp"
#include "gallab/stats.hpp"

namespace gallab {

// Finitely supported complex coefficient function. Support keys strictly
// increasing, values nonzero.
class WeightFunction {
public:
    using Entry = std::pair<u64, std::complex<double>>;

    static WeightFunction from_entries(std::vector<Entry> entries) {
        if (entries.empty()) throw std::invalid_argument("WeightFunction: empty support");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (entries[i].first < 1) throw std::invalid_argument("WeightFunction: keys must be >= 1");
            if (entries[i].first > kMaxElement) throw std::invalid_argument("WeightFunction: key exceeds 2^63-1");
            if (i > 0 && entries[i].first <= entries[i - 1].first) {
                throw std::invalid_argument("WeightFunction: keys must be strictly increasing");
            }
            if (entries[i].second == std::complex<double>{0.0, 0.0}) {
                throw std::invalid_argument("WeightFunction: values must be nonzero");
            }
        }
        return WeightFunction(std::move(entries));
    }

    // f = 1 on the set.
    static WeightFunction ones(const IntegerSet& set) {
        std::vector<Entry> entries;
        entries.reserve(set.size());
        for (u64 v : set.values()) entries.emplace_back(v, std::complex<double>{1.0, 0.0});
        return WeightFunction(std::move(entries));
    }

    // f(n) = r(n) on positive differences.
    static WeightFunction from_rep(const RepFunction& rep) {
        if (rep.counts().empty()) throw std::invalid_argument("WeightFunction: representation function is empty");
        std::vector<Entry> entries;
        entries.reserve(rep.counts().size());
        for (const auto& [n, r] : rep.counts()) {
            entries.emplace_back(n, std::complex<double>{static_cast<double>(r), 0.0});
        }
        return WeightFunction(std::move(entries));
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    u64 max_key() const { return entries_.back().first; }

    double norm1() const {
        KahanSum s;
        for (const auto& [n, v] : entries_) s.add(std::abs(v));
        return s.value();
    }

    double norm2_squared() const {
        KahanSum s;
        for (const auto& [n, v] : entries_) s.add(std::norm(v));
        return s.value();
    }

    bool is_real_nonnegative() const {
        for (const auto& [n, v] : entries_) {
            if (v.imag() != 0.0 || v.real() < 0.0) return false;
        }
        return true;
    }

private:
    explicit WeightFunction(std::vector<Entry> entries) : entries_(std::move(entries)) {}
    std::vector<Entry> entries_;
};

}  // namespace gallab

#endif  // GALLAB_WEIGHT_FUNCTION_HPP

#ifndef GALLAB_REP_FUNCTION_HPP
#define GALLAB_REP_FUNCTION_HPP

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/integer_set.hpp"

namespace gallab {

// Counts of positive differences of a set: counts()[.] maps n >= 1 to
// #{(a,b) in A^2 : a-b = n}. Zero counts are absent; the total count is
// N(N-1)/2.
class RepFunction {
public:
    RepFunction(std::vector<std::pair<u64, u64>> counts, u64 set_size)
        : counts_(std::move(counts)), set_size_(set_size) {}

    const std::vector<std::pair<u64, u64>>& counts() const { return counts_; }
    u64 set_size() const { return set_size_; }

    u64 at(u64 difference) const {
        auto it = std::lower_bound(counts_.begin(), counts_.end(), difference,
                                   [](const auto& entry, u64 key) { return entry.first < key; });
        if (it == counts_.end() || it->first != difference) return 0;
        return it->second;
    }

    u64 total() const { return set_size_ * (set_size_ - 1) / 2; }
    u64 max_difference() const { return counts_.empty() ? 0 : counts_.back().first; }

private:
    std::vector<std::pair<u64, u64>> counts_;  // sorted by difference
    u64 set_size_;
};

inline RepFunction rep_function(const IntegerSet& set) {
    std::unordered_map<u64, u64> acc;
    const auto& v = set.values();
    acc.reserve(v.size() * (v.size() - 1) / 2 + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            ++acc[v[i] - v[j]];
        }
    }
    std::vector<std::pair<u64, u64>> counts(acc.begin(), acc.end());
    std::sort(counts.begin(), counts.end());
    return RepFunction(std::move(counts), static_cast<u64>(v.size()));
}

}  // namespace gallab

#endif  // GALLAB_REP_FUNCTION_HPP

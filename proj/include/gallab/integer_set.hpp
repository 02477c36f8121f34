#ifndef GALLAB_INTEGER_SET_HPP
#define GALLAB_INTEGER_SET_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "gallab/common.hpp"
#include "gallab/rng.hpp"

namespace gallab {

// Finite set of natural numbers, stored strictly increasing. Immutable after
// construction; safe to share across threads.
class IntegerSet {
public:
    // values must already be strictly increasing and >= 1.
    static IntegerSet from_sorted(std::vector<u64> values) {
        validate(values);
        return IntegerSet(std::move(values));
    }

    // Sorts and collapses duplicates; duplicate count available to callers
    // that care (see load_set).
    static IntegerSet from_values(std::vector<u64> values, u64* duplicates_collapsed = nullptr) {
        std::sort(values.begin(), values.end());
        const auto last = std::unique(values.begin(), values.end());
        if (duplicates_collapsed != nullptr) {
            *duplicates_collapsed = static_cast<u64>(values.end() - last);
        }
        values.erase(last, values.end());
        validate(values);
        return IntegerSet(std::move(values));
    }

    std::size_t size() const { return values_.size(); }
    u64 operator[](std::size_t i) const { return values_[i]; }
    const std::vector<u64>& values() const { return values_; }
    u64 min() const { return values_.front(); }
    u64 max() const { return values_.back(); }

    bool contains(u64 x) const {
        return std::binary_search(values_.begin(), values_.end(), x);
    }

    // First n elements, for truncation schedules.
    IntegerSet prefix(std::size_t n) const {
        if (n < 1 || n > values_.size()) throw std::invalid_argument("prefix: bad length");
        return IntegerSet(std::vector<u64>(values_.begin(), values_.begin() + n));
    }

private:
    explicit IntegerSet(std::vector<u64> values) : values_(std::move(values)) {}

    static void validate(const std::vector<u64>& values) {
        if (values.empty()) throw std::invalid_argument("IntegerSet: set must be nonempty");
        if (values.front() < 1) throw std::invalid_argument("IntegerSet: elements must be >= 1");
        if (values.back() > kMaxElement) throw std::invalid_argument("IntegerSet: element exceeds 2^63-1");
        for (std::size_t i = 1; i < values.size(); ++i) {
            if (values[i] <= values[i - 1]) {
                throw std::invalid_argument("IntegerSet: elements must be strictly increasing");
            }
        }
    }

    std::vector<u64> values_;
};

// {1, 2, ..., n}
inline IntegerSet gen_interval(u64 n) {
    if (n < 1) throw std::invalid_argument("gen_interval: n must be >= 1");
    if (n > kMaxElement) throw std::invalid_argument("gen_interval: n exceeds element cap");
    std::vector<u64> v(static_cast<std::size_t>(n));
    for (u64 i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    return IntegerSet::from_sorted(std::move(v));
}

// {1, 4, ..., n^2}
inline IntegerSet gen_squares(u64 n) {
    if (n < 1) throw std::invalid_argument("gen_squares: n must be >= 1");
    if (n > 3037000499ull) throw std::invalid_argument("gen_squares: n^2 exceeds element cap");
    std::vector<u64> v(static_cast<std::size_t>(n));
    for (u64 i = 1; i <= n; ++i) v[static_cast<std::size_t>(i - 1)] = i * i;
    return IntegerSet::from_sorted(std::move(v));
}

// Uniform n-element subset of {1..universe_max} by Floyd's algorithm;
// deterministic for a fixed seed.
inline IntegerSet gen_random_subset(u64 universe_max, u64 n, u64 seed) {
    if (n < 1) throw std::invalid_argument("gen_random_subset: n must be >= 1");
    if (n > universe_max) throw std::invalid_argument("gen_random_subset: n exceeds universe");
    if (universe_max > kMaxElement) throw std::invalid_argument("gen_random_subset: universe exceeds element cap");
    Xoshiro256pp rng(seed);
    std::unordered_set<u64> picked;
    picked.reserve(static_cast<std::size_t>(n) * 2);
    for (u64 j = universe_max - n + 1; j <= universe_max; ++j) {
        const u64 t = 1 + uniform_below(rng, j);
        picked.insert(picked.contains(t) ? j : t);
    }
    return IntegerSet::from_values(std::vector<u64>(picked.begin(), picked.end()));
}

struct LoadStats {
    u64 duplicates_collapsed = 0;
    u64 blank_lines = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, u64 line)
        : std::runtime_error(message + " at line " + std::to_string(line)), line_number(line) {}
    u64 line_number;
};

// One base-10 natural number per line; lines of pure whitespace are skipped.
inline IntegerSet load_set(const std::filesystem::path& path, LoadStats* stats = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_set: cannot open " + path.string());
    std::vector<u64> values;
    LoadStats local;
    std::string line;
    u64 line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) {
            ++local.blank_lines;
            continue;
        }
        std::size_t end = line.find_last_not_of(" \t\r") + 1;
        const std::string token = line.substr(begin, end - begin);
        u64 value = 0;
        bool ok = !token.empty();
        for (char c : token) {
            if (c < '0' || c > '9') {
                ok = false;
                break;
            }
            if (value > kMaxElement / 10) {
                ok = false;
                break;
            }
            value = value * 10 + static_cast<u64>(c - '0');
        }
        if (!ok || value < 1 || value > kMaxElement) {
            throw ParseError("load_set: invalid entry '" + token + "'", line_number);
        }
        values.push_back(value);
    }
    if (values.empty()) throw std::runtime_error("load_set: file contains no elements");
    auto set = IntegerSet::from_values(std::move(values), &local.duplicates_collapsed);
    if (stats != nullptr) *stats = local;
    return set;
}

inline void save_set(const IntegerSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_set: cannot open " + path.string());
    for (u64 v : set.values()) out << v << '\n';
    if (!out) throw std::runtime_error("save_set: write failed for " + path.string());
}

}  // namespace gallab

#endif  // GALLAB_INTEGER_SET_HPP

#ifndef GALLAB_COMMON_HPP
#define GALLAB_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gallab {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

inline constexpr const char* kVersion = "0.1.0";

// Largest admissible set element. Keeps squares of pairwise differences
// inside exact 128-bit range: (2^63-1)^2 < 2^126.
inline constexpr u64 kMaxElement = (u64{1} << 63) - 1;

inline u128 checked_add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::overflow_error("128-bit accumulator overflow");
    }
    return r;
}

inline u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::overflow_error("128-bit product overflow");
    }
    return r;
}

inline u64 checked_add_u64(u64 a, u64 b) {
    u64 r;
    if (__builtin_add_overflow(a, b, &r)) {
        throw std::overflow_error("64-bit accumulator overflow");
    }
    return r;
}

inline std::string to_string_u128(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    return std::string(out.rbegin(), out.rend());
}

inline double to_double(u128 v) {
    return static_cast<double>(v);
}

// Binary GCD. gcd(0, n) = gcd(n, 0) = n.
inline u64 gcd_u64(u64 a, u64 b) {
    if (a == 0) return b;
    if (b == 0) return a;
    const int shift = __builtin_ctzll(a | b);
    a >>= __builtin_ctzll(a);
    for (;;) {
        b >>= __builtin_ctzll(b);
        if (a > b) {
            const u64 t = a;
            a = b;
            b = t;
        }
        b -= a;
        if (b == 0) break;
    }
    return a << shift;
}

}  // namespace gallab

#endif  // GALLAB_COMMON_HPP

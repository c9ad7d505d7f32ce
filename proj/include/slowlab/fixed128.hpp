#pragma once

#include <cstdint>

namespace slowlab {

// Circle coordinates are 128-bit fixed-point fractions of [0,1).
// All rotation arithmetic is exact modulo 2^128, so iterated and fused
// steps agree bit for bit.
using u128 = unsigned __int128;

struct CircleCoord {
    u128 frac = 0;
    friend bool operator==(const CircleCoord& a, const CircleCoord& b) { return a.frac == b.frac; }
    friend bool operator<(const CircleCoord& a, const CircleCoord& b) { return a.frac < b.frac; }
};

// Low 128 bits of a*b where b is a 64-bit factor. Wraparound is the
// mod-1 reduction on the circle.
inline u128 mul_u128_u64(u128 a, std::uint64_t b) {
    const u128 lo = (a & 0xffffffffffffffffULL) * b;
    const u128 hi = (a >> 64) * b;
    return lo + (hi << 64);
}

// k * theta mod 1 for signed k.
inline u128 mul_frac_int(u128 theta, std::int64_t k) {
    if (k >= 0) return mul_u128_u64(theta, static_cast<std::uint64_t>(k));
    return static_cast<u128>(0) - mul_u128_u64(theta, static_cast<std::uint64_t>(-k));
}

inline long double frac_to_ld(u128 x) {
    const long double two64 = 18446744073709551616.0L;
    const auto hi = static_cast<std::uint64_t>(x >> 64);
    const auto lo = static_cast<std::uint64_t>(x);
    return (static_cast<long double>(hi) + static_cast<long double>(lo) / two64) / two64;
}

inline u128 ld_to_frac(long double x) {
    x -= static_cast<std::int64_t>(x);
    if (x < 0) x += 1.0L;
    const long double two64 = 18446744073709551616.0L;
    const long double scaled = x * two64;
    const auto hi = static_cast<std::uint64_t>(scaled);
    const auto lo = static_cast<std::uint64_t>((scaled - hi) * two64);
    return (static_cast<u128>(hi) << 64) | lo;
}

// Fixed-point truncation of (sqrt(5)-1)/2, the default irrational angle.
// Found by binary search on t^2 + t*2^128 <= 2^256 over exact 256-bit
// products, so it is the floor of the true value at 128 bits.
u128 golden_conjugate_frac();

// splitmix64, used everywhere a counter-based deterministic stream is
// needed (symbol streams, samplers, instance generators in tests).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x5851f42d4c957f2dULL));
}

// Uniform 128-bit fraction from a counter-based stream.
inline u128 random_frac(std::uint64_t seed, std::uint64_t index) {
    const std::uint64_t s = mix_seed(seed, index);
    return (static_cast<u128>(splitmix64(s)) << 64) | splitmix64(s + 1);
}

// Uniform double in [0,1).
inline double random_unit(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(mix_seed(seed, index) >> 11) * 0x1.0p-53;
}

} // namespace slowlab

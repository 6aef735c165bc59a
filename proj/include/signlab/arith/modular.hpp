#pragma once

#include <cstdint>
#include <optional>

namespace signlab::arith {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((unsigned __int128)a * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    std::uint64_t result = 1 % m;
    base %= m;
    while (exp != 0) {
        if (exp & 1) result = mulmod(result, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return result;
}

/// Least nonnegative residue of v mod m (m > 0).
inline std::uint64_t mod_floor(__int128 v, std::uint64_t m) {
    __int128 r = v % (__int128)m;
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

/// Inverse of a modulo m, if gcd(a, m) = 1.
inline std::optional<std::uint64_t> inverse_mod(std::uint64_t a, std::uint64_t m) {
    if (m == 1) return 0;
    __int128 old_r = a % m, r = m, old_s = 1, s = 0;
    while (r != 0) {
        const __int128 q = old_r / r;
        __int128 t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1) return std::nullopt;
    return mod_floor(old_s, m);
}

/// Exponent of p in n (n != 0, p >= 2).
inline unsigned valuation(std::uint64_t n, std::uint64_t p) {
    unsigned v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

}  // namespace signlab::arith

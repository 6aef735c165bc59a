#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <gmpxx.h>

namespace signlab {

inline mpz_class to_mpz(std::uint64_t v) {
    mpz_class z;
    mpz_import(z.get_mpz_t(), 1, -1, sizeof v, 0, 0, &v);
    return z;
}

inline mpz_class to_mpz(__int128 v) {
    const bool neg = v < 0;
    const unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    mpz_class z = to_mpz(static_cast<std::uint64_t>(u >> 64));
    z <<= 64;
    z += to_mpz(static_cast<std::uint64_t>(u));
    return neg ? mpz_class(-z) : z;
}

inline mpz_class to_mpz(std::int64_t v) { return to_mpz(static_cast<__int128>(v)); }

/// Value as uint64 if 0 <= z < 2^64.
inline std::optional<std::uint64_t> to_u64(const mpz_class& z) {
    if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) return std::nullopt;
    std::uint64_t v = 0;
    mpz_export(&v, nullptr, -1, sizeof v, 0, 0, z.get_mpz_t());
    return v;
}

inline std::string to_string(const mpz_class& z) { return z.get_str(); }

/// "p/q", or "p" when the denominator is 1.
inline std::string to_string(const mpq_class& q) { return q.get_str(); }

}  // namespace signlab

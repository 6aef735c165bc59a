#pragma once

// Brute-force reference implementations. Deliberately naive and independent
// of the library code paths they check.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace oracle {

inline std::vector<std::uint64_t> divisors(std::uint64_t n) {
    std::vector<std::uint64_t> d;
    for (std::uint64_t i = 1; i * i <= n; ++i) {
        if (n % i == 0) {
            d.push_back(i);
            if (i != n / i) d.push_back(n / i);
        }
    }
    return d;
}

inline mpz_class sigma(std::uint64_t n, unsigned long s) {
    mpz_class total = 0;
    for (auto d : divisors(n)) {
        mpz_class t;
        mpz_ui_pow_ui(t.get_mpz_t(), d, s);
        total += t;
    }
    return total;
}

inline double sigma_real(std::uint64_t n, double s) {
    double total = 0;
    for (auto d : divisors(n)) total += std::pow(static_cast<double>(d), s);
    return total;
}

inline std::uint64_t phi(std::uint64_t n) {
    std::uint64_t c = 0;
    for (std::uint64_t m = 1; m <= n; ++m) c += std::gcd(m, n) == 1;
    return c;
}

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline std::vector<std::pair<std::uint64_t, unsigned>> trial_factor(std::uint64_t n) {
    std::vector<std::pair<std::uint64_t, unsigned>> f;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        unsigned e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e) f.emplace_back(d, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline unsigned omega_with_multiplicity(std::uint64_t n) {
    unsigned c = 0;
    for (auto [p, e] : trial_factor(n)) c += e;
    return c;
}

/// Number of x in [0, d) with a*x + b = 0 (mod d).
inline std::uint64_t count_roots(std::int64_t a, std::int64_t b, std::uint64_t d) {
    std::uint64_t c = 0;
    for (std::uint64_t x = 0; x < d; ++x) {
        __int128 v = (__int128)a * (__int128)x + b;
        v %= (__int128)d;
        if (v == 0) ++c;
    }
    return c;
}

/// Deterministic 64-bit generator (splitmix64) for reproducible property tests.
struct SplitMix {
    std::uint64_t state;
    std::uint64_t operator()() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t below(std::uint64_t n) { return (*this)() % n; }
};

}  // namespace oracle

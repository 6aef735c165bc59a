#pragma once

#include <cstdint>
#include <variant>

#include <gmpxx.h>

#include "signlab/arith/factorize.hpp"

namespace signlab::arith {

/// Integer exponent: results are exact (integers for s >= 0, rationals for s < 0).
struct ExactInteger {
    long s = 1;
};

/// Real exponent evaluated in double precision. Relative error stays below
/// 1e-12 for arguments with at most 64 divisors.
struct Real {
    double s = 1.0;
};

using SigmaMode = std::variant<ExactInteger, Real>;
using SigmaValue = std::variant<mpq_class, double>;

/// sum_{d | n} d^s, one geometric sum per prime power multiplied across primes.
SigmaValue sigma_s(const Factorization& f, const SigmaMode& mode);

mpz_class sigma_integer(const Factorization& f, unsigned long s);
mpq_class sigma_exact(const Factorization& f, long s);
double sigma_real(const Factorization& f, double s);

/// sigma_1 in 64-bit arithmetic. Throws RangeError on overflow.
std::uint64_t sigma1_u64(const Factorization& f);

std::uint64_t euler_phi(const Factorization& f);

/// Number of prime factors with multiplicity.
unsigned big_omega(const Factorization& f);

/// sigma_1(n) / n in lowest terms.
mpq_class abundancy(const Factorization& f);

/// Per prime-power factor of sigma_1: 1 + p + ... + p^e. Throws RangeError on overflow.
std::uint64_t sigma1_prime_power(std::uint64_t p, unsigned e);

}  // namespace signlab::arith

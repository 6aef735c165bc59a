#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "signlab/arith/primes.hpp"

namespace signlab::arith {

struct PrimePower {
    std::uint64_t prime = 0;
    unsigned exponent = 0;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// A positive integer with its prime-power decomposition, primes strictly
/// increasing. value() == 1 iff factors() is empty.
class Factorization {
public:
    Factorization() = default;

    /// Validates the invariants (ascending primes, each prime, exponents >= 1,
    /// product fits in 64 bits). Throws DomainError / RangeError.
    static Factorization from_factors(std::vector<PrimePower> factors);

    std::uint64_t value() const noexcept { return value_; }
    std::span<const PrimePower> factors() const noexcept { return factors_; }
    bool is_one() const noexcept { return factors_.empty(); }

    /// "2^2 * 3", "1" for the empty product.
    std::string str() const;

    friend bool operator==(const Factorization&, const Factorization&) = default;

private:
    friend Factorization factorize(std::uint64_t, const SpfTable*);
    friend class FactorizationBuilder;
    Factorization(std::uint64_t value, std::vector<PrimePower> factors)
        : value_(value), factors_(std::move(factors)) {}

    std::uint64_t value_ = 1;
    std::vector<PrimePower> factors_;
};

/// Assembles factorizations from prime powers that are already known to be
/// correct (bulk sieves); skips the validation done by from_factors.
class FactorizationBuilder {
public:
    static Factorization make(std::uint64_t value, std::vector<PrimePower> factors) {
        return Factorization(value, std::move(factors));
    }
};

/// Full factorization of n >= 1 (every 64-bit input is supported).
///
/// Uses the SPF table when n is inside it; otherwise trial division by the
/// primes below 10^4, then deterministic primality testing and Brent's
/// variant of Pollard rho with the fixed polynomial sequence x^2 + c,
/// c = 1, 2, 3, ..., so the work done is reproducible run to run.
/// Throws DomainError for n = 0.
Factorization factorize(std::uint64_t n, const SpfTable* hint = nullptr);

/// One nontrivial factor of a composite n (odd, not a prime power of a
/// small prime). Exposed for testing the rho stage directly.
std::uint64_t rho_split(std::uint64_t n);

}  // namespace signlab::arith

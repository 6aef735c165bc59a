#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "signlab/arith/progression_sieve.hpp"
#include "signlab/linear_form.hpp"

namespace signlab::density {

/// The real number coeff * zeta(2).
struct ZetaMultiple {
    mpq_class coeff;

    friend bool operator==(const ZetaMultiple&, const ZetaMultiple&) = default;
};

/// Closed interval [lo, hi] of doubles containing an exact value.
struct Enclosure {
    double lo = 0;
    double hi = 0;

    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Rationals bracketing zeta(2) = pi^2/6, 1e-16 apart.
const mpq_class& zeta2_lower();
const mpq_class& zeta2_upper();

/// Number of residues n mod p^alpha with a n + b = 0 (mod p^alpha), for a
/// linear form. With v = min(v_p(a), alpha) this is p^v when p^v | b, else 0.
/// Throws DomainError unless p is prime and alpha >= 1.
std::uint64_t root_count(const LinearForm& form, std::uint64_t p, unsigned alpha);

/// N(d) for any d >= 1, multiplied out over the prime powers of d. N(1) = 1.
std::uint64_t root_count_general(const LinearForm& form, std::uint64_t d);

/// S_p = 1 + sum_{alpha >= 1} N(p^alpha) / p^{2 alpha}, exactly.
///
/// N(p^alpha) is p^alpha while alpha <= min(v_p(a), v_p(b)) and then either
/// drops to 0 (v_p(b) < v_p(a)) or freezes at p^{v_p(a)}, so the series is a
/// finite sum plus a geometric tail:
///   v_p(b) <  v_p(a):  S_p = sum_{i=0}^{v_p(b)} p^{-i}
///   v_p(b) >= v_p(a):  S_p = sum_{i=0}^{v} p^{-i} + 1 / (p^v (p^2 - 1)),  v = v_p(a)
/// For p not dividing a this is (1 - p^{-2})^{-1}.
mpq_class local_factor(const LinearForm& form, std::uint64_t p);

/// beta = sum_d N(d)/d^2 = zeta(2) * prod_{p | a} (1 - p^{-2}) S_p. Every
/// prime not dividing a contributes exactly the zeta(2) Euler factor, so
/// the product is finite.
ZetaMultiple beta(const LinearForm& form);

/// Outward-rounded double enclosure of z.coeff * zeta(2).
Enclosure numeric(const ZetaMultiple& z);

/// Coefficient of x^2 in sum_{n <= x} sigma(form(n)): beta * a / 2.
ZetaMultiple leading_coefficient(const LinearForm& form);

/// Limit of sum sigma(f(n)) / sum sigma(g(n)); zeta(2) cancels exactly.
mpq_class predicted_ratio(const LinearForm& f, const LinearForm& g);

/// Exact sum_{n <= K} sigma(form(n)).
mpz_class partial_sum(const LinearForm& form, std::uint64_t K, const arith::BatchOptions& opts = {});

struct PartialSumRow {
    std::uint64_t K = 0;
    mpz_class sum_f;
    mpz_class sum_g;
    mpq_class ratio;      // sum_f / sum_g
    mpq_class limit;      // predicted_ratio(f, g)
    mpq_class deviation;  // |ratio - limit|
};

/// One row per checkpoint (ascending, each >= 1).
std::vector<PartialSumRow> compare_partial_sums(const LinearForm& f, const LinearForm& g,
                                                const std::vector<std::uint64_t>& checkpoints,
                                                const arith::BatchOptions& opts = {});

/// Decimal rendering with `digits` significant digits (printf %#.*g style,
/// trailing zeros kept), from a 256-bit correctly rounded approximation.
std::string decimal(const mpq_class& q, int digits = 10);

/// CSV with header K,sum_f,sum_g,ratio,limit,abs_deviation.
std::string partial_sums_csv(const std::vector<PartialSumRow>& rows);

}  // namespace signlab::density

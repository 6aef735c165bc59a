#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "signlab/linear_form.hpp"

namespace signlab::crt {

/// k forms L_i = a_i x + b_i to be kept almost-prime and k forms
/// H_j = c_j x + d_j to be given many small prime factors, with the
/// constants that drive the construction.
struct TheoremFourInstance {
    std::vector<LinearForm> L;
    std::vector<LinearForm> H;
    std::size_t k = 0;
    std::uint64_t A = 0;        // max a_i
    std::uint64_t B = 0;        // max c_j
    std::uint64_t C = 0;        // max |a_i d_j - b_i c_j|
    unsigned G_k = 0;           // almost-prime bound for k forms
    std::uint64_t p_start = 0;  // smallest prime > A + B + C + k
};

/// For each prime p <= p_max, the least n_p in [0, p) with p dividing none
/// of the forms at n_p. Stops at the first prime with no such residue.
struct Admissibility {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> residues;  // (p, n_p), ascending p
    std::optional<std::uint64_t> obstructed_prime;

    bool ok() const { return !obstructed_prime.has_value(); }
};

Admissibility admissibility_check(std::span<const LinearForm> forms, std::uint64_t p_max);

/// floor(log2(floor((3k^2 + 4k + 4) / 2))). Throws DomainError for k = 0.
unsigned heath_brown_bound(std::uint64_t k);

/// Validates |L| = |H| >= 1 and a_i d_j != b_i c_j for every pair (throws
/// HypothesisError naming the 1-based pair otherwise) and derives A, B, C,
/// G_k and p_start.
TheoremFourInstance build_instance(std::vector<LinearForm> L, std::vector<LinearForm> H);

/// The reciprocal-sum target A * 2^{G_k + 3} each prime string must beat
/// for the asymptotic argument to go through unaided.
mpz_class literal_threshold(const TheoremFourInstance& inst);

/// Exact sum of 1/p over the given primes.
mpq_class reciprocal_sum(std::span<const std::uint64_t> primes);

/// k contiguous runs of consecutive primes starting right after `start`,
/// each minimal with reciprocal sum > tau. Comparisons are decided in
/// floating point when safely clear of tau and in exact rationals otherwise;
/// each returned string is certified exactly. Throws DomainError for
/// tau <= 0 and BudgetExceeded once prime_budget primes have been consumed.
std::vector<std::vector<std::uint64_t>> prime_strings(std::uint64_t start, std::size_t k, const mpq_class& tau,
                                                      std::uint64_t prime_budget);

struct CrtConstruction {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> prefix;  // (p, n_p)
    std::vector<std::vector<std::uint64_t>> strings;
    mpz_class P;
    mpz_class n0;  // in [0, P)
    bool verified = false;
};

/// Solves n = n_p (mod p) over the prefix and c_s n + d_s = 0 (mod p) for
/// every p in string s, then checks the solution by substitution.
/// Throws ConstructionError when some string prime divides c_s,
/// DomainError for repeated primes or a prefix that misses a prime
/// <= p_start, HypothesisError for an obstructed prefix.
CrtConstruction build_crt_system(const TheoremFourInstance& inst, const std::vector<std::vector<std::uint64_t>>& strings,
                                 const Admissibility& prefix);

/// Re-checks every congruence of the system at n0, and that no L_i(n0)
/// is divisible by an involved prime.
bool verify_construction(const TheoremFourInstance& inst, const CrtConstruction& c);

struct OmegaRow {
    std::uint64_t m = 0;
    mpz_class n;
    unsigned omega_max = 0;
    bool qualified = false;
};

struct OmegaScan {
    std::vector<OmegaRow> rows;  // m = 1..M
    std::vector<std::uint64_t> hits;
    double reference_density = 0;  // M / log(M P)^k
};

/// For m = 1..M: n = m P + n0 and max_i Omega(L_i(n)) by full factorization.
/// Throws RangeError naming m when some L_i(n) leaves 64 bits.
OmegaScan omega_bounded_scan(const CrtConstruction& c, const TheoremFourInstance& inst, std::uint64_t M,
                             unsigned bound, unsigned threads = 0);

/// CSV with header m,n,omega_max,qualified.
std::string omega_scan_csv(const OmegaScan& scan);

struct SimultaneousEvidence {
    bool holds = false;
    std::vector<mpz_class> sigma_L;
    std::vector<mpz_class> sigma_H;
};

/// sigma(H_j(n)) > max_i sigma(L_i(n)) for every j, with all 2k values.
SimultaneousEvidence simultaneous_check(const TheoremFourInstance& inst, const mpz_class& n);

struct AbundancySearchOptions {
    std::uint64_t max_prime = 199;          // candidates are products of odd primes up to this
    unsigned max_exponent = 16;             // per prime
    std::uint64_t value_limit = 1ULL << 62; // candidates above are never generated
    std::optional<std::pair<std::uint64_t, std::uint64_t>> constraint;  // t = r (mod q)
};

struct AbundancySearchStats {
    std::uint64_t popped = 0;  // candidates taken from the frontier
    std::uint64_t pruned = 0;  // frontier entries dropped because no extension can reach the target
    std::uint64_t last_value = 0;
    bool exhausted = false;    // stopped by budget rather than by the consumer or an empty frontier
};

/// Odd t with sigma(t)/t > target in increasing order, drawn from a
/// priority queue over products of odd prime powers. A frontier entry is
/// dropped when even the most favourable extension under value_limit cannot
/// exceed the target. Every emitted t is verified exactly. on_hit returns
/// false to stop. Throws DomainError for target < 1.
AbundancySearchStats abundancy_target_search(const mpq_class& target, std::uint64_t budget,
                                             const AbundancySearchOptions& opts,
                                             const std::function<bool(std::uint64_t t)>& on_hit);

struct HuntOptions {
    mpq_class slack{1, 1000};  // search target is 3 + slack
    std::size_t max_witnesses = 1;  // stop after this many; 0 = run out the budget
    AbundancySearchOptions search{.max_prime = 199, .max_exponent = 16, .value_limit = 100000000000000ULL, .constraint = std::nullopt};
};

struct HuntLogEntry {
    std::uint64_t t = 0;   // 2m + 5, odd with abundancy above the search target
    std::uint64_t m = 0;
    bool first_inequality = false;   // sigma(2m+5) > sigma(6m+17)
    bool second_inequality = false;  // sigma(5m+4) > sigma(6m+7)
};

struct Theorem3Witness {
    std::uint64_t m = 0;
    // sigma at 2m+5, 6m+17, 5m+4, 6m+7
    mpz_class s_2m5, s_6m17, s_5m4, s_6m7;
};

struct HuntResult {
    std::vector<Theorem3Witness> witnesses;
    std::vector<HuntLogEntry> log;
    AbundancySearchStats stats;
};

/// Looks for m with sigma(2m+5) > sigma(6m+17) and sigma(5m+4) > sigma(6m+7)
/// among t = 2m + 5 of abundancy > 3 + slack. Each witness is re-checked by
/// plain divisor enumeration. An empty result within budget is a valid outcome.
HuntResult theorem3_hunt(std::uint64_t budget, const HuntOptions& opts = {});

/// sigma_1 by enumerating divisors up to sqrt(n); independent of factorization.
mpz_class sigma_by_enumeration(std::uint64_t n);

}  // namespace signlab::crt

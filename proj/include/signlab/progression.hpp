#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "signlab/arith/multiplicative.hpp"
#include "signlab/linear_form.hpp"

namespace signlab::scan {

/// D(n) = sigma_s(left(n)) - sigma_s(right(n)).
struct ProgressionPair {
    LinearForm left;
    LinearForm right;
    arith::SigmaMode mode = arith::ExactInteger{1};
};

struct SignScanReport {
    std::uint64_t n_max = 0;
    std::uint64_t count_pos = 0;
    std::uint64_t count_neg = 0;
    std::uint64_t count_zero = 0;
    // Alternations in the sign sequence with zeros deleted.
    std::uint64_t sign_changes = 0;
    std::optional<std::uint64_t> first_pos;
    std::optional<std::uint64_t> first_neg;
    std::optional<std::uint64_t> first_zero;
    // Real mode only: values with |D| inside the tie band, counted as zero.
    std::uint64_t near_ties = 0;
};

/// Accumulates D(n) signs in ascending n. Tallies over adjacent n-ranges
/// combine with append(), which is how parallel scans merge.
class SignTally {
public:
    void push(std::uint64_t n, int sign, bool tie = false);
    /// `later` must cover n-values above everything pushed here.
    void append(const SignTally& later);
    SignScanReport report(std::uint64_t n_max) const;

private:
    SignScanReport r_;
    int first_sign_ = 0;
    int last_sign_ = 0;
};

/// Relative band |D| < kTieBand * max(|left|, |right|) classified as zero in Real mode.
inline constexpr double kTieBand = 1e-9;

/// Scans n = 1..N. Exact in ExactInteger mode. Throws DomainError if either
/// form is nonpositive somewhere in range.
SignScanReport scan_signs(const ProgressionPair& pair, std::uint64_t N, unsigned threads = 0);

/// Least n <= N with phi(q*n + 1) <= phi(q*n), if any.
std::optional<std::uint64_t> phi_dominance_scan(std::uint64_t q, std::uint64_t N, unsigned threads = 0);

/// The `count` smallest primes p >= start with p = m (mod q), ascending.
/// Throws HypothesisError unless gcd(m, q) = 1.
std::vector<std::uint64_t> prime_in_ap(std::uint64_t q, std::int64_t m, std::size_t count, std::uint64_t start = 0);

/// True iff (a+2)^s < (1 + 2^{-(s+1)}) * a^s, decided rigorously: integer
/// powering for integral s, otherwise interval arithmetic with directed
/// rounding, refined until the sign is certain.
bool theorem1_condition(std::uint64_t a, const mpq_class& s);

struct MinOddA {
    std::uint64_t a = 0;
    double threshold = 0;      // 2 / ((1 + 2^{-(s+1)})^{1/s} - 1)
    bool exact = false;        // certificate by integer powering (integral s)
    double margin = 0;         // (rhs - lhs) / rhs at a, positive
};

/// Smallest odd a with (a+2)^s < (1 + 2^{-(s+1)}) a^s, for s > 1. The
/// closed-form threshold gives the candidate; the inequality is then
/// certified at a and refuted at a - 2. Throws DomainError for s <= 1.
MinOddA theorem1_min_a(const mpq_class& s);

struct WitnessValue {
    std::uint64_t n = 0;
    std::string left;   // sigma_s(a n + 2)
    std::string right;  // sigma_s((a+1) n + 1)
};

struct Theorem1Witnesses {
    std::vector<WitnessValue> negatives;  // n > 1, a n + 2 prime
    std::vector<WitnessValue> positives;  // n even, (a+1) n + 1 prime
    std::vector<std::uint64_t> failures;  // candidates whose inequality did not verify
};

/// Candidates n <= N on both branches of the sign argument, each checked by
/// evaluating sigma_s on both sides. Throws HypothesisError if a is even or
/// does not satisfy theorem1_condition.
Theorem1Witnesses theorem1_witnesses(const mpq_class& s, std::uint64_t a, std::uint64_t N);

}  // namespace signlab::scan

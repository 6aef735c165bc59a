#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace signlab::arith {

/// Deterministic primality test for every 64-bit input.
///
/// Trial division by the primes below 64 followed by strong-probable-prime
/// tests to the seven bases {2, 325, 9375, 28178, 450775, 9780504,
/// 1795265022}. That base set has no strong pseudoprime below 2^64
/// (J. Sinclair's search), so the answer is exact, not probabilistic.
bool is_prime(std::uint64_t n);

/// All primes p <= limit, ascending (plain Eratosthenes; meant for limits up
/// to a few times 10^7).
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

/// The 1229 primes below 10^4, shared by trial division.
std::span<const std::uint32_t> small_primes();

/// Smallest prime strictly greater than n. Throws RangeError past 2^64.
std::uint64_t next_prime(std::uint64_t n);

/// Walks the primes strictly greater than a starting point in ascending
/// order, sieving one window at a time.
class PrimeCursor {
public:
    explicit PrimeCursor(std::uint64_t after, std::uint64_t window = std::uint64_t{1} << 18);

    std::uint64_t next();

private:
    void refill();

    std::uint64_t window_;
    std::uint64_t lo_;  // first value of the next window
    std::vector<std::uint64_t> buffer_;
    std::size_t pos_ = 0;
    std::vector<std::uint32_t> base_;
    std::uint64_t base_limit_ = 0;
};

/// Smallest-prime-factor lookup for 2 <= n <= limit.
/// Immutable after construction; safe for concurrent readers.
class SpfTable {
public:
    std::uint64_t limit() const noexcept { return limit_; }
    bool contains(std::uint64_t n) const noexcept { return n >= 2 && n <= limit_; }
    /// Requires contains(n).
    std::uint32_t operator[](std::uint64_t n) const noexcept { return spf_[n]; }

private:
    friend SpfTable build_spf_table(std::uint64_t, std::uint64_t);
    std::uint64_t limit_ = 0;
    std::vector<std::uint32_t> spf_;
};

inline constexpr std::uint64_t kDefaultSegment = std::uint64_t{1} << 20;

/// Segmented construction; throws DomainError for limit < 2 and RangeError
/// when limit does not fit the 32-bit entry type.
SpfTable build_spf_table(std::uint64_t limit, std::uint64_t segment = kDefaultSegment);

}  // namespace signlab::arith

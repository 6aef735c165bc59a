#include "signlab/arith/primes.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "signlab/arith/modular.hpp"
#include "signlab/errors.hpp"

namespace signlab::arith {

namespace {

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (unsigned __int128)r * r > n) --r;
    while ((unsigned __int128)(r + 1) * (r + 1) <= n) ++r;
    return r;
}

bool strong_probable_prime(std::uint64_t n, std::uint64_t base, std::uint64_t d, unsigned s) {
    base %= n;
    if (base == 0) return true;
    std::uint64_t x = powmod(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned r = 1; r < s; ++r) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

}  // namespace

bool is_prime(std::uint64_t n) {
    static constexpr std::array<std::uint64_t, 18> tiny = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                                           29, 31, 37, 41, 43, 47, 53, 59, 61};
    if (n < 2) return false;
    for (auto p : tiny) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 67 * 67) return true;

    std::uint64_t d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    static constexpr std::array<std::uint64_t, 7> bases = {2, 325, 9375, 28178, 450775, 9780504, 1795265022};
    for (auto a : bases) {
        if (!strong_probable_prime(n, a, d, s)) return false;
    }
    return true;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> out;
    if (limit < 2) return out;
    std::vector<bool> composite(std::size_t(limit) + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

std::span<const std::uint32_t> small_primes() {
    static const std::vector<std::uint32_t> table = primes_up_to(9999);
    return table;
}

std::uint64_t next_prime(std::uint64_t n) {
    for (std::uint64_t c = n + 1;; ++c) {
        if (c == 0) throw RangeError("no prime above " + std::to_string(n) + " fits in 64 bits");
        if (is_prime(c)) return c;
    }
}

PrimeCursor::PrimeCursor(std::uint64_t after, std::uint64_t window) : window_(window), lo_(after + 1) {
    if (window_ < 64) window_ = 64;
}

std::uint64_t PrimeCursor::next() {
    while (pos_ == buffer_.size()) refill();
    return buffer_[pos_++];
}

void PrimeCursor::refill() {
    buffer_.clear();
    pos_ = 0;
    const std::uint64_t lo = lo_;
    if (lo > std::numeric_limits<std::uint64_t>::max() - window_) {
        throw RangeError("prime enumeration left the 64-bit range");
    }
    const std::uint64_t hi = lo + window_;  // exclusive
    lo_ = hi;

    const std::uint64_t root = isqrt(hi);
    if (root > base_limit_) {
        if (root > std::numeric_limits<std::uint32_t>::max() / 2) {
            throw RangeError("prime enumeration beyond supported sieve range");
        }
        base_limit_ = std::max<std::uint64_t>(root * 2, 1024);
        base_ = primes_up_to(static_cast<std::uint32_t>(base_limit_));
    }

    std::vector<char> composite(window_, 0);
    for (std::uint64_t p : base_) {
        if (p * p >= hi) break;
        std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
        for (std::uint64_t m = start; m < hi; m += p) composite[m - lo] = 1;
    }
    for (std::uint64_t v = std::max<std::uint64_t>(lo, 2); v < hi; ++v) {
        if (!composite[v - lo]) buffer_.push_back(v);
    }
}

SpfTable build_spf_table(std::uint64_t limit, std::uint64_t segment) {
    if (limit < 2) throw DomainError("smallest-prime-factor table needs limit >= 2, got " + std::to_string(limit));
    if (limit >= std::numeric_limits<std::uint32_t>::max()) {
        throw RangeError("smallest-prime-factor table limit must be below 2^32");
    }
    if (segment == 0) segment = kDefaultSegment;

    SpfTable table;
    table.limit_ = limit;
    table.spf_.assign(limit + 1, 0);

    const auto base = primes_up_to(static_cast<std::uint32_t>(isqrt(limit)));
    for (std::uint64_t lo = 2; lo <= limit; lo += segment) {
        const std::uint64_t hi = std::min(limit, lo + segment - 1);
        // Ascending primes: the first prime to touch an entry is its smallest factor.
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            for (std::uint64_t m = start; m <= hi; m += p) {
                if (table.spf_[m] == 0) table.spf_[m] = static_cast<std::uint32_t>(p);
            }
        }
        for (std::uint64_t n = lo; n <= hi; ++n) {
            if (table.spf_[n] == 0) table.spf_[n] = static_cast<std::uint32_t>(n);
        }
    }
    return table;
}

}  // namespace signlab::arith

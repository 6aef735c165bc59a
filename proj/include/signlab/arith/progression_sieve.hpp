#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <gmpxx.h>

#include "signlab/arith/factorize.hpp"
#include "signlab/arith/modular.hpp"
#include "signlab/arith/primes.hpp"
#include "signlab/errors.hpp"
#include "signlab/linear_form.hpp"

namespace signlab::arith {

struct BatchOptions {
    std::uint64_t segment = kDefaultSegment;  // n-values per segment
    unsigned threads = 0;                     // 0 = machine parallelism
};

/// Factors form(n) for every n in [n_lo, n_hi] at once by sieving along the
/// progression: prime p hits exactly the n with a*n + b = 0 (mod p).
/// Calls on(i, p, e) for each prime power p^e || form(n_lo + i), primes
/// ascending per element. Every value must be positive and below 2^64.
template <class OnPrimePower>
void sieve_progression(const LinearForm& form, std::int64_t n_lo, std::int64_t n_hi,
                       const std::vector<std::uint32_t>& base_primes, OnPrimePower&& on) {
    if (n_hi < n_lo) return;
    const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
    std::vector<std::uint64_t> rem(count);
    for (std::size_t i = 0; i < count; ++i) rem[i] = form.positive_at(n_lo + static_cast<std::int64_t>(i));

    const std::uint64_t max_value = std::max(rem.front(), rem.back());
    for (std::uint64_t p : base_primes) {
        if (p * p > max_value) break;
        const std::uint64_t a_mod = static_cast<std::uint64_t>(form.a) % p;
        std::size_t first = 0;
        std::size_t stride = p;
        if (a_mod == 0) {
            if (mod_floor(form.b, p) != 0) continue;
            stride = 1;  // p divides every term
        } else {
            // n = -b * a^{-1} (mod p)
            const std::uint64_t root = mulmod(mod_floor(-static_cast<__int128>(form.b), p), *inverse_mod(a_mod, p), p);
            first = static_cast<std::size_t>(mod_floor(static_cast<__int128>(root) - n_lo, p));
        }
        for (std::size_t i = first; i < count; i += stride) {
            unsigned e = 0;
            std::uint64_t r = rem[i];
            do {
                r /= p;
                ++e;
            } while (r % p == 0);
            rem[i] = r;
            on(i, p, e);
        }
    }
    for (std::size_t i = 0; i < count; ++i) {
        if (rem[i] > 1) on(i, rem[i], 1u);
    }
}

/// Base primes sufficient for sieve_progression over values up to max_value.
std::vector<std::uint32_t> sieve_base_for(std::uint64_t max_value);

/// Factorizations of form(n) for n in [n_lo, n_hi], ascending n.
std::vector<Factorization> factor_range(const LinearForm& form, std::int64_t n_lo, std::int64_t n_hi);

/// sigma_1(form(n)) for n = 1..K, ascending n. Throws DomainError when a
/// value in range is nonpositive.
std::vector<std::uint64_t> sigma_batch(const LinearForm& form, std::uint64_t K, const BatchOptions& opts = {});

/// Streams sigma_1(form(n)) for n in [n_lo, n_hi] segment by segment, in
/// ascending order regardless of thread count.
void for_each_sigma(const LinearForm& form, std::int64_t n_lo, std::int64_t n_hi, const BatchOptions& opts,
                    const std::function<void(std::int64_t n, std::uint64_t sigma)>& fn);

/// Exact sum of sigma_1(form(n)) for n = 1..K at every requested checkpoint
/// (ascending, each <= the last). Segments are summed in 128-bit arithmetic
/// and folded into arbitrary precision.
std::vector<mpz_class> sigma_prefix_sums(const LinearForm& form, const std::vector<std::uint64_t>& checkpoints,
                                         const BatchOptions& opts = {});

}  // namespace signlab::arith

#include "signlab/arith/factorize.hpp"

#include <algorithm>
#include <numeric>

#include "signlab/arith/modular.hpp"
#include "signlab/errors.hpp"

namespace signlab::arith {

namespace {

std::uint64_t absdiff(std::uint64_t x, std::uint64_t y) { return x > y ? x - y : y - x; }

void split_into(std::uint64_t n, std::vector<std::uint64_t>& primes) {
    if (n == 1) return;
    if (is_prime(n)) {
        primes.push_back(n);
        return;
    }
    const std::uint64_t d = rho_split(n);
    split_into(d, primes);
    split_into(n / d, primes);
}

}  // namespace

Factorization Factorization::from_factors(std::vector<PrimePower> factors) {
    unsigned __int128 value = 1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        const auto& f = factors[i];
        if (f.exponent == 0) throw DomainError("factor exponent must be >= 1");
        if (!is_prime(f.prime)) throw DomainError("factor " + std::to_string(f.prime) + " is not prime");
        if (i > 0 && factors[i - 1].prime >= f.prime) throw DomainError("factor primes must be strictly increasing");
        for (unsigned e = 0; e < f.exponent; ++e) {
            value *= f.prime;
            if (value > UINT64_MAX) throw RangeError("factorization value exceeds 64 bits");
        }
    }
    return Factorization(static_cast<std::uint64_t>(value), std::move(factors));
}

std::string Factorization::str() const {
    if (factors_.empty()) return "1";
    std::string s;
    for (const auto& f : factors_) {
        if (!s.empty()) s += " * ";
        s += std::to_string(f.prime);
        if (f.exponent > 1) s += "^" + std::to_string(f.exponent);
    }
    return s;
}

std::uint64_t rho_split(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    constexpr std::uint64_t batch = 128;
    for (std::uint64_t c = 1;; ++c) {
        auto step = [&](std::uint64_t v) {
            const std::uint64_t sq = mulmod(v, v, n);
            return sq + c >= n ? sq + c - n : sq + c;  // c < n here
        };
        std::uint64_t y = 2, x = 2, ys = 2, q = 1, g = 1;
        for (std::uint64_t r = 1; g == 1; r <<= 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = step(y);
            for (std::uint64_t k = 0; k < r && g == 1; k += batch) {
                ys = y;
                const std::uint64_t lim = std::min(batch, r - k);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = step(y);
                    q = mulmod(q, absdiff(x, y), n);
                }
                g = std::gcd(q, n);
            }
        }
        if (g == n) {
            do {
                ys = step(ys);
                g = std::gcd(absdiff(x, ys), n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

Factorization factorize(std::uint64_t n, const SpfTable* hint) {
    if (n == 0) throw DomainError("cannot factorize 0");
    std::vector<PrimePower> out;
    const std::uint64_t original = n;

    if (hint != nullptr && hint->contains(n)) {
        while (n > 1) {
            const std::uint64_t p = (*hint)[n];
            unsigned e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.push_back({p, e});
        }
        return Factorization(original, std::move(out));
    }

    for (std::uint64_t p : small_primes()) {
        if (p * p > n) break;
        if (n % p != 0) continue;
        unsigned e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.push_back({p, e});
    }
    if (n > 1) {
        std::vector<std::uint64_t> large;
        // Below 10^8 the cofactor has no factor under 10^4, so it is prime.
        if (n < std::uint64_t{100000000}) {
            large.push_back(n);
        } else {
            split_into(n, large);
        }
        std::sort(large.begin(), large.end());
        for (std::uint64_t p : large) {
            if (!out.empty() && out.back().prime == p) {
                ++out.back().exponent;
            } else {
                out.push_back({p, 1});
            }
        }
    }
    return Factorization(original, std::move(out));
}

}  // namespace signlab::arith

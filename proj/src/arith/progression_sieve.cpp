#include "signlab/arith/progression_sieve.hpp"

#include <algorithm>

#include "signlab/arith/multiplicative.hpp"
#include "signlab/bigint.hpp"
#include "signlab/parallel.hpp"

namespace signlab::arith {

namespace {

struct Piece {
    std::int64_t lo;
    std::int64_t hi;
};

std::vector<std::uint64_t> sigma_segment(const LinearForm& form, Piece piece, const std::vector<std::uint32_t>& base) {
    std::vector<std::uint64_t> sigma(static_cast<std::size_t>(piece.hi - piece.lo + 1), 1);
    sieve_progression(form, piece.lo, piece.hi, base, [&](std::size_t i, std::uint64_t p, unsigned e) {
        const unsigned __int128 v = (unsigned __int128)sigma[i] * sigma1_prime_power(p, e);
        if (v > UINT64_MAX) throw RangeError("sigma of " + form.str() + " exceeds 64 bits");
        sigma[i] = static_cast<std::uint64_t>(v);
    });
    return sigma;
}

std::vector<Piece> split(std::int64_t lo, std::int64_t hi, std::uint64_t segment) {
    std::vector<Piece> pieces;
    if (segment == 0) segment = kDefaultSegment;
    for (std::int64_t s = lo; s <= hi;) {
        const std::int64_t e = static_cast<std::int64_t>(std::min<__int128>(hi, (__int128)s + segment - 1));
        pieces.push_back({s, e});
        s = e + 1;
    }
    return pieces;
}

std::uint64_t isqrt64(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && (unsigned __int128)r * r > n) --r;
    while ((unsigned __int128)(r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

std::vector<std::uint32_t> sieve_base_for(std::uint64_t max_value) {
    const std::uint64_t root = isqrt64(max_value);
    if (root > (std::uint64_t{1} << 31)) throw RangeError("progression values too large for bulk sieving");
    return primes_up_to(static_cast<std::uint32_t>(root));
}

std::vector<Factorization> factor_range(const LinearForm& form, std::int64_t n_lo, std::int64_t n_hi) {
    std::vector<Factorization> out;
    if (n_hi < n_lo) return out;
    form.positive_at(n_lo);
    const auto base = sieve_base_for(form.positive_at(n_hi));
    std::vector<std::vector<PrimePower>> parts(static_cast<std::size_t>(n_hi - n_lo + 1));
    sieve_progression(form, n_lo, n_hi, base,
                      [&](std::size_t i, std::uint64_t p, unsigned e) { parts[i].push_back({p, e}); });
    out.reserve(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto value = form.positive_at(n_lo + static_cast<std::int64_t>(i));
        out.push_back(FactorizationBuilder::make(value, std::move(parts[i])));
    }
    return out;
}

void for_each_sigma(const LinearForm& form, std::int64_t n_lo, std::int64_t n_hi, const BatchOptions& opts,
                    const std::function<void(std::int64_t, std::uint64_t)>& fn) {
    if (n_hi < n_lo) return;
    form.positive_at(n_lo);
    const auto base = sieve_base_for(form.positive_at(n_hi));
    const auto pieces = split(n_lo, n_hi, opts.segment);
    const std::size_t wave = resolve_threads(opts.threads);

    for (std::size_t w = 0; w < pieces.size(); w += wave) {
        const std::size_t n = std::min(wave, pieces.size() - w);
        std::vector<std::vector<std::uint64_t>> out(n);
        parallel_for(n, opts.threads, [&](std::size_t i) { out[i] = sigma_segment(form, pieces[w + i], base); });
        for (std::size_t i = 0; i < n; ++i) {
            std::int64_t v = pieces[w + i].lo;
            for (std::uint64_t s : out[i]) fn(v++, s);
        }
    }
}

std::vector<std::uint64_t> sigma_batch(const LinearForm& form, std::uint64_t K, const BatchOptions& opts) {
    std::vector<std::uint64_t> out;
    if (K == 0) return out;
    out.reserve(K);
    for_each_sigma(form, 1, static_cast<std::int64_t>(K), opts, [&](std::int64_t, std::uint64_t s) { out.push_back(s); });
    return out;
}

std::vector<mpz_class> sigma_prefix_sums(const LinearForm& form, const std::vector<std::uint64_t>& checkpoints,
                                         const BatchOptions& opts) {
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
        throw DomainError("checkpoints must be ascending");
    }
    std::vector<mpz_class> sums;
    if (checkpoints.empty()) return sums;
    const auto K = static_cast<std::int64_t>(checkpoints.back());
    if (K == 0) return std::vector<mpz_class>(checkpoints.size(), 0);

    form.positive_at(1);
    const auto base = sieve_base_for(form.positive_at(K));

    // Pieces never straddle a checkpoint, so each checkpoint is a prefix of pieces.
    std::vector<Piece> pieces;
    std::int64_t lo = 1;
    for (std::uint64_t c : checkpoints) {
        const auto hi = static_cast<std::int64_t>(c);
        if (hi >= lo) {
            auto part = split(lo, hi, opts.segment);
            pieces.insert(pieces.end(), part.begin(), part.end());
            lo = hi + 1;
        }
    }

    std::vector<unsigned __int128> piece_sum(pieces.size(), 0);
    parallel_for(pieces.size(), opts.threads, [&](std::size_t i) {
        unsigned __int128 acc = 0;
        for (std::uint64_t s : sigma_segment(form, pieces[i], base)) acc += s;
        piece_sum[i] = acc;
    });

    mpz_class running = 0;
    std::size_t next = 0;
    for (std::uint64_t c : checkpoints) {
        while (next < pieces.size() && pieces[next].hi <= static_cast<std::int64_t>(c)) {
            running += to_mpz(static_cast<__int128>(piece_sum[next]));
            ++next;
        }
        sums.push_back(running);
    }
    return sums;
}

}  // namespace signlab::arith

#include "signlab/progression.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "signlab/arith/factorize.hpp"
#include "signlab/arith/primes.hpp"
#include "signlab/arith/progression_sieve.hpp"
#include "signlab/bigint.hpp"
#include "signlab/errors.hpp"
#include "signlab/parallel.hpp"

namespace signlab::scan {

namespace {

constexpr std::int64_t kChunk = 1 << 16;

int sign_of(const mpq_class& d) { return sgn(d); }

int compare_real(double l, double r, bool& tie) {
    const double d = l - r;
    tie = std::abs(d) < kTieBand * std::max(std::abs(l), std::abs(r));
    if (tie) return 0;
    return d > 0 ? 1 : -1;
}

/// Sign of sigma_s(x) - sigma_s(y); sets tie when a Real-mode band hit occurs.
int compare_sigma(const arith::Factorization& x, const arith::Factorization& y, const arith::SigmaMode& mode,
                  bool& tie) {
    tie = false;
    if (const auto* ex = std::get_if<arith::ExactInteger>(&mode)) {
        if (ex->s == 1) {
            try {
                const auto l = arith::sigma1_u64(x), r = arith::sigma1_u64(y);
                return (l > r) - (l < r);
            } catch (const RangeError&) {
                // fall through to arbitrary precision
            }
        }
        return sign_of(arith::sigma_exact(x, ex->s) - arith::sigma_exact(y, ex->s));
    }
    const double s = std::get<arith::Real>(mode).s;
    return compare_real(arith::sigma_real(x, s), arith::sigma_real(y, s), tie);
}

SignTally scan_chunk(const ProgressionPair& pair, std::int64_t lo, std::int64_t hi) {
    SignTally t;
    const auto lf = arith::factor_range(pair.left, lo, hi);
    const auto rf = arith::factor_range(pair.right, lo, hi);
    for (std::int64_t n = lo; n <= hi; ++n) {
        const auto i = static_cast<std::size_t>(n - lo);
        bool tie = false;
        const int sg = compare_sigma(lf[i], rf[i], pair.mode, tie);
        t.push(static_cast<std::uint64_t>(n), sg, tie);
    }
    return t;
}

std::optional<std::uint64_t> min_opt(std::optional<std::uint64_t> a, std::optional<std::uint64_t> b) {
    if (!a) return b;
    if (!b) return a;
    return std::min(*a, *b);
}

std::string real_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// RAII over mpfr_t.
struct Mp {
    mpfr_t v;
    explicit Mp(mpfr_prec_t prec) { mpfr_init2(v, prec); }
    ~Mp() { mpfr_clear(v); }
    Mp(const Mp&) = delete;
    Mp& operator=(const Mp&) = delete;
};

struct Decision {
    bool holds = false;
    bool exact = false;
    double margin = 0;  // (rhs - lhs) / rhs
};

Decision decide_exact(std::uint64_t a, unsigned long s) {
    // (a+2)^s * 2^{s+1} < (2^{s+1} + 1) * a^s
    mpz_class lhs, rhs, two_pow;
    mpz_ui_pow_ui(lhs.get_mpz_t(), a + 2, s);
    mpz_ui_pow_ui(rhs.get_mpz_t(), a, s);
    mpz_ui_pow_ui(two_pow.get_mpz_t(), 2, s + 1);
    lhs *= two_pow;
    rhs *= two_pow + 1;
    mpq_class margin(rhs - lhs, rhs);
    margin.canonicalize();
    return {lhs < rhs, true, margin.get_d()};
}

// Returns +1 (holds), -1 (fails) or 0 (undecided at this precision).
int decide_interval(std::uint64_t a, const mpq_class& s, mpfr_prec_t prec, double& margin) {
    Mp s_lo(prec), s_hi(prec), tmp(prec), lhs_lo(prec), lhs_hi(prec), rhs_lo(prec), rhs_hi(prec), f(prec);
    mpfr_set_q(s_lo.v, s.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(s_hi.v, s.get_mpq_t(), MPFR_RNDU);

    // (a+2)^s is increasing in s since a+2 > 1
    mpfr_set_ui(tmp.v, a + 2, MPFR_RNDN);  // exact for a < 2^53
    mpfr_pow(lhs_lo.v, tmp.v, s_lo.v, MPFR_RNDD);
    mpfr_pow(lhs_hi.v, tmp.v, s_hi.v, MPFR_RNDU);

    // lower bound of (1 + 2^{-(s+1)}) * a^s
    mpfr_add_ui(tmp.v, s_hi.v, 1, MPFR_RNDU);
    mpfr_neg(tmp.v, tmp.v, MPFR_RNDN);
    mpfr_ui_pow(f.v, 2, tmp.v, MPFR_RNDD);
    mpfr_add_ui(f.v, f.v, 1, MPFR_RNDD);
    mpfr_set_ui(tmp.v, a, MPFR_RNDN);
    mpfr_pow(rhs_lo.v, tmp.v, s_lo.v, MPFR_RNDD);
    mpfr_mul(rhs_lo.v, rhs_lo.v, f.v, MPFR_RNDD);

    // upper bound
    mpfr_add_ui(tmp.v, s_lo.v, 1, MPFR_RNDD);
    mpfr_neg(tmp.v, tmp.v, MPFR_RNDN);
    mpfr_ui_pow(f.v, 2, tmp.v, MPFR_RNDU);
    mpfr_add_ui(f.v, f.v, 1, MPFR_RNDU);
    mpfr_set_ui(tmp.v, a, MPFR_RNDN);
    mpfr_pow(rhs_hi.v, tmp.v, s_hi.v, MPFR_RNDU);
    mpfr_mul(rhs_hi.v, rhs_hi.v, f.v, MPFR_RNDU);

    mpfr_sub(tmp.v, rhs_lo.v, lhs_hi.v, MPFR_RNDN);
    mpfr_div(tmp.v, tmp.v, rhs_hi.v, MPFR_RNDN);
    margin = mpfr_get_d(tmp.v, MPFR_RNDN);

    if (mpfr_less_p(lhs_hi.v, rhs_lo.v)) return 1;
    if (mpfr_greater_p(lhs_lo.v, rhs_hi.v)) return -1;
    return 0;
}

Decision decide(std::uint64_t a, const mpq_class& s) {
    if (sgn(s) <= 0) throw DomainError("exponent s must be positive");
    if (a == 0) throw DomainError("a must be positive");
    if (s.get_den() == 1 && s.get_num().fits_ulong_p()) return decide_exact(a, s.get_num().get_ui());
    if (a > (std::uint64_t{1} << 52)) throw RangeError("a too large for interval certification");
    for (mpfr_prec_t prec = 128; prec <= 16384; prec *= 2) {
        double margin = 0;
        const int r = decide_interval(a, s, prec, margin);
        if (r != 0) return {r > 0, false, margin};
    }
    throw RangeError("could not certify the a-threshold inequality at a=" + std::to_string(a));
}

}  // namespace

void SignTally::push(std::uint64_t n, int sign, bool tie) {
    if (tie) ++r_.near_ties;
    if (sign > 0) {
        ++r_.count_pos;
        if (!r_.first_pos) r_.first_pos = n;
    } else if (sign < 0) {
        ++r_.count_neg;
        if (!r_.first_neg) r_.first_neg = n;
    } else {
        ++r_.count_zero;
        if (!r_.first_zero) r_.first_zero = n;
        return;
    }
    sign = sign > 0 ? 1 : -1;
    if (last_sign_ != 0 && last_sign_ != sign) ++r_.sign_changes;
    if (first_sign_ == 0) first_sign_ = sign;
    last_sign_ = sign;
}

void SignTally::append(const SignTally& later) {
    r_.count_pos += later.r_.count_pos;
    r_.count_neg += later.r_.count_neg;
    r_.count_zero += later.r_.count_zero;
    r_.near_ties += later.r_.near_ties;
    r_.sign_changes += later.r_.sign_changes;
    if (last_sign_ != 0 && later.first_sign_ != 0 && later.first_sign_ != last_sign_) ++r_.sign_changes;
    if (first_sign_ == 0) first_sign_ = later.first_sign_;
    if (later.last_sign_ != 0) last_sign_ = later.last_sign_;
    r_.first_pos = min_opt(r_.first_pos, later.r_.first_pos);
    r_.first_neg = min_opt(r_.first_neg, later.r_.first_neg);
    r_.first_zero = min_opt(r_.first_zero, later.r_.first_zero);
}

SignScanReport SignTally::report(std::uint64_t n_max) const {
    SignScanReport r = r_;
    r.n_max = n_max;
    return r;
}

SignScanReport scan_signs(const ProgressionPair& pair, std::uint64_t N, unsigned threads) {
    if (N == 0) return SignTally{}.report(0);
    pair.left.positive_at(1);
    pair.right.positive_at(1);
    const auto n_max = static_cast<std::int64_t>(N);
    const std::size_t chunks = static_cast<std::size_t>((n_max + kChunk - 1) / kChunk);
    std::vector<SignTally> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t i) {
        const std::int64_t lo = 1 + static_cast<std::int64_t>(i) * kChunk;
        parts[i] = scan_chunk(pair, lo, std::min(n_max, lo + kChunk - 1));
    });
    SignTally total;
    for (const auto& p : parts) total.append(p);
    return total.report(N);
}

std::optional<std::uint64_t> phi_dominance_scan(std::uint64_t q, std::uint64_t N, unsigned threads) {
    if (q == 0) throw DomainError("modulus q must be >= 1");
    if (N == 0) return std::nullopt;
    const LinearForm lower(static_cast<std::int64_t>(q), 0), upper(static_cast<std::int64_t>(q), 1);
    const auto n_max = static_cast<std::int64_t>(N);
    const std::size_t chunks = static_cast<std::size_t>((n_max + kChunk - 1) / kChunk);
    const std::size_t wave = resolve_threads(threads);

    for (std::size_t w = 0; w < chunks; w += wave) {
        const std::size_t count = std::min(wave, chunks - w);
        std::vector<std::optional<std::uint64_t>> found(count);
        parallel_for(count, threads, [&](std::size_t i) {
            const std::int64_t lo = 1 + static_cast<std::int64_t>(w + i) * kChunk;
            const std::int64_t hi = std::min(n_max, lo + kChunk - 1);
            const auto lf = arith::factor_range(lower, lo, hi);
            const auto uf = arith::factor_range(upper, lo, hi);
            for (std::size_t j = 0; j < lf.size(); ++j) {
                if (arith::euler_phi(uf[j]) <= arith::euler_phi(lf[j])) {
                    found[i] = static_cast<std::uint64_t>(lo) + j;
                    return;
                }
            }
        });
        for (const auto& f : found) {
            if (f) return f;
        }
    }
    return std::nullopt;
}

std::vector<std::uint64_t> prime_in_ap(std::uint64_t q, std::int64_t m, std::size_t count, std::uint64_t start) {
    if (q == 0) throw DomainError("modulus q must be >= 1");
    const std::uint64_t r = arith::mod_floor(m, q);
    const std::uint64_t g = std::gcd(r, q);
    if (g != 1) {
        throw HypothesisError("primes in progression require gcd(m, q) = 1 (Dirichlet); gcd(" + std::to_string(m) +
                              ", " + std::to_string(q) + ") = " + std::to_string(g));
    }
    std::vector<std::uint64_t> out;
    out.reserve(count);
    // first candidate >= start in the class r mod q
    unsigned __int128 c = start - start % q + r;
    if (c < start) c += q;
    for (; out.size() < count; c += q) {
        if (c > UINT64_MAX) throw RangeError("prime search in progression left the 64-bit range");
        if (arith::is_prime(static_cast<std::uint64_t>(c))) out.push_back(static_cast<std::uint64_t>(c));
    }
    return out;
}

bool theorem1_condition(std::uint64_t a, const mpq_class& s) { return decide(a, s).holds; }

MinOddA theorem1_min_a(const mpq_class& s) {
    if (s <= 1) throw DomainError("a-threshold needs s > 1, got s=" + s.get_str());
    const double sd = s.get_d();
    const double root = std::pow(1.0 + std::pow(2.0, -(sd + 1.0)), 1.0 / sd) - 1.0;
    const double threshold = 2.0 / root;
    if (!(threshold < 4.0e15)) throw RangeError("a-threshold too large for s=" + s.get_str());

    std::uint64_t a = static_cast<std::uint64_t>(std::floor(threshold)) + 1;
    if (a % 2 == 0) ++a;
    // The float threshold only seeds the search; the certified predicate decides.
    while (!decide(a, s).holds) a += 2;
    while (a >= 3 && decide(a - 2, s).holds) a -= 2;

    const Decision d = decide(a, s);
    return {a, threshold, d.exact, d.margin};
}

Theorem1Witnesses theorem1_witnesses(const mpq_class& s, std::uint64_t a, std::uint64_t N) {
    if (s <= 1) throw DomainError("witness search needs s > 1, got s=" + s.get_str());
    if (a % 2 == 0) throw HypothesisError("a must be odd, got a=" + std::to_string(a));
    if (!theorem1_condition(a, s)) {
        throw HypothesisError("a=" + std::to_string(a) + " fails (a+2)^s < (1 + 2^-(s+1)) a^s for s=" + s.get_str());
    }
    const bool integral = s.get_den() == 1;
    const unsigned long s_int = integral ? s.get_num().get_ui() : 0;
    const double s_real = s.get_d();

    Theorem1Witnesses out;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const unsigned __int128 left_v = (unsigned __int128)a * n + 2;
        const unsigned __int128 right_v = (unsigned __int128)(a + 1) * n + 1;
        if (right_v > UINT64_MAX) throw RangeError("witness search left the 64-bit range at n=" + std::to_string(n));
        const auto left = static_cast<std::uint64_t>(left_v), right = static_cast<std::uint64_t>(right_v);

        // at n = 1 both sides equal a + 2, so that branch starts at n = 2
        const bool neg_branch = n > 1 && arith::is_prime(left);
        const bool pos_branch = n % 2 == 0 && arith::is_prime(right);
        if (!neg_branch && !pos_branch) continue;

        const auto lf = arith::factorize(left), rf = arith::factorize(right);
        WitnessValue w{n, {}, {}};
        int sg = 0;
        if (integral) {
            const mpz_class l = arith::sigma_integer(lf, s_int), r = arith::sigma_integer(rf, s_int);
            sg = cmp(l, r);
            sg = (sg > 0) - (sg < 0);
            w.left = l.get_str();
            w.right = r.get_str();
        } else {
            const double l = arith::sigma_real(lf, s_real), r = arith::sigma_real(rf, s_real);
            bool tie = false;
            sg = compare_real(l, r, tie);
            w.left = real_str(l);
            w.right = real_str(r);
        }
        if (neg_branch) {
            if (sg < 0) out.negatives.push_back(w);
            else out.failures.push_back(n);
        }
        if (pos_branch) {
            if (sg > 0) out.positives.push_back(w);
            else out.failures.push_back(n);
        }
    }
    return out;
}

}  // namespace signlab::scan

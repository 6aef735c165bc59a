#include "signlab/density.hpp"

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>

#include "signlab/arith/factorize.hpp"
#include "signlab/arith/modular.hpp"
#include "signlab/arith/primes.hpp"
#include "signlab/bigint.hpp"
#include "signlab/errors.hpp"

namespace signlab::density {

namespace {

std::uint64_t abs_u64(std::int64_t v) {
    return v < 0 ? static_cast<std::uint64_t>(-(v + 1)) + 1 : static_cast<std::uint64_t>(v);
}

constexpr unsigned kInfinite = std::numeric_limits<unsigned>::max();

unsigned valuation_or_inf(std::int64_t v, std::uint64_t p) {
    return v == 0 ? kInfinite : arith::valuation(abs_u64(v), p);
}

mpq_class inverse_power(std::uint64_t p, unsigned k) {
    mpz_class d;
    mpz_pow_ui(d.get_mpz_t(), to_mpz(p).get_mpz_t(), k);
    return mpq_class(1, d);
}

// Round a rational to a double toward -inf or +inf.
double to_double_directed(const mpq_class& q, bool up) {
    double d = q.get_d();  // truncates toward zero
    const mpq_class back(d);
    if (up && back < q) d = std::nextafter(d, std::numeric_limits<double>::infinity());
    if (!up && back > q) d = std::nextafter(d, -std::numeric_limits<double>::infinity());
    return d;
}

}  // namespace

const mpq_class& zeta2_lower() {
    static const mpq_class v("16449340668482264/10000000000000000");
    return v;
}

const mpq_class& zeta2_upper() {
    static const mpq_class v("16449340668482265/10000000000000000");
    return v;
}

std::uint64_t root_count(const LinearForm& form, std::uint64_t p, unsigned alpha) {
    if (!arith::is_prime(p)) throw DomainError("root count needs a prime modulus base, got " + std::to_string(p));
    if (alpha == 0) throw DomainError("root count needs alpha >= 1");
    const unsigned v = std::min(arith::valuation(static_cast<std::uint64_t>(form.a), p), alpha);
    std::uint64_t pv = 1;
    for (unsigned i = 0; i < v; ++i) pv *= p;  // p^v divides a, so no overflow
    return abs_u64(form.b) % pv == 0 ? pv : 0;
}

std::uint64_t root_count_general(const LinearForm& form, std::uint64_t d) {
    if (d == 0) throw DomainError("root count needs d >= 1");
    std::uint64_t total = 1;
    const auto fd = arith::factorize(d);
    for (const auto& [p, e] : fd.factors()) {
        total *= root_count(form, p, e);
        if (total == 0) break;
    }
    return total;
}

mpq_class local_factor(const LinearForm& form, std::uint64_t p) {
    if (!arith::is_prime(p)) throw DomainError("local factor needs a prime, got " + std::to_string(p));
    const unsigned v = arith::valuation(static_cast<std::uint64_t>(form.a), p);
    const unsigned w = valuation_or_inf(form.b, p);

    mpq_class s = 0;
    const unsigned head = std::min(v, w);
    for (unsigned i = 0; i <= head; ++i) s += inverse_power(p, i);
    if (w < v) return s;

    // tail: sum_{alpha > v} p^v / p^{2 alpha} = 1 / (p^v (p^2 - 1))
    mpz_class den;
    mpz_pow_ui(den.get_mpz_t(), to_mpz(p).get_mpz_t(), v);
    den *= to_mpz(p) * to_mpz(p) - 1;
    s += mpq_class(1, den);
    s.canonicalize();
    return s;
}

ZetaMultiple beta(const LinearForm& form) {
    mpq_class c = 1;
    const auto fa = arith::factorize(static_cast<std::uint64_t>(form.a));
    for (const auto& pe : fa.factors()) {
        const mpq_class euler = 1 - inverse_power(pe.prime, 2);
        c *= euler * local_factor(form, pe.prime);
    }
    c.canonicalize();
    return {c};
}

Enclosure numeric(const ZetaMultiple& z) {
    const int s = sgn(z.coeff);
    if (s == 0) return {0.0, 0.0};
    mpq_class lo = z.coeff * (s > 0 ? zeta2_lower() : zeta2_upper());
    mpq_class hi = z.coeff * (s > 0 ? zeta2_upper() : zeta2_lower());
    return {to_double_directed(lo, false), to_double_directed(hi, true)};
}

ZetaMultiple leading_coefficient(const LinearForm& form) {
    mpq_class c = beta(form).coeff * to_mpz(form.a) / 2;
    c.canonicalize();
    return {c};
}

mpq_class predicted_ratio(const LinearForm& f, const LinearForm& g) {
    const mpq_class den = leading_coefficient(g).coeff;
    if (sgn(den) == 0) throw DomainError("leading coefficient of " + g.str() + " is zero");
    mpq_class r = leading_coefficient(f).coeff / den;
    r.canonicalize();
    return r;
}

mpz_class partial_sum(const LinearForm& form, std::uint64_t K, const arith::BatchOptions& opts) {
    if (K == 0) return 0;
    return arith::sigma_prefix_sums(form, {K}, opts).front();
}

std::vector<PartialSumRow> compare_partial_sums(const LinearForm& f, const LinearForm& g,
                                                const std::vector<std::uint64_t>& checkpoints,
                                                const arith::BatchOptions& opts) {
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] == 0) throw DomainError("checkpoints must be >= 1");
        if (i > 0 && checkpoints[i] < checkpoints[i - 1]) throw DomainError("checkpoints must be ascending");
    }
    const mpq_class limit = predicted_ratio(f, g);
    const auto sf = arith::sigma_prefix_sums(f, checkpoints, opts);
    const auto sg = arith::sigma_prefix_sums(g, checkpoints, opts);

    std::vector<PartialSumRow> rows;
    rows.reserve(checkpoints.size());
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        PartialSumRow row;
        row.K = checkpoints[i];
        row.sum_f = sf[i];
        row.sum_g = sg[i];
        row.ratio = mpq_class(sf[i], sg[i]);
        row.ratio.canonicalize();
        row.limit = limit;
        row.deviation = abs(row.ratio - limit);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string decimal(const mpq_class& q, int digits) {
    mpfr_t x;
    mpfr_init2(x, 256);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    char* raw = nullptr;
    mpfr_asprintf(&raw, "%#.*Rg", digits, x);
    std::string out = raw != nullptr ? raw : "";
    mpfr_free_str(raw);
    mpfr_clear(x);
    return out;
}

std::string partial_sums_csv(const std::vector<PartialSumRow>& rows) {
    std::string out = "K,sum_f,sum_g,ratio,limit,abs_deviation\n";
    for (const auto& r : rows) {
        out += std::to_string(r.K) + "," + r.sum_f.get_str() + "," + r.sum_g.get_str() + "," + decimal(r.ratio) +
               "," + decimal(r.limit) + "," + decimal(r.deviation) + "\n";
    }
    return out;
}

}  // namespace signlab::density

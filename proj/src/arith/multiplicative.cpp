#include "signlab/arith/multiplicative.hpp"

#include <cmath>

#include "signlab/bigint.hpp"
#include "signlab/errors.hpp"

namespace signlab::arith {

mpz_class sigma_integer(const Factorization& f, unsigned long s) {
    mpz_class total = 1;
    for (const auto& [p, e] : f.factors()) {
        if (s == 0) {
            total *= e + 1;
            continue;
        }
        // (p^{s(e+1)} - 1) / (p^s - 1)
        mpz_class ps;
        mpz_pow_ui(ps.get_mpz_t(), to_mpz(p).get_mpz_t(), s);
        mpz_class top;
        mpz_pow_ui(top.get_mpz_t(), ps.get_mpz_t(), e + 1);
        top -= 1;
        mpz_divexact(top.get_mpz_t(), top.get_mpz_t(), mpz_class(ps - 1).get_mpz_t());
        total *= top;
    }
    return total;
}

mpq_class sigma_exact(const Factorization& f, long s) {
    if (s >= 0) return mpq_class(sigma_integer(f, static_cast<unsigned long>(s)));
    // sigma_{-t}(n) = sigma_t(n) / n^t
    const unsigned long t = static_cast<unsigned long>(-(s + 1)) + 1;
    mpz_class den;
    mpz_pow_ui(den.get_mpz_t(), to_mpz(f.value()).get_mpz_t(), t);
    mpq_class q(sigma_integer(f, t), den);
    q.canonicalize();
    return q;
}

double sigma_real(const Factorization& f, double s) {
    double total = 1.0;
    for (const auto& [p, e] : f.factors()) {
        const double x = std::pow(static_cast<double>(p), s);
        double local = 1.0;  // Horner: 1 + x(1 + x(...))
        for (unsigned i = 0; i < e; ++i) local = 1.0 + x * local;
        total *= local;
    }
    return total;
}

SigmaValue sigma_s(const Factorization& f, const SigmaMode& mode) {
    if (const auto* ex = std::get_if<ExactInteger>(&mode)) return sigma_exact(f, ex->s);
    return sigma_real(f, std::get<Real>(mode).s);
}

std::uint64_t sigma1_prime_power(std::uint64_t p, unsigned e) {
    unsigned __int128 term = 1, sum = 1;
    for (unsigned i = 0; i < e; ++i) {
        term *= p;
        sum += term;
        if (sum > UINT64_MAX) throw RangeError("sigma exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(sum);
}

std::uint64_t sigma1_u64(const Factorization& f) {
    unsigned __int128 total = 1;
    for (const auto& [p, e] : f.factors()) {
        total *= sigma1_prime_power(p, e);
        if (total > UINT64_MAX) throw RangeError("sigma(" + std::to_string(f.value()) + ") exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(total);
}

std::uint64_t euler_phi(const Factorization& f) {
    std::uint64_t phi = 1;
    for (const auto& [p, e] : f.factors()) {
        phi *= p - 1;
        for (unsigned i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

unsigned big_omega(const Factorization& f) {
    unsigned total = 0;
    for (const auto& pe : f.factors()) total += pe.exponent;
    return total;
}

mpq_class abundancy(const Factorization& f) {
    mpq_class q(sigma_integer(f, 1), to_mpz(f.value()));
    q.canonicalize();
    return q;
}

}  // namespace signlab::arith

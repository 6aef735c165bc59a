#include "signlab/crt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

#include "signlab/arith/factorize.hpp"
#include "signlab/arith/modular.hpp"
#include "signlab/arith/multiplicative.hpp"
#include "signlab/arith/primes.hpp"
#include "signlab/bigint.hpp"
#include "signlab/errors.hpp"
#include "signlab/parallel.hpp"

namespace signlab::crt {

namespace {

std::uint64_t residue(const LinearForm& f, std::uint64_t n, std::uint64_t p) {
    const i128 v = i128(f.a % static_cast<std::int64_t>(p)) * static_cast<i128>(n % p) + f.b;
    return arith::mod_floor(v, p);
}

std::uint64_t residue(const LinearForm& f, const mpz_class& n, std::uint64_t p) {
    const mpz_class v = f(n);
    return mpz_fdiv_ui(v.get_mpz_t(), p);
}

std::uint64_t checked_u64(i128 v, const char* what) {
    if (v < 0 || v > static_cast<i128>(UINT64_MAX)) throw RangeError(std::string(what) + " does not fit in 64 bits");
    return static_cast<std::uint64_t>(v);
}

std::uint64_t positive_value(const LinearForm& f, const mpz_class& n) {
    const mpz_class v = f(n);
    if (sgn(v) <= 0) throw DomainError(f.str() + " is not positive at n = " + n.get_str());
    const auto u = to_u64(v);
    if (!u) throw RangeError(f.str() + " at n = " + n.get_str() + " exceeds 64 bits");
    return *u;
}

// numerator / denominator of sum 1/p over [lo, hi)
void split_sum(std::span<const std::uint64_t> ps, std::size_t lo, std::size_t hi, mpz_class& num, mpz_class& den) {
    if (hi - lo == 1) {
        num = 1;
        den = to_mpz(ps[lo]);
        return;
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    mpz_class n1, d1, n2, d2;
    split_sum(ps, lo, mid, n1, d1);
    split_sum(ps, mid, hi, n2, d2);
    num = n1 * d2 + n2 * d1;
    den = d1 * d2;
}

}  // namespace

Admissibility admissibility_check(std::span<const LinearForm> forms, std::uint64_t p_max) {
    if (forms.empty()) throw DomainError("admissibility needs at least one form");
    Admissibility out;
    if (p_max < 2) return out;
    for (const std::uint64_t p : arith::primes_up_to(static_cast<std::uint32_t>(std::min<std::uint64_t>(p_max, UINT32_MAX)))) {
        std::optional<std::uint64_t> found;
        for (std::uint64_t n = 0; n < p && !found; ++n) {
            const bool clear = std::all_of(forms.begin(), forms.end(), [&](const LinearForm& f) { return residue(f, n, p) != 0; });
            if (clear) found = n;
        }
        if (!found) {
            out.obstructed_prime = p;
            return out;
        }
        out.residues.emplace_back(p, *found);
    }
    return out;
}

unsigned heath_brown_bound(std::uint64_t k) {
    if (k == 0) throw DomainError("G_k needs k >= 1");
    const u128 kk = k;
    const u128 v = (3 * kk * kk + 4 * kk + 4) / 2;
    const auto hi = static_cast<std::uint64_t>(v >> 64);
    if (hi != 0) return 64 + static_cast<unsigned>(std::bit_width(hi)) - 1;
    return static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(v))) - 1;
}

TheoremFourInstance build_instance(std::vector<LinearForm> L, std::vector<LinearForm> H) {
    if (L.empty() || L.size() != H.size()) {
        throw DomainError("need |L| = |H| >= 1, got " + std::to_string(L.size()) + " and " + std::to_string(H.size()));
    }
    TheoremFourInstance inst;
    inst.k = L.size();
    u128 C = 0;
    for (std::size_t i = 0; i < inst.k; ++i) {
        for (std::size_t j = 0; j < inst.k; ++j) {
            const i128 det = i128(L[i].a) * H[j].b - i128(L[i].b) * H[j].a;
            if (det == 0) {
                throw HypothesisError("a_i d_j != b_i c_j fails for (i, j) = (" + std::to_string(i + 1) + ", " +
                                      std::to_string(j + 1) + "): " + L[i].str() + " and " + H[j].str());
            }
            C = std::max(C, static_cast<u128>(det < 0 ? -det : det));
        }
    }
    for (const auto& f : L) inst.A = std::max(inst.A, static_cast<std::uint64_t>(f.a));
    for (const auto& f : H) inst.B = std::max(inst.B, static_cast<std::uint64_t>(f.a));
    inst.C = checked_u64(static_cast<i128>(C), "C");
    inst.G_k = heath_brown_bound(inst.k);
    const u128 base = u128(inst.A) + inst.B + C + inst.k;
    inst.p_start = arith::next_prime(checked_u64(static_cast<i128>(base), "A + B + C + k"));
    inst.L = std::move(L);
    inst.H = std::move(H);
    return inst;
}

mpz_class literal_threshold(const TheoremFourInstance& inst) {
    mpz_class t = to_mpz(inst.A);
    t <<= inst.G_k + 3;
    return t;
}

mpq_class reciprocal_sum(std::span<const std::uint64_t> primes) {
    if (primes.empty()) return 0;
    mpz_class num, den;
    split_sum(primes, 0, primes.size(), num, den);
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

std::vector<std::vector<std::uint64_t>> prime_strings(std::uint64_t start, std::size_t k, const mpq_class& tau,
                                                      std::uint64_t prime_budget) {
    if (sgn(tau) <= 0) throw DomainError("tau must be positive, got " + tau.get_str());
    const double tau_d = tau.get_d();
    const double tau_slop = std::abs(tau_d) * 4.5e-16 + 1e-300;

    std::vector<std::vector<std::uint64_t>> out;
    arith::PrimeCursor cursor(start);
    std::uint64_t consumed = 0;
    std::uint64_t last = start;
    while (out.size() < k) {
        std::vector<std::uint64_t> run;
        double s = 0;
        for (;;) {
            if (consumed == prime_budget) {
                std::ostringstream msg;
                msg << "prime budget of " << prime_budget << " exhausted after " << out.size() << " of " << k
                    << " strings (last prime " << last << ", open string sums to about " << s << ", target "
                    << tau.get_str() << ")";
                throw BudgetExceeded(msg.str(), {out.size(), consumed, last, s});
            }
            last = cursor.next();
            ++consumed;
            run.push_back(last);
            s += 1.0 / static_cast<double>(last);

            const double err = static_cast<double>(run.size() + 2) * 2.3e-16 * s + tau_slop;
            if (s < tau_d - err) continue;
            if (s > tau_d + err) break;
            if (reciprocal_sum(run) > tau) break;
        }
        out.push_back(std::move(run));
    }

    for (const auto& run : out) {
        const std::span<const std::uint64_t> all(run);
        if (!(reciprocal_sum(all) > tau) || reciprocal_sum(all.first(all.size() - 1)) > tau) {
            throw Error("prime string starting at " + std::to_string(run.front()) + " failed exact certification");
        }
    }
    return out;
}

CrtConstruction build_crt_system(const TheoremFourInstance& inst, const std::vector<std::vector<std::uint64_t>>& strings,
                                 const Admissibility& prefix) {
    if (strings.size() != inst.k) {
        throw DomainError("need one prime string per H form: " + std::to_string(strings.size()) + " strings for k = " +
                          std::to_string(inst.k));
    }
    if (!prefix.ok()) {
        throw HypothesisError("L has a fixed prime divisor " + std::to_string(*prefix.obstructed_prime));
    }

    // one congruence n = r (mod p) per involved prime
    std::vector<std::pair<std::uint64_t, std::uint64_t>> system;
    for (std::size_t s = 0; s < strings.size(); ++s) {
        const LinearForm& h = inst.H[s];
        for (const std::uint64_t p : strings[s]) {
            if (!arith::is_prime(p)) throw DomainError(std::to_string(p) + " in string " + std::to_string(s + 1) + " is not prime");
            const std::uint64_t c = static_cast<std::uint64_t>(h.a) % p;
            const auto inv = arith::inverse_mod(c, p);
            if (!inv) {
                throw ConstructionError(std::to_string(p) + " divides the slope of " + h.str() +
                                        ", so " + h.str() + " = 0 (mod " + std::to_string(p) + ") has no solution");
            }
            const std::uint64_t minus_d = arith::mod_floor(-static_cast<i128>(h.b), p);
            system.emplace_back(p, arith::mulmod(minus_d, *inv, p));
        }
    }

    std::set<std::uint64_t> seen;
    for (const auto& [p, r] : prefix.residues) {
        if (!seen.insert(p).second) throw DomainError("prime " + std::to_string(p) + " appears twice");
    }
    for (const auto& [p, r] : system) {
        if (!seen.insert(p).second) throw DomainError("prime " + std::to_string(p) + " appears twice");
    }
    if (inst.p_start >= 2) {
        for (const std::uint64_t p : arith::primes_up_to(static_cast<std::uint32_t>(inst.p_start))) {
            const bool present = std::any_of(prefix.residues.begin(), prefix.residues.end(),
                                             [&](const auto& e) { return e.first == p; });
            if (!present) throw DomainError("prefix misses the prime " + std::to_string(p) + " <= p_start");
        }
    }
    for (const auto& [p, r] : prefix.residues) {
        if (r >= p) throw DomainError("prefix residue " + std::to_string(r) + " is not reduced mod " + std::to_string(p));
        for (const auto& f : inst.L) {
            if (residue(f, r, p) == 0) {
                throw HypothesisError(std::to_string(p) + " divides " + f.str() + " at the prefix residue " + std::to_string(r));
            }
        }
    }

    CrtConstruction c;
    c.prefix = prefix.residues;
    c.strings = strings;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> all = prefix.residues;
    all.insert(all.end(), system.begin(), system.end());

    c.P = 1;
    c.n0 = 0;
    for (const auto& [p, r] : all) {
        // n0 + P t = r (mod p)
        const mpz_class pz = to_mpz(p);
        mpz_class inv;
        mpz_class Pmod = c.P % pz;
        mpz_invert(inv.get_mpz_t(), Pmod.get_mpz_t(), pz.get_mpz_t());
        mpz_class t = (to_mpz(r) - c.n0) * inv;
        mpz_fdiv_r(t.get_mpz_t(), t.get_mpz_t(), pz.get_mpz_t());
        c.n0 += c.P * t;
        c.P *= pz;
    }

    c.verified = verify_construction(inst, c);
    if (!c.verified) throw ConstructionError("solution failed substitution check");
    return c;
}

bool verify_construction(const TheoremFourInstance& inst, const CrtConstruction& c) {
    if (sgn(c.n0) < 0 || c.n0 >= c.P) return false;
    if (c.strings.size() != inst.k) return false;
    mpz_class product = 1;
    for (const auto& [p, r] : c.prefix) {
        product *= to_mpz(p);
        if (mpz_fdiv_ui(c.n0.get_mpz_t(), p) != r) return false;
        for (const auto& f : inst.L) {
            if (residue(f, c.n0, p) == 0) return false;
        }
    }
    for (std::size_t s = 0; s < c.strings.size(); ++s) {
        for (const std::uint64_t p : c.strings[s]) {
            product *= to_mpz(p);
            if (residue(inst.H[s], c.n0, p) != 0) return false;
            for (const auto& f : inst.L) {
                if (residue(f, c.n0, p) == 0) return false;
            }
        }
    }
    return product == c.P;
}

OmegaScan omega_bounded_scan(const CrtConstruction& c, const TheoremFourInstance& inst, std::uint64_t M,
                             unsigned bound, unsigned threads) {
    OmegaScan out;
    out.rows.resize(M);
    constexpr std::size_t kBlock = 256;
    const std::size_t blocks = (M + kBlock - 1) / kBlock;
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::uint64_t lo = 1 + b * kBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(M, lo + kBlock - 1);
        for (std::uint64_t m = lo; m <= hi; ++m) {
            OmegaRow& row = out.rows[m - 1];
            row.m = m;
            row.n = to_mpz(m) * c.P + c.n0;
            for (const auto& f : inst.L) {
                const mpz_class v = f(row.n);
                if (sgn(v) <= 0) throw DomainError(f.str() + " is not positive at m = " + std::to_string(m));
                const auto u = to_u64(v);
                if (!u) throw RangeError(f.str() + " at m = " + std::to_string(m) + " exceeds 64 bits; cannot factor");
                const auto fac = arith::factorize(*u);
                row.omega_max = std::max(row.omega_max, arith::big_omega(fac));
            }
            row.qualified = row.omega_max <= bound;
        }
    });
    for (const auto& row : out.rows) {
        if (row.qualified) out.hits.push_back(row.m);
    }
    if (M > 0) {
        long exp = 0;
        const double mant = mpz_get_d_2exp(&exp, c.P.get_mpz_t());
        const double log_mp = std::log(static_cast<double>(M)) + std::log(mant) + static_cast<double>(exp) * std::log(2.0);
        out.reference_density = static_cast<double>(M) / std::pow(log_mp, static_cast<double>(inst.k));
    }
    return out;
}

std::string omega_scan_csv(const OmegaScan& scan) {
    std::string out = "m,n,omega_max,qualified\n";
    for (const auto& r : scan.rows) {
        out += std::to_string(r.m) + "," + r.n.get_str() + "," + std::to_string(r.omega_max) + "," +
               (r.qualified ? "true" : "false") + "\n";
    }
    return out;
}

SimultaneousEvidence simultaneous_check(const TheoremFourInstance& inst, const mpz_class& n) {
    SimultaneousEvidence ev;
    for (const auto& f : inst.L) {
        const auto fac = arith::factorize(positive_value(f, n));
        ev.sigma_L.push_back(arith::sigma_integer(fac, 1));
    }
    for (const auto& f : inst.H) {
        const auto fac = arith::factorize(positive_value(f, n));
        ev.sigma_H.push_back(arith::sigma_integer(fac, 1));
    }
    const mpz_class top = *std::max_element(ev.sigma_L.begin(), ev.sigma_L.end());
    ev.holds = std::all_of(ev.sigma_H.begin(), ev.sigma_H.end(), [&](const mpz_class& h) { return h > top; });
    return ev;
}

namespace {

struct Entry {
    std::uint64_t y;   // x * p_k^e
    std::uint64_t x;   // part built from primes below p_k
    double ax;         // sigma(x) / x
    std::uint16_t k;
    std::uint8_t e;

    bool operator>(const Entry& o) const { return y > o.y; }
};

class Frontier {
public:
    Frontier(const AbundancySearchOptions& opts, double target) : limit_(opts.value_limit), target_(target) {
        for (const std::uint32_t p : arith::primes_up_to(static_cast<std::uint32_t>(std::min<std::uint64_t>(opts.max_prime, 1u << 20)))) {
            if (p > 2) primes_.push_back(p);
        }
        if (primes_.size() > UINT16_MAX) throw DomainError("max_prime too large");
    }

    const std::vector<std::uint64_t>& primes() const { return primes_; }

    // Largest sigma(m)/m over m <= cap built from primes >= p_k: the primes
    // p_k, p_{k+1}, ... taken while their product stays under cap.
    double best_gain(std::size_t k, std::uint64_t cap) const {
        double g = 1;
        std::uint64_t prod = 1;
        for (std::size_t i = k; i < primes_.size(); ++i) {
            if (prod > cap / primes_[i]) break;
            prod *= primes_[i];
            g *= static_cast<double>(primes_[i]) / static_cast<double>(primes_[i] - 1);
        }
        return g;
    }

    bool times(std::uint64_t a, std::uint64_t b, std::uint64_t& out) const {
        return !__builtin_mul_overflow(a, b, &out) && out <= limit_;
    }

    bool hopeless(std::uint64_t x, double ax, std::size_t k) const {
        return ax * best_gain(k, limit_ / x) * (1 + 1e-12) <= target_;
    }

    std::uint64_t limit_;
    double target_;
    std::vector<std::uint64_t> primes_;
};

}  // namespace

AbundancySearchStats abundancy_target_search(const mpq_class& target, std::uint64_t budget,
                                             const AbundancySearchOptions& opts,
                                             const std::function<bool(std::uint64_t)>& on_hit) {
    if (target < 1) throw DomainError("abundancy target must be >= 1, got " + target.get_str());
    if (opts.constraint && opts.constraint->second == 0) throw DomainError("constraint modulus must be >= 1");
    if (opts.max_exponent == 0) throw DomainError("max_exponent must be >= 1");

    AbundancySearchStats stats;
    const double target_d = target.get_d();
    Frontier fr(opts, target_d);
    const auto& ps = fr.primes();
    if (ps.empty() || ps[0] > opts.value_limit) return stats;

    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    auto push = [&](std::uint64_t x, double ax, std::size_t k, unsigned e, std::uint64_t y) {
        if (fr.hopeless(x, ax, k)) {
            ++stats.pruned;
            return;
        }
        heap.push({y, x, ax, static_cast<std::uint16_t>(k), static_cast<std::uint8_t>(e)});
    };
    push(1, 1.0, 0, 1, ps[0]);

    while (!heap.empty()) {
        if (stats.popped == budget) {
            stats.exhausted = true;
            break;
        }
        const Entry top = heap.top();
        heap.pop();
        ++stats.popped;
        stats.last_value = top.y;

        const std::uint64_t p = ps[top.k];
        // sigma(p^e)/p^e = (p^{e+1} - 1) / (p^e (p - 1))
        double pe = 1;
        for (unsigned i = 0; i < top.e; ++i) pe *= static_cast<double>(p);
        const double ay = top.ax * (pe * static_cast<double>(p) - 1) / (pe * static_cast<double>(p - 1));

        std::uint64_t v = 0;
        if (top.e < opts.max_exponent && fr.times(top.y, p, v)) push(top.x, top.ax, top.k, top.e + 1, v);
        if (top.k + 1u < ps.size()) {
            if (fr.times(top.y, ps[top.k + 1], v)) push(top.y, ay, top.k + 1, 1, v);
            if (top.e == 1 && fr.times(top.x, ps[top.k + 1], v)) push(top.x, top.ax, top.k + 1, 1, v);
        }

        if (ay * (1 + 1e-12) <= target_d) continue;
        if (opts.constraint && top.y % opts.constraint->second != opts.constraint->first % opts.constraint->second) continue;
        if (!(arith::abundancy(arith::factorize(top.y)) > target)) continue;
        if (!on_hit(top.y)) break;
    }
    return stats;
}

mpz_class sigma_by_enumeration(std::uint64_t n) {
    if (n == 0) throw DomainError("sigma(0) is undefined");
    u128 s = 0;
    for (std::uint64_t d = 1; d <= n / d; ++d) {
        if (n % d != 0) continue;
        s += d;
        if (d != n / d) s += n / d;
    }
    return to_mpz(static_cast<i128>(s));
}

HuntResult theorem3_hunt(std::uint64_t budget, const HuntOptions& opts) {
    if (sgn(opts.slack) < 0) throw DomainError("slack must be >= 0");
    if (opts.search.value_limit > (std::uint64_t{1} << 62)) throw DomainError("value_limit above 2^62 overflows 3t + 2");
    HuntResult res;
    if (budget == 0) return res;

    auto sigma = [](std::uint64_t n) { return arith::sigma_integer(arith::factorize(n), 1); };
    res.stats = abundancy_target_search(3 + opts.slack, budget, opts.search, [&](std::uint64_t t) {
        if (t < 7) return true;
        HuntLogEntry log{t, (t - 5) / 2, false, false};
        const mpz_class s_t = sigma(t);
        const mpz_class s_3t2 = sigma(3 * t + 2);
        log.first_inequality = s_t > s_3t2;
        mpz_class s_5t17, s_3t8;
        if (log.first_inequality) {
            s_5t17 = sigma((5 * t - 17) / 2);
            s_3t8 = sigma(3 * t - 8);
            log.second_inequality = s_5t17 > s_3t8;
        }
        res.log.push_back(log);
        if (!(log.first_inequality && log.second_inequality)) return true;

        const std::uint64_t m = log.m;
        Theorem3Witness w{m, sigma_by_enumeration(2 * m + 5), sigma_by_enumeration(6 * m + 17),
                          sigma_by_enumeration(5 * m + 4), sigma_by_enumeration(6 * m + 7)};
        if (w.s_2m5 != s_t || w.s_6m17 != s_3t2 || w.s_5m4 != s_5t17 || w.s_6m7 != s_3t8) {
            throw Error("witness m = " + std::to_string(m) + " failed divisor-sum re-verification");
        }
        res.witnesses.push_back(std::move(w));
        return opts.max_witnesses == 0 || res.witnesses.size() < opts.max_witnesses;
    });
    return res;
}

}  // namespace signlab::crt

#include "signlab/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "output.hpp"
#include "signlab/arith/factorize.hpp"
#include "signlab/arith/multiplicative.hpp"
#include "signlab/bigint.hpp"
#include "signlab/crt.hpp"
#include "signlab/density.hpp"
#include "signlab/errors.hpp"
#include "signlab/linear_form.hpp"
#include "signlab/parallel.hpp"
#include "signlab/progression.hpp"

namespace signlab::cli {

namespace {

// Malformed flag values found after CLI11 accepted the command line.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

mpq_class parse_rational(const std::string& text, const std::string& flag) {
    std::string t = text;
    bool neg = false;
    if (!t.empty() && (t[0] == '-' || t[0] == '+')) {
        neg = t[0] == '-';
        t.erase(0, 1);
    }
    auto digits = [](const std::string& s) {
        return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    mpq_class q;
    if (const auto slash = t.find('/'); slash != std::string::npos) {
        const std::string num = t.substr(0, slash), den = t.substr(slash + 1);
        if (!digits(num) || !digits(den) || mpz_class(den) == 0) throw UsageError(flag + ": not a rational: " + text);
        q = mpq_class(mpz_class(num), mpz_class(den));
    } else if (const auto dot = t.find('.'); dot != std::string::npos) {
        const std::string ip = t.substr(0, dot), fp = t.substr(dot + 1);
        if ((!ip.empty() && !digits(ip)) || (!fp.empty() && !digits(fp)) || (ip.empty() && fp.empty())) {
            throw UsageError(flag + ": not a rational: " + text);
        }
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, fp.size());
        q = mpq_class(mpz_class(ip.empty() ? "0" : ip) * scale + mpz_class(fp.empty() ? "0" : fp), scale);
    } else {
        if (!digits(t)) throw UsageError(flag + ": not a rational: " + text);
        q = mpq_class(mpz_class(t));
    }
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

LinearForm parse_form_flag(const std::string& text, const std::string& flag) {
    try {
        return parse_form(text);
    } catch (const DomainError& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

std::vector<LinearForm> parse_forms(const std::vector<std::string>& texts, const std::string& flag) {
    std::vector<LinearForm> out;
    for (const auto& t : texts) out.push_back(parse_form_flag(t, flag));
    return out;
}

mpz_class parse_integer(const std::string& text, const std::string& flag) {
    const mpq_class q = parse_rational(text, flag);
    if (q.get_den() != 1) throw UsageError(flag + ": not an integer: " + text);
    return q.get_num();
}

arith::SigmaMode sigma_mode(const mpq_class& s) {
    if (s.get_den() == 1 && s.get_num().fits_slong_p()) return arith::ExactInteger{s.get_num().get_si()};
    return arith::Real{s.get_d()};
}

std::string sigma_value_str(const arith::SigmaValue& v) {
    if (const auto* q = std::get_if<mpq_class>(&v)) return q->get_str();
    return fmt_double(std::get<double>(v));
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string s;
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
    return s;
}

template <class T>
std::vector<std::string> strs(const std::vector<T>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) {
        if constexpr (std::is_same_v<T, mpz_class>) {
            out.push_back(x.get_str());
        } else {
            out.push_back(std::to_string(x));
        }
    }
    return out;
}

Json instance_json(const crt::TheoremFourInstance& inst) {
    Json j;
    std::vector<std::string> L, H;
    for (const auto& f : inst.L) L.push_back(f.str());
    for (const auto& f : inst.H) H.push_back(f.str());
    j["L"] = L;
    j["H"] = H;
    j["k"] = inst.k;
    j["A"] = inst.A;
    j["B"] = inst.B;
    j["C"] = inst.C;
    j["G_k"] = inst.G_k;
    j["p_start"] = inst.p_start;
    return j;
}

struct Context {
    unsigned threads = 0;
    int verbosity = 1;
    std::ostream* err = nullptr;

    void progress(const std::string& msg) const {
        if (verbosity > 0) *err << "signlab: " << msg << "\n" << std::flush;
    }
};

// Flag storage for every subcommand; each handler reads its own fields.
struct Flags {
    std::uint64_t n = 0;
    std::string n_text;
    std::string s = "1";
    std::string f, g;
    std::uint64_t limit = 0;
    std::uint64_t q = 0;
    std::int64_t m = 0;
    std::uint64_t count = 1;
    std::uint64_t start = 0;
    std::uint64_t a = 0;
    std::uint64_t d = 0;
    std::uint64_t p = 0;
    std::vector<std::uint64_t> checkpoints{10000, 100000, 1000000};
    std::vector<std::string> L, H;
    std::uint64_t k = 1;
    std::string tau = "1/20";
    std::uint64_t budget = 1000000;
    std::uint64_t M = 100;
    std::optional<unsigned> bound;
    std::string slack = "1/1000";
    std::uint64_t max_witnesses = 1;
    std::uint64_t value_limit = 100000000000000ULL;
};

struct Pipeline {
    crt::TheoremFourInstance inst;
    crt::CrtConstruction construction;
};

Pipeline run_pipeline(const Flags& fl, const Context& ctx) {
    Pipeline p;
    p.inst = crt::build_instance(parse_forms(fl.L, "--L"), parse_forms(fl.H, "--H"));
    const auto prefix = crt::admissibility_check(p.inst.L, p.inst.p_start);
    if (!prefix.ok()) {
        throw HypothesisError("L has the fixed prime divisor " + std::to_string(*prefix.obstructed_prime) +
                              " (admissibility fails)");
    }
    const mpq_class tau = parse_rational(fl.tau, "--tau");
    ctx.progress("building prime strings with tau = " + tau.get_str() + " after p_start = " + std::to_string(p.inst.p_start));
    const auto strings = crt::prime_strings(p.inst.p_start, p.inst.k, tau, fl.budget);
    p.construction = crt::build_crt_system(p.inst, strings, prefix);
    return p;
}

Output cmd_sigma(const Flags& fl, const Context&) {
    Output o;
    const mpq_class s = parse_rational(fl.s, "--s");
    const auto fac = arith::factorize(fl.n);
    const std::string v = sigma_value_str(arith::sigma_s(fac, sigma_mode(s)));
    o.field("n", fl.n);
    o.field("s", s);
    o.field("sigma", v);
    o.text = v;
    return o;
}

Output cmd_phi(const Flags& fl, const Context&) {
    Output o;
    const auto v = arith::euler_phi(arith::factorize(fl.n));
    o.field("n", fl.n);
    o.field("phi", v);
    o.text = std::to_string(v);
    return o;
}

Output cmd_factor(const Flags& fl, const Context&) {
    Output o;
    const auto fac = arith::factorize(fl.n);
    Json fs = Json::array();
    for (const auto& pe : fac.factors()) fs.push_back({{"p", pe.prime}, {"e", pe.exponent}});
    o.field("n", fl.n);
    o.field("factorization", fac.str());
    o.field("big_omega", static_cast<std::uint64_t>(arith::big_omega(fac)));
    o.json["factors"] = fs;
    o.text = fac.str();
    return o;
}

Output cmd_scan(const Flags& fl, const Context& ctx) {
    Output o;
    const scan::ProgressionPair pair{parse_form_flag(fl.f, "--f"), parse_form_flag(fl.g, "--g"),
                                     sigma_mode(parse_rational(fl.s, "--s"))};
    ctx.progress("scanning sign of sigma(" + pair.left.str() + ") - sigma(" + pair.right.str() + ") for n <= " +
                 std::to_string(fl.limit));
    const auto r = scan::scan_signs(pair, fl.limit, ctx.threads);
    o.field("f", pair.left.str());
    o.field("g", pair.right.str());
    o.field("s", parse_rational(fl.s, "--s"));
    o.field("n_max", r.n_max);
    o.field("count_pos", r.count_pos);
    o.field("count_neg", r.count_neg);
    o.field("count_zero", r.count_zero);
    o.field("sign_changes", r.sign_changes);
    o.field("first_pos", r.first_pos);
    o.field("first_neg", r.first_neg);
    o.field("first_zero", r.first_zero);
    o.field("near_ties", r.near_ties);
    return o;
}

Output cmd_jarden(const Flags& fl, const Context& ctx) {
    Output o;
    ctx.progress("checking phi(" + std::to_string(fl.q) + "n+1) > phi(" + std::to_string(fl.q) + "n) for n <= " +
                 std::to_string(fl.limit));
    const auto fail = scan::phi_dominance_scan(fl.q, fl.limit, ctx.threads);
    o.field("q", fl.q);
    o.field("limit", fl.limit);
    o.field("pass", !fail.has_value());
    o.field("first_failure", fail);
    o.text = fail ? "FAIL at n = " + std::to_string(*fail) + " (phi(qn+1) <= phi(qn))"
                  : "PASS (no failure \xE2\x89\xA4 " + std::to_string(fl.limit) + ")";
    return o;
}

Output cmd_ap_primes(const Flags& fl, const Context&) {
    Output o;
    const auto ps = scan::prime_in_ap(fl.q, fl.m, fl.count, fl.start);
    o.json["q"] = fl.q;
    o.json["m"] = fl.m;
    o.json["start"] = fl.start;
    o.json["primes"] = ps;
    o.columns = {"index", "prime"};
    for (std::size_t i = 0; i < ps.size(); ++i) o.rows.push_back({std::to_string(i + 1), std::to_string(ps[i])});
    o.text = join(strs(ps), "\n");
    return o;
}

Output cmd_thm1_min_a(const Flags& fl, const Context&) {
    Output o;
    const mpq_class s = parse_rational(fl.s, "--s");
    const auto r = scan::theorem1_min_a(s);
    o.field("s", s);
    o.field("a", r.a);
    o.number("threshold", r.threshold);
    o.field("exact", r.exact);
    o.number("margin", r.margin);
    if (s.get_den() == 1) {
        // boundary: (a+2)^s 2^{s+1} < (2^{s+1}+1) a^s at a, and its failure at a-2
        const unsigned long e = s.get_num().get_ui();
        auto sides = [&](std::uint64_t a, mpz_class& lhs, mpz_class& rhs) {
            mpz_class t, x;
            mpz_ui_pow_ui(t.get_mpz_t(), 2, e + 1);
            mpz_pow_ui(x.get_mpz_t(), to_mpz(a + 2).get_mpz_t(), e);
            lhs = x * t;
            mpz_pow_ui(x.get_mpz_t(), to_mpz(a).get_mpz_t(), e);
            rhs = x * (t + 1);
        };
        mpz_class lhs, rhs;
        sides(r.a, lhs, rhs);
        o.field("lhs_at_a", lhs);
        o.field("rhs_at_a", rhs);
        if (r.a >= 3) {
            sides(r.a - 2, lhs, rhs);
            o.field("lhs_at_a_minus_2", lhs);
            o.field("rhs_at_a_minus_2", rhs);
        }
    }
    return o;
}

Output cmd_thm1_witnesses(const Flags& fl, const Context& ctx) {
    Output o;
    const mpq_class s = parse_rational(fl.s, "--s");
    ctx.progress("collecting witnesses for s = " + s.get_str() + ", a = " + std::to_string(fl.a) + ", n <= " +
                 std::to_string(fl.limit));
    const auto w = scan::theorem1_witnesses(s, fl.a, fl.limit);
    auto arr = [](const std::vector<scan::WitnessValue>& v) {
        Json a = Json::array();
        for (const auto& x : v) a.push_back({{"n", x.n}, {"left", x.left}, {"right", x.right}});
        return a;
    };
    o.json["s"] = s.get_str();
    o.json["a"] = fl.a;
    o.json["limit"] = fl.limit;
    o.json["negatives"] = arr(w.negatives);
    o.json["positives"] = arr(w.positives);
    o.json["failures"] = w.failures;
    o.columns = {"sign", "n", "sigma_an2", "sigma_a1n1"};
    for (const auto& x : w.negatives) o.rows.push_back({"-", std::to_string(x.n), x.left, x.right});
    for (const auto& x : w.positives) o.rows.push_back({"+", std::to_string(x.n), x.left, x.right});
    for (const auto n : w.failures) o.rows.push_back({"failed", std::to_string(n), "", ""});
    return o;
}

Output cmd_roots(const Flags& fl, const Context&) {
    Output o;
    const auto f = parse_form_flag(fl.f, "--f");
    const auto v = density::root_count_general(f, fl.d);
    o.field("f", f.str());
    o.field("d", fl.d);
    o.field("roots", v);
    o.text = std::to_string(v);
    return o;
}

Output cmd_local_factor(const Flags& fl, const Context&) {
    Output o;
    const auto f = parse_form_flag(fl.f, "--f");
    const auto v = density::local_factor(f, fl.p);
    o.field("f", f.str());
    o.field("p", fl.p);
    o.field("local_factor", v);
    o.field("decimal", density::decimal(v));
    o.text = v.get_str();
    return o;
}

Output cmd_beta(const Flags& fl, const Context&) {
    Output o;
    const auto f = parse_form_flag(fl.f, "--f");
    const auto b = density::beta(f);
    const auto e = density::numeric(b);
    o.field("f", f.str());
    o.field("zeta2_multiple", b.coeff);
    o.number("lo", e.lo);
    o.number("hi", e.hi);
    o.text = b.coeff.get_str() + " * zeta(2) in [" + fmt_double(e.lo) + ", " + fmt_double(e.hi) + "]";
    return o;
}

Output cmd_ratio(const Flags& fl, const Context&) {
    Output o;
    const auto f = parse_form_flag(fl.f, "--f"), g = parse_form_flag(fl.g, "--g");
    const auto r = density::predicted_ratio(f, g);
    o.field("f", f.str());
    o.field("g", g.str());
    o.field("ratio", r);
    o.field("decimal", density::decimal(r));
    o.text = r.get_str();
    return o;
}

Output cmd_partial_sums(const Flags& fl, const Context& ctx) {
    Output o;
    const auto f = parse_form_flag(fl.f, "--f"), g = parse_form_flag(fl.g, "--g");
    arith::BatchOptions opts;
    opts.threads = ctx.threads;
    ctx.progress("summing sigma(" + f.str() + ") and sigma(" + g.str() + ") over " +
                 std::to_string(fl.checkpoints.size()) + " checkpoints");
    const auto rows = density::compare_partial_sums(f, g, fl.checkpoints, opts);
    o.csv = density::partial_sums_csv(rows);
    o.columns = {"K", "sum_f", "sum_g", "ratio", "limit", "abs_deviation"};
    Json arr = Json::array();
    for (const auto& r : rows) {
        o.rows.push_back({std::to_string(r.K), r.sum_f.get_str(), r.sum_g.get_str(), density::decimal(r.ratio),
                          density::decimal(r.limit), density::decimal(r.deviation)});
        arr.push_back({{"K", r.K},
                       {"sum_f", r.sum_f.get_str()},
                       {"sum_g", r.sum_g.get_str()},
                       {"ratio", r.ratio.get_str()},
                       {"ratio_decimal", density::decimal(r.ratio)},
                       {"abs_deviation", density::decimal(r.deviation)}});
    }
    o.json["f"] = f.str();
    o.json["g"] = g.str();
    o.json["limit"] = density::predicted_ratio(f, g).get_str();
    o.json["limit_decimal"] = density::decimal(density::predicted_ratio(f, g));
    o.json["rows"] = arr;
    return o;
}

Output cmd_thm4_build(const Flags& fl, const Context&) {
    Output o;
    const auto inst = crt::build_instance(parse_forms(fl.L, "--L"), parse_forms(fl.H, "--H"));
    std::vector<std::string> L, H, dets;
    Json jd = Json::array();
    for (std::size_t i = 0; i < inst.k; ++i) {
        for (std::size_t j = 0; j < inst.k; ++j) {
            const i128 det = i128(inst.L[i].a) * inst.H[j].b - i128(inst.L[i].b) * inst.H[j].a;
            dets.push_back(to_string(det));
            jd.push_back({{"i", i + 1}, {"j", j + 1}, {"value", to_string(det)}});
        }
    }
    for (const auto& f : inst.L) L.push_back(f.str());
    for (const auto& f : inst.H) H.push_back(f.str());
    o.field("L", Json(L), join(L, ";"));
    o.field("H", Json(H), join(H, ";"));
    o.field("k", static_cast<std::uint64_t>(inst.k));
    o.field("A", inst.A);
    o.field("B", inst.B);
    o.field("C", inst.C);
    o.field("G_k", static_cast<std::uint64_t>(inst.G_k));
    o.field("p_start", inst.p_start);
    o.field("literal_threshold", crt::literal_threshold(inst));
    o.field("cross_determinants", jd, join(dets, ";"));
    return o;
}

Output cmd_thm4_strings(const Flags& fl, const Context& ctx) {
    Output o;
    const mpq_class tau = parse_rational(fl.tau, "--tau");
    ctx.progress("building " + std::to_string(fl.k) + " prime strings after " + std::to_string(fl.start) +
                 " with tau = " + tau.get_str());
    const auto strings = crt::prime_strings(fl.start, fl.k, tau, fl.budget);
    o.columns = {"string", "first", "last", "length", "reciprocal_sum"};
    Json arr = Json::array();
    for (std::size_t i = 0; i < strings.size(); ++i) {
        const auto& s = strings[i];
        const std::string sum = density::decimal(crt::reciprocal_sum(s));
        o.rows.push_back({std::to_string(i + 1), std::to_string(s.front()), std::to_string(s.back()),
                          std::to_string(s.size()), sum});
        arr.push_back({{"primes", s}, {"reciprocal_sum", sum}});
    }
    o.json["start"] = fl.start;
    o.json["tau"] = tau.get_str();
    o.json["strings"] = arr;
    return o;
}

Json construction_json(const crt::CrtConstruction& c) {
    Json j;
    j["P"] = c.P.get_str();
    j["n0"] = c.n0.get_str();
    Json prefix = Json::array();
    for (const auto& [p, r] : c.prefix) prefix.push_back({{"p", p}, {"residue", r}});
    j["prefix"] = prefix;
    j["strings"] = c.strings;
    j["verified"] = c.verified;
    return j;
}

Output cmd_thm4_crt(const Flags& fl, const Context& ctx) {
    Output o;
    const auto pl = run_pipeline(fl, ctx);
    const auto& c = pl.construction;
    o.json = construction_json(c);
    o.columns = {"role", "index", "p", "residue"};
    for (const auto& [p, r] : c.prefix) o.rows.push_back({"prefix", "", std::to_string(p), std::to_string(r)});
    for (std::size_t s = 0; s < c.strings.size(); ++s) {
        for (const auto p : c.strings[s]) {
            o.rows.push_back({"string", std::to_string(s + 1), std::to_string(p),
                              std::to_string(mpz_fdiv_ui(c.n0.get_mpz_t(), p))});
        }
    }
    std::ostringstream t;
    t << "P         " << c.P.get_str() << "\n"
      << "n0        " << c.n0.get_str() << "\n"
      << "verified  " << (c.verified ? "true" : "false") << "\n";
    std::vector<std::string> pre;
    for (const auto& [p, r] : c.prefix) pre.push_back(std::to_string(p) + ":" + std::to_string(r));
    t << "prefix    " << join(pre, " ") << "\n";
    for (std::size_t s = 0; s < c.strings.size(); ++s) {
        t << "string " << s + 1 << "  " << join(strs(c.strings[s]), " ") << "\n";
    }
    o.text = t.str();
    return o;
}

Output cmd_thm4_scan(const Flags& fl, const Context& ctx) {
    Output o;
    const auto pl = run_pipeline(fl, ctx);
    const unsigned bound = fl.bound.value_or(pl.inst.G_k);
    ctx.progress("factoring L_i(mP + n0) for m <= " + std::to_string(fl.M));
    const auto scan = crt::omega_bounded_scan(pl.construction, pl.inst, fl.M, bound, ctx.threads);
    o.csv = crt::omega_scan_csv(scan);
    o.columns = {"m", "n", "omega_max", "qualified"};
    Json rows = Json::array();
    for (const auto& r : scan.rows) {
        o.rows.push_back({std::to_string(r.m), r.n.get_str(), std::to_string(r.omega_max), r.qualified ? "true" : "false"});
        rows.push_back({{"m", r.m}, {"n", r.n.get_str()}, {"omega_max", r.omega_max}, {"qualified", r.qualified}});
    }
    o.json["instance"] = instance_json(pl.inst);
    o.json["construction"] = construction_json(pl.construction);
    o.json["M"] = fl.M;
    o.json["bound"] = bound;
    o.json["hits"] = scan.hits;
    o.json["hit_count"] = scan.hits.size();
    o.json["reference_density"] = scan.reference_density;
    o.json["rows"] = rows;
    std::ostringstream t;
    t << "P                  " << pl.construction.P.get_str() << "\n"
      << "n0                 " << pl.construction.n0.get_str() << "\n"
      << "bound              " << bound << "\n"
      << "hits               " << scan.hits.size() << " of " << fl.M << "\n"
      << "reference density  " << fmt_double(scan.reference_density) << "  (M / log(MP)^k)\n"
      << "qualifying m       " << join(strs(scan.hits), " ") << "\n";
    o.text = t.str();
    return o;
}

Output cmd_thm4_check(const Flags& fl, const Context&) {
    Output o;
    const auto inst = crt::build_instance(parse_forms(fl.L, "--L"), parse_forms(fl.H, "--H"));
    const mpz_class n = parse_integer(fl.n_text, "--n");
    const auto ev = crt::simultaneous_check(inst, n);
    o.field("n", n);
    o.field("holds", ev.holds);
    o.field("sigma_L", Json(strs(ev.sigma_L)), join(strs(ev.sigma_L), ";"));
    o.field("sigma_H", Json(strs(ev.sigma_H)), join(strs(ev.sigma_H), ";"));
    return o;
}

Output cmd_thm3_hunt(const Flags& fl, const Context& ctx) {
    Output o;
    crt::HuntOptions opts;
    opts.slack = parse_rational(fl.slack, "--slack");
    opts.max_witnesses = fl.max_witnesses;
    opts.search.value_limit = fl.value_limit;
    ctx.progress("searching odd t with sigma(t)/t > 3 + " + opts.slack.get_str() + ", budget " +
                 std::to_string(fl.budget) + " candidates");
    const auto r = crt::theorem3_hunt(fl.budget, opts);
    o.columns = {"m", "sigma_2m5", "sigma_6m17", "sigma_5m4", "sigma_6m7"};
    Json ws = Json::array();
    for (const auto& w : r.witnesses) {
        o.rows.push_back({std::to_string(w.m), w.s_2m5.get_str(), w.s_6m17.get_str(), w.s_5m4.get_str(), w.s_6m7.get_str()});
        ws.push_back({{"m", w.m},
                      {"sigma_2m5", w.s_2m5.get_str()},
                      {"sigma_6m17", w.s_6m17.get_str()},
                      {"sigma_5m4", w.s_5m4.get_str()},
                      {"sigma_6m7", w.s_6m7.get_str()}});
    }
    Json log = Json::array();
    for (const auto& e : r.log) log.push_back({{"t", e.t}, {"m", e.m}, {"first", e.first_inequality}, {"second", e.second_inequality}});
    o.json["budget"] = fl.budget;
    o.json["slack"] = opts.slack.get_str();
    o.json["witnesses"] = ws;
    o.json["candidates_popped"] = r.stats.popped;
    o.json["pruned"] = r.stats.pruned;
    o.json["budget_exhausted"] = r.stats.exhausted;
    o.json["log"] = log;

    std::ostringstream t;
    t << "candidates " << r.stats.popped << ", abundant enough " << r.log.size() << ", witnesses "
      << r.witnesses.size() << (r.stats.exhausted ? " (budget exhausted)" : "") << "\n";
    for (const auto& w : r.witnesses) {
        t << "m = " << w.m << ": sigma(2m+5) = " << w.s_2m5.get_str() << " > sigma(6m+17) = " << w.s_6m17.get_str()
          << ", sigma(5m+4) = " << w.s_5m4.get_str() << " > sigma(6m+7) = " << w.s_6m7.get_str() << "\n";
    }
    o.text = t.str();
    return o;
}

void forms_flags(CLI::App* sub, Flags& fl) {
    sub->add_option("--L", fl.L, "forms kept almost prime, e.g. 6x+17,6x+7")->delimiter(',')->required();
    sub->add_option("--H", fl.H, "forms given small factors, e.g. 2x+5,5x+4")->delimiter(',')->required();
}

void pipeline_flags(CLI::App* sub, Flags& fl) {
    forms_flags(sub, fl);
    sub->add_option("--tau", fl.tau, "reciprocal-sum threshold per prime string")->capture_default_str();
    sub->add_option("--budget", fl.budget, "primes available to the string search")->capture_default_str();
}

std::optional<unsigned> env_threads() {
    const char* v = std::getenv("SIGMA_SIGNLAB_THREADS");
    if (v == nullptr || *v == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long t = std::strtoul(v, &end, 10);
    if (*end != '\0') return std::nullopt;
    return static_cast<unsigned>(t);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Experiments on sigma over linear forms: sign scans, Euler-product densities, CRT constructions"};
    app.name(args.empty() ? "signlab" : args[0]);
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "table";
    std::string output;
    std::optional<unsigned> threads;
    int verbose = 0;
    bool quiet = false;
    app.add_option("--format", format, "table, csv or json")->check(CLI::IsMember({"table", "csv", "json"}))->capture_default_str();
    app.add_option("-o,--output", output, "write results to this file instead of stdout");
    app.add_option("--threads", threads, "worker threads (0 = all cores; default from SIGMA_SIGNLAB_THREADS)");
    app.add_flag("-v,--verbose", verbose, "more progress on stderr");
    app.add_flag("-q,--quiet", quiet, "no progress on stderr");

    Flags fl;
    std::vector<std::pair<CLI::App*, std::function<Output(const Flags&, const Context&)>>> commands;
    auto add = [&](const std::string& name, const std::string& help, auto handler) {
        CLI::App* sub = app.add_subcommand(name, help);
        commands.emplace_back(sub, handler);
        return sub;
    };

    auto* c = add("sigma", "sigma_s(n)", cmd_sigma);
    c->add_option("--n", fl.n)->required();
    c->add_option("--s", fl.s, "exponent: integer, fraction or decimal")->capture_default_str();

    c = add("phi", "Euler phi(n)", cmd_phi);
    c->add_option("--n", fl.n)->required();

    c = add("factor", "prime factorization of n", cmd_factor);
    c->add_option("--n", fl.n)->required();

    c = add("scan", "sign pattern of sigma_s(f(n)) - sigma_s(g(n)) for n <= limit", cmd_scan);
    c->add_option("--f", fl.f)->required();
    c->add_option("--g", fl.g)->required();
    c->add_option("--s", fl.s)->capture_default_str();
    c->add_option("--limit", fl.limit)->required();

    c = add("jarden", "check phi(qn+1) > phi(qn) for all n <= limit", cmd_jarden);
    c->add_option("--q", fl.q)->required();
    c->add_option("--limit", fl.limit)->required();

    c = add("ap-primes", "first primes p = m (mod q) above start", cmd_ap_primes);
    c->add_option("--q", fl.q)->required();
    c->add_option("--m", fl.m)->required();
    c->add_option("--count", fl.count)->capture_default_str();
    c->add_option("--start", fl.start)->capture_default_str();

    c = add("thm1-min-a", "least odd a with (a+2)^s 2^{s+1} < (2^{s+1}+1) a^s", cmd_thm1_min_a);
    c->add_option("--s", fl.s)->required();

    c = add("thm1-witnesses", "n <= limit where sigma_s(an+2) - sigma_s((a+1)n+1) has a certified sign", cmd_thm1_witnesses);
    c->add_option("--s", fl.s)->required();
    c->add_option("--a", fl.a)->required();
    c->add_option("--limit", fl.limit)->required();

    c = add("roots", "number of roots of f(n) = 0 (mod d)", cmd_roots);
    c->add_option("--f", fl.f)->required();
    c->add_option("--d", fl.d)->required();

    c = add("local-factor", "Euler factor S_p of f", cmd_local_factor);
    c->add_option("--f", fl.f)->required();
    c->add_option("--p", fl.p)->required();

    c = add("beta", "density constant sum N(d)/d^2 of f", cmd_beta);
    c->add_option("--f", fl.f)->required();

    c = add("ratio", "limit of sum sigma(f(n)) / sum sigma(g(n))", cmd_ratio);
    c->add_option("--f", fl.f)->required();
    c->add_option("--g", fl.g)->required();

    c = add("partial-sums", "exact partial sums of sigma(f(n)) and sigma(g(n)) at checkpoints", cmd_partial_sums);
    c->add_option("--f", fl.f)->required();
    c->add_option("--g", fl.g)->required();
    c->add_option("--checkpoints", fl.checkpoints)->delimiter(',')->capture_default_str();

    c = add("thm4-build", "constants A, B, C, G_k, p_start of an instance", cmd_thm4_build);
    forms_flags(c, fl);

    c = add("thm4-strings", "strings of consecutive primes with reciprocal sum > tau", cmd_thm4_strings);
    c->add_option("--start", fl.start)->required();
    c->add_option("--k", fl.k)->capture_default_str();
    c->add_option("--tau", fl.tau)->capture_default_str();
    c->add_option("--budget", fl.budget)->capture_default_str();

    c = add("thm4-crt", "solve the congruence system for P and n0", cmd_thm4_crt);
    pipeline_flags(c, fl);

    c = add("thm4-scan", "max Omega(L_i(mP + n0)) for m <= M", cmd_thm4_scan);
    pipeline_flags(c, fl);
    c->add_option("--M", fl.M, "scan m = 1..M")->capture_default_str();
    c->add_option("--bound", fl.bound, "Omega bound (default G_k)");

    c = add("thm4-check", "sigma(H_j(n)) > max_i sigma(L_i(n)) for every j", cmd_thm4_check);
    forms_flags(c, fl);
    c->add_option("--n", fl.n_text)->required();

    c = add("thm3-hunt", "search m with sigma(2m+5) > sigma(6m+17) and sigma(5m+4) > sigma(6m+7)", cmd_thm3_hunt);
    c->add_option("--budget", fl.budget, "frontier candidates to examine")->capture_default_str();
    c->add_option("--slack", fl.slack, "search for abundancy above 3 + slack")->capture_default_str();
    c->add_option("--max-witnesses", fl.max_witnesses, "stop after this many (0 = no limit)")->capture_default_str();
    c->add_option("--value-limit", fl.value_limit, "largest t = 2m+5 generated")->capture_default_str();

    std::vector<std::string> rev(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        err << "run with --help for usage\n";
        return 2;
    }

    Context ctx;
    ctx.err = &err;
    ctx.verbosity = quiet ? 0 : 1 + verbose;
    ctx.threads = threads ? *threads : env_threads().value_or(0);
    const Format fmt = format == "json" ? Format::json : format == "csv" ? Format::csv : Format::table;

    try {
        for (const auto& [sub, handler] : commands) {
            if (!sub->parsed()) continue;
            const auto t0 = std::chrono::steady_clock::now();
            const Output result = handler(fl, ctx);
            const std::string text = render(result, fmt);
            if (ctx.verbosity > 1) {
                const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                ctx.progress(sub->get_name() + " finished in " + fmt_double(secs) + " s");
            }
            if (output.empty()) {
                out << text << std::flush;
            } else {
                std::ofstream f(output, std::ios::binary);
                if (!f) throw Error("cannot open " + output + " for writing");
                f << text;
                if (!f) throw Error("writing " + output + " failed");
            }
            return 0;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        err << "error: budget exceeded: " << e.what() << "\n";
        return 1;
    } catch (const HypothesisError& e) {
        err << "error: hypothesis violated: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace signlab::cli

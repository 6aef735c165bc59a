#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "signlab/arith/factorize.hpp"
#include "signlab/arith/multiplicative.hpp"
#include "signlab/crt.hpp"
#include "signlab/density.hpp"
#include "signlab/errors.hpp"
#include "signlab/linear_form.hpp"
#include "signlab/progression.hpp"

namespace py = pybind11;
using namespace signlab;

namespace {

py::int_ to_py(const mpz_class& z) {
    return py::reinterpret_steal<py::int_>(PyLong_FromString(z.get_str().c_str(), nullptr, 10));
}

py::object to_py(const mpq_class& q) {
    return py::module_::import("fractions").attr("Fraction")(to_py(q.get_num()), to_py(q.get_den()));
}

// int, Fraction, or anything whose str() is "p/q" or "p"
mpq_class to_mpq(const py::handle& v) {
    if (py::isinstance<py::float_>(v)) return mpq_class(v.cast<double>());
    if (py::hasattr(v, "numerator") && py::hasattr(v, "denominator")) {
        mpq_class q(mpz_class(py::str(v.attr("numerator")).cast<std::string>()),
                    mpz_class(py::str(v.attr("denominator")).cast<std::string>()));
        q.canonicalize();
        return q;
    }
    mpq_class q(py::str(v).cast<std::string>());
    q.canonicalize();
    return q;
}

mpz_class to_mpz_py(const py::handle& v) { return mpz_class(py::str(v).cast<std::string>()); }

LinearForm form(const py::handle& v) {
    if (py::isinstance<py::str>(v)) return parse_form(v.cast<std::string>());
    const auto t = v.cast<std::pair<std::int64_t, std::int64_t>>();
    return LinearForm(t.first, t.second);
}

std::vector<LinearForm> forms(const py::iterable& vs) {
    std::vector<LinearForm> out;
    for (const auto& v : vs) out.push_back(form(v));
    return out;
}

arith::SigmaMode mode_of(const mpq_class& s) {
    if (s.get_den() == 1 && s.get_num().fits_slong_p()) return arith::ExactInteger{s.get_num().get_si()};
    return arith::Real{s.get_d()};
}

py::object sigma_value(const arith::SigmaValue& v) {
    if (const auto* q = std::get_if<mpq_class>(&v)) {
        if (q->get_den() == 1) return to_py(q->get_num());
        return to_py(*q);
    }
    return py::float_(std::get<double>(v));
}

py::dict instance_dict(const crt::TheoremFourInstance& inst) {
    py::dict d;
    py::list L, H;
    for (const auto& f : inst.L) L.append(f.str());
    for (const auto& f : inst.H) H.append(f.str());
    d["L"] = L;
    d["H"] = H;
    d["k"] = inst.k;
    d["A"] = inst.A;
    d["B"] = inst.B;
    d["C"] = inst.C;
    d["G_k"] = inst.G_k;
    d["p_start"] = inst.p_start;
    d["literal_threshold"] = to_py(crt::literal_threshold(inst));
    return d;
}

crt::TheoremFourInstance instance(const py::iterable& L, const py::iterable& H) {
    return crt::build_instance(forms(L), forms(H));
}

crt::CrtConstruction construct(const crt::TheoremFourInstance& inst, const py::handle& tau, std::uint64_t budget) {
    const auto prefix = crt::admissibility_check(inst.L, inst.p_start);
    if (!prefix.ok()) throw HypothesisError("L has the fixed prime divisor " + std::to_string(*prefix.obstructed_prime));
    const auto strings = crt::prime_strings(inst.p_start, inst.k, to_mpq(tau), budget);
    return crt::build_crt_system(inst, strings, prefix);
}

py::dict construction_dict(const crt::CrtConstruction& c) {
    py::dict d;
    d["P"] = to_py(c.P);
    d["n0"] = to_py(c.n0);
    py::list prefix;
    for (const auto& [p, r] : c.prefix) prefix.append(py::make_tuple(p, r));
    d["prefix"] = prefix;
    d["strings"] = c.strings;
    d["verified"] = c.verified;
    return d;
}

}  // namespace

PYBIND11_MODULE(_signlab, m) {
    m.doc() = "sigma over linear forms: sign scans, Euler-product densities, CRT constructions";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<HypothesisError>(m, "HypothesisError", base.ptr());
    py::register_exception<RangeError>(m, "RangeError", base.ptr());
    py::register_exception<ConstructionError>(m, "ConstructionError", base.ptr());
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());

    m.def("parse_form", [](const std::string& t) {
        const auto f = parse_form(t);
        return py::make_tuple(f.a, f.b);
    }, py::arg("text"));

    m.def("sigma", [](std::uint64_t n, const py::object& s) {
        return sigma_value(arith::sigma_s(arith::factorize(n), mode_of(to_mpq(s))));
    }, py::arg("n"), py::arg("s") = 1);

    m.def("phi", [](std::uint64_t n) { return arith::euler_phi(arith::factorize(n)); }, py::arg("n"));

    m.def("factorize", [](std::uint64_t n) {
        std::vector<std::pair<std::uint64_t, unsigned>> out;
        const auto f = arith::factorize(n);
        for (const auto& pe : f.factors()) out.emplace_back(pe.prime, pe.exponent);
        return out;
    }, py::arg("n"));

    m.def("scan_signs", [](const py::object& f, const py::object& g, const py::object& s, std::uint64_t N, unsigned threads) {
        const auto r = scan::scan_signs({form(f), form(g), mode_of(to_mpq(s))}, N, threads);
        py::dict d;
        d["n_max"] = r.n_max;
        d["count_pos"] = r.count_pos;
        d["count_neg"] = r.count_neg;
        d["count_zero"] = r.count_zero;
        d["sign_changes"] = r.sign_changes;
        d["first_pos"] = r.first_pos;
        d["first_neg"] = r.first_neg;
        d["first_zero"] = r.first_zero;
        d["near_ties"] = r.near_ties;
        return d;
    }, py::arg("f"), py::arg("g"), py::arg("s") = 1, py::arg("N"), py::arg("threads") = 0);

    m.def("phi_dominance_scan", &scan::phi_dominance_scan, py::arg("q"), py::arg("N"), py::arg("threads") = 0);
    m.def("prime_in_ap", &scan::prime_in_ap, py::arg("q"), py::arg("m"), py::arg("count"), py::arg("start") = 0);

    m.def("theorem1_min_a", [](const py::object& s) {
        const auto r = scan::theorem1_min_a(to_mpq(s));
        py::dict d;
        d["a"] = r.a;
        d["threshold"] = r.threshold;
        d["exact"] = r.exact;
        d["margin"] = r.margin;
        return d;
    }, py::arg("s"));

    m.def("theorem1_witnesses", [](const py::object& s, std::uint64_t a, std::uint64_t N) {
        const mpq_class sq = to_mpq(s);
        const auto w = scan::theorem1_witnesses(sq, a, N);
        // integral s gives exact decimal integers, otherwise %.17g reals
        const py::object num = py::module_::import("builtins").attr(sq.get_den() == 1 ? "int" : "float");
        auto conv = [&](const std::vector<scan::WitnessValue>& v) {
            py::list l;
            for (const auto& x : v) l.append(py::make_tuple(x.n, num(x.left), num(x.right)));
            return l;
        };
        py::dict d;
        d["negatives"] = conv(w.negatives);
        d["positives"] = conv(w.positives);
        d["failures"] = w.failures;
        return d;
    }, py::arg("s"), py::arg("a"), py::arg("N"));

    m.def("root_count", [](const py::object& f, std::uint64_t d) { return density::root_count_general(form(f), d); },
          py::arg("f"), py::arg("d"));
    m.def("local_factor", [](const py::object& f, std::uint64_t p) { return to_py(density::local_factor(form(f), p)); },
          py::arg("f"), py::arg("p"));
    m.def("beta", [](const py::object& f) {
        const auto b = density::beta(form(f));
        const auto e = density::numeric(b);
        return py::make_tuple(to_py(b.coeff), e.lo, e.hi);
    }, py::arg("f"), "(c, lo, hi) with beta = c * zeta(2) in [lo, hi]");
    m.def("predicted_ratio", [](const py::object& f, const py::object& g) {
        return to_py(density::predicted_ratio(form(f), form(g)));
    }, py::arg("f"), py::arg("g"));
    m.def("compare_partial_sums", [](const py::object& f, const py::object& g, const std::vector<std::uint64_t>& ks, unsigned threads) {
        arith::BatchOptions opts;
        opts.threads = threads;
        py::list out;
        for (const auto& r : density::compare_partial_sums(form(f), form(g), ks, opts)) {
            py::dict d;
            d["K"] = r.K;
            d["sum_f"] = to_py(r.sum_f);
            d["sum_g"] = to_py(r.sum_g);
            d["ratio"] = to_py(r.ratio);
            d["limit"] = to_py(r.limit);
            d["deviation"] = to_py(r.deviation);
            out.append(d);
        }
        return out;
    }, py::arg("f"), py::arg("g"), py::arg("checkpoints"), py::arg("threads") = 0);

    m.def("heath_brown_bound", &crt::heath_brown_bound, py::arg("k"));
    m.def("admissibility_check", [](const py::iterable& fs, std::uint64_t p_max) {
        const auto r = crt::admissibility_check(forms(fs), p_max);
        py::dict d;
        for (const auto& [p, n] : r.residues) d[py::int_(p)] = n;
        return py::make_tuple(d, r.obstructed_prime);
    }, py::arg("forms"), py::arg("p_max"), "(residues by prime, obstructed prime or None)");
    m.def("build_instance", [](const py::iterable& L, const py::iterable& H) { return instance_dict(instance(L, H)); },
          py::arg("L"), py::arg("H"));
    m.def("prime_strings", [](std::uint64_t start, std::size_t k, const py::object& tau, std::uint64_t budget) {
        return crt::prime_strings(start, k, to_mpq(tau), budget);
    }, py::arg("start"), py::arg("k"), py::arg("tau"), py::arg("budget") = 1000000);
    m.def("build_crt", [](const py::iterable& L, const py::iterable& H, const py::object& tau, std::uint64_t budget) {
        return construction_dict(construct(instance(L, H), tau, budget));
    }, py::arg("L"), py::arg("H"), py::arg("tau"), py::arg("budget") = 1000000);
    m.def("omega_bounded_scan", [](const py::iterable& L, const py::iterable& H, const py::object& tau, std::uint64_t M,
                                   std::optional<unsigned> bound, unsigned threads) {
        const auto inst = instance(L, H);
        const auto c = construct(inst, tau, 1000000);
        const auto s = crt::omega_bounded_scan(c, inst, M, bound.value_or(inst.G_k), threads);
        py::list rows;
        for (const auto& r : s.rows) rows.append(py::make_tuple(r.m, to_py(r.n), r.omega_max, r.qualified));
        py::dict d;
        d["rows"] = rows;
        d["hits"] = s.hits;
        d["reference_density"] = s.reference_density;
        return d;
    }, py::arg("L"), py::arg("H"), py::arg("tau"), py::arg("M"), py::arg("bound") = py::none(), py::arg("threads") = 0);
    m.def("simultaneous_check", [](const py::iterable& L, const py::iterable& H, const py::object& n) {
        const auto ev = crt::simultaneous_check(instance(L, H), to_mpz_py(n));
        py::list sl, sh;
        for (const auto& v : ev.sigma_L) sl.append(to_py(v));
        for (const auto& v : ev.sigma_H) sh.append(to_py(v));
        return py::make_tuple(ev.holds, sl, sh);
    }, py::arg("L"), py::arg("H"), py::arg("n"));
    m.def("abundancy_target_search", [](const py::object& target, std::size_t count, std::uint64_t budget,
                                        std::optional<std::pair<std::uint64_t, std::uint64_t>> constraint) {
        crt::AbundancySearchOptions opts;
        opts.constraint = constraint;
        std::vector<std::uint64_t> hits;
        const auto stats = crt::abundancy_target_search(to_mpq(target), budget, opts, [&](std::uint64_t t) {
            hits.push_back(t);
            return hits.size() < count;
        });
        return py::make_tuple(hits, stats.exhausted);
    }, py::arg("target"), py::arg("count"), py::arg("budget") = 1000000, py::arg("constraint") = py::none(),
       "(first `count` odd t with sigma(t)/t > target, budget exhausted)");
    m.def("theorem3_hunt", [](std::uint64_t budget, std::size_t max_witnesses) {
        crt::HuntOptions opts;
        opts.max_witnesses = max_witnesses;
        crt::HuntResult r;
        {
            py::gil_scoped_release release;
            r = crt::theorem3_hunt(budget, opts);
        }
        py::list ws;
        for (const auto& w : r.witnesses) {
            ws.append(py::make_tuple(w.m, to_py(w.s_2m5), to_py(w.s_6m17), to_py(w.s_5m4), to_py(w.s_6m7)));
        }
        return py::make_tuple(ws, r.stats.popped, r.stats.exhausted);
    }, py::arg("budget"), py::arg("max_witnesses") = 1);
}

#include <doctest.h>

#include "oracles.hpp"
#include "signlab/errors.hpp"
#include "signlab/progression.hpp"

using namespace signlab;
using namespace signlab::scan;

namespace {

int brute_sign(std::uint64_t x, std::uint64_t y, unsigned long s) {
    const mpz_class l = oracle::sigma(x, s), r = oracle::sigma(y, s);
    return (l > r) - (l < r);
}

// Reference tally straight from the definition: delete zeros, count alternations.
SignScanReport brute_scan(LinearForm f, LinearForm g, unsigned long s, std::uint64_t N) {
    SignScanReport r;
    r.n_max = N;
    std::vector<int> nonzero;
    for (std::uint64_t n = 1; n <= N; ++n) {
        const int sg = brute_sign(f.positive_at(n), g.positive_at(n), s);
        if (sg > 0) {
            ++r.count_pos;
            if (!r.first_pos) r.first_pos = n;
        } else if (sg < 0) {
            ++r.count_neg;
            if (!r.first_neg) r.first_neg = n;
        } else {
            ++r.count_zero;
            if (!r.first_zero) r.first_zero = n;
        }
        if (sg != 0) nonzero.push_back(sg);
    }
    for (std::size_t i = 1; i < nonzero.size(); ++i) r.sign_changes += nonzero[i] != nonzero[i - 1];
    return r;
}

void check_same(const SignScanReport& a, const SignScanReport& b) {
    CHECK(a.n_max == b.n_max);
    CHECK(a.count_pos == b.count_pos);
    CHECK(a.count_neg == b.count_neg);
    CHECK(a.count_zero == b.count_zero);
    CHECK(a.sign_changes == b.sign_changes);
    CHECK(a.first_pos == b.first_pos);
    CHECK(a.first_neg == b.first_neg);
    CHECK(a.first_zero == b.first_zero);
}

// Independent check of (a+2)^s 2^{s+1} < (2^{s+1} + 1) a^s in 128-bit integers.
bool small_condition(unsigned __int128 a, unsigned s) {
    unsigned __int128 l = 1, r = 1;
    for (unsigned i = 0; i < s; ++i) {
        l *= a + 2;
        r *= a;
    }
    const unsigned __int128 t = (unsigned __int128)1 << (s + 1);
    return l * t < r * (t + 1);
}

}  // namespace

TEST_CASE("scan_signs examples") {
    const auto r = scan_signs({LinearForm(30, 0), LinearForm(30, 1), arith::ExactInteger{1}}, 100);
    CHECK(r.count_pos == 100);
    CHECK(r.sign_changes == 0);

    const auto same = scan_signs({LinearForm(7, 3), LinearForm(7, 3), arith::ExactInteger{3}}, 50);
    CHECK(same.count_zero == 50);
    const auto same_real = scan_signs({LinearForm(7, 3), LinearForm(7, 3), arith::Real{1.5}}, 50);
    CHECK(same_real.count_zero == 50);

    const auto t1 = scan_signs({LinearForm(33, 2), LinearForm(34, 1), arith::ExactInteger{2}}, 10);
    CHECK(t1.first_zero == 1u);
    CHECK(t1.first_pos == 2u);
    CHECK(t1.first_neg == 3u);
    CHECK(t1.sign_changes >= 1);
    CHECK(t1.count_pos + t1.count_neg + t1.count_zero == 10);

    CHECK_THROWS_AS(scan_signs({LinearForm(3, -5), LinearForm(1, 0)}, 10), DomainError);
}

TEST_CASE("scan_signs agrees with brute force, across chunk and thread layouts") {
    struct Case {
        LinearForm f, g;
        unsigned long s;
    };
    for (const auto& c : {Case{LinearForm(33, 2), LinearForm(34, 1), 2}, Case{LinearForm(30, 0), LinearForm(30, 1), 1},
                          Case{LinearForm(2, 5), LinearForm(6, 17), 1}, Case{LinearForm(5, 4), LinearForm(6, 7), 1},
                          Case{LinearForm(3, 2), LinearForm(3, 1), 0}}) {
        const auto expect = brute_scan(c.f, c.g, c.s, 1000);
        for (unsigned threads : {1u, 3u}) {
            check_same(scan_signs({c.f, c.g, arith::ExactInteger{static_cast<long>(c.s)}}, 1000, threads), expect);
        }
    }
}

TEST_CASE("sign tally zero handling and merging") {
    SignTally t;
    t.push(1, 1);
    t.push(2, 0);
    t.push(3, 1);
    CHECK(t.report(3).sign_changes == 0);
    CHECK(t.report(3).count_zero == 1);
    t.push(4, 0);
    t.push(5, -1);
    CHECK(t.report(5).sign_changes == 1);

    // merging chunks at every split point equals one pass
    const std::vector<int> seq = {0, 1, 1, 0, -1, 0, 0, 1, -1, -1, 0, 1, 0};
    SignTally whole;
    for (std::size_t i = 0; i < seq.size(); ++i) whole.push(i + 1, seq[i]);
    for (std::size_t cut = 0; cut <= seq.size(); ++cut) {
        SignTally a, b;
        for (std::size_t i = 0; i < seq.size(); ++i) (i < cut ? a : b).push(i + 1, seq[i]);
        a.append(b);
        check_same(a.report(seq.size()), whole.report(seq.size()));
    }
}

TEST_CASE("scan antisymmetry") {
    oracle::SplitMix rng{99};
    for (int trial = 0; trial < 20; ++trial) {
        const LinearForm f(1 + rng.below(40), rng.below(30)), g(1 + rng.below(40), rng.below(30));
        const long s = static_cast<long>(rng.below(3));
        const std::uint64_t N = 1 + rng.below(1000);
        const auto fg = scan_signs({f, g, arith::ExactInteger{s}}, N, 2);
        const auto gf = scan_signs({g, f, arith::ExactInteger{s}}, N, 2);
        CHECK(fg.count_pos == gf.count_neg);
        CHECK(fg.count_neg == gf.count_pos);
        CHECK(fg.count_zero == gf.count_zero);
        CHECK(fg.sign_changes == gf.sign_changes);
    }
}

TEST_CASE("phi dominance") {
    CHECK_FALSE(phi_dominance_scan(30, 100000).has_value());
    CHECK(phi_dominance_scan(1, 10) == 1u);
    CHECK(phi_dominance_scan(3, 10) == 1u);
    // brute reference for a few moduli
    for (std::uint64_t q : {2u, 6u, 10u, 12u}) {
        std::optional<std::uint64_t> expect;
        for (std::uint64_t n = 1; n <= 300 && !expect; ++n) {
            if (oracle::phi(q * n + 1) <= oracle::phi(q * n)) expect = n;
        }
        CHECK(phi_dominance_scan(q, 300, 2) == expect);
    }
    CHECK_THROWS_AS(phi_dominance_scan(0, 10), DomainError);
}

TEST_CASE("primes in progression") {
    CHECK(prime_in_ap(2, 1, 3, 0) == std::vector<std::uint64_t>{3, 5, 7});
    CHECK(prime_in_ap(30, 1, 3, 0) == std::vector<std::uint64_t>{31, 61, 151});
    CHECK(prime_in_ap(30, -1, 2, 0) == std::vector<std::uint64_t>{29, 59});
    CHECK(prime_in_ap(30, 1, 1, 62) == std::vector<std::uint64_t>{151});
    CHECK(prime_in_ap(1, 0, 4, 10) == std::vector<std::uint64_t>{11, 13, 17, 19});
    CHECK_THROWS_AS(prime_in_ap(4, 2, 1, 0), HypothesisError);
}

TEST_CASE("minimal odd a") {
    const auto two = theorem1_min_a(2);
    CHECK(two.a == 33);
    CHECK(two.exact);
    CHECK(two.threshold == doctest::Approx(32.97).epsilon(1e-3));
    CHECK(small_condition(33, 2));
    CHECK_FALSE(small_condition(31, 2));
    CHECK(35 * 35 * 8 == 9800);
    CHECK(9 * 33 * 33 == 9801);

    CHECK(theorem1_min_a(3).a == 99);
    CHECK(small_condition(99, 3));
    CHECK_FALSE(small_condition(97, 3));

    CHECK_THROWS_AS(theorem1_min_a(1), DomainError);
    CHECK_THROWS_AS(theorem1_min_a(mpq_class(1, 2)), DomainError);

    // minimality against a direct search with the certified predicate
    for (long s = 2; s <= 6; ++s) {
        const auto r = theorem1_min_a(s);
        std::uint64_t a = 1;
        while (!small_condition(a, static_cast<unsigned>(s))) a += 2;
        CHECK(r.a == a);
    }
}

TEST_CASE("minimal odd a is monotone in s, including non-integral s") {
    std::uint64_t prev = 0;
    for (const mpq_class& s : {mpq_class(3, 2), mpq_class(2), mpq_class(5, 2), mpq_class(3), mpq_class(4)}) {
        const auto r = theorem1_min_a(s);
        CHECK(r.a % 2 == 1);
        CHECK(r.a >= prev);
        CHECK(r.margin > 0);
        CHECK(theorem1_condition(r.a, s));
        if (r.a >= 3) CHECK_FALSE(theorem1_condition(r.a - 2, s));
        prev = r.a;
    }
    CHECK_FALSE(theorem1_min_a(mpq_class(5, 2)).exact);
}

TEST_CASE("theorem 1 witnesses") {
    const auto w = theorem1_witnesses(2, 33, 20);
    auto has = [](const std::vector<WitnessValue>& v, std::uint64_t n) {
        return std::any_of(v.begin(), v.end(), [&](const WitnessValue& x) { return x.n == n; });
    };
    CHECK(has(w.negatives, 3));
    CHECK(has(w.negatives, 5));
    CHECK(has(w.positives, 4));
    CHECK(w.failures.empty());
    for (const auto& x : w.positives) {
        if (x.n == 4) {
            CHECK(x.left == "22450");
            CHECK(x.right == "18770");
        }
    }

    const auto none = theorem1_witnesses(2, 33, 2);
    CHECK(none.negatives.empty());
    CHECK(none.positives.empty());

    CHECK_THROWS_AS(theorem1_witnesses(2, 31, 10), HypothesisError);
    CHECK_THROWS_AS(theorem1_witnesses(2, 34, 10), HypothesisError);
}

TEST_CASE("theorem 1 witnesses re-verified by divisor enumeration") {
    for (auto [s, a] : {std::pair<unsigned long, std::uint64_t>{2, 33}, {3, 99}, {2, 35}}) {
        const auto w = theorem1_witnesses(static_cast<long>(s), a, 100);
        CHECK(w.failures.empty());
        CHECK_FALSE(w.negatives.empty());
        CHECK_FALSE(w.positives.empty());
        for (const auto& x : w.negatives) {
            CHECK(oracle::is_prime(a * x.n + 2));
            CHECK(brute_sign(a * x.n + 2, (a + 1) * x.n + 1, s) < 0);
            CHECK(x.left == oracle::sigma(a * x.n + 2, s).get_str());
        }
        for (const auto& x : w.positives) {
            CHECK(x.n % 2 == 0);
            CHECK(oracle::is_prime((a + 1) * x.n + 1));
            CHECK(brute_sign(a * x.n + 2, (a + 1) * x.n + 1, s) > 0);
        }
    }
    // non-integral exponent takes the real-valued path
    const auto half = theorem1_witnesses(mpq_class(5, 2), theorem1_min_a(mpq_class(5, 2)).a, 200);
    CHECK(half.failures.empty());
    CHECK_FALSE(half.positives.empty());
}

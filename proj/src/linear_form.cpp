#include "signlab/linear_form.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "signlab/errors.hpp"

namespace signlab {

LinearForm::LinearForm(std::int64_t slope, std::int64_t intercept) : a(slope), b(intercept) {
    if (a < 1) throw DomainError("linear form slope must be >= 1, got " + std::to_string(a));
}

mpz_class LinearForm::operator()(const mpz_class& n) const {
    mpz_class r = n * mpz_class(std::to_string(a));
    r += mpz_class(std::to_string(b));
    return r;
}

std::uint64_t LinearForm::positive_at(std::int64_t n) const {
    const i128 v = (*this)(n);
    if (v <= 0) {
        throw DomainError("form " + str() + " is nonpositive at n=" + std::to_string(n) + " (value " +
                          to_string(v) + ")");
    }
    if (v > i128(std::numeric_limits<std::uint64_t>::max())) {
        throw RangeError("form " + str() + " exceeds 64 bits at n=" + std::to_string(n));
    }
    return static_cast<std::uint64_t>(v);
}

std::string LinearForm::str() const {
    std::string s = (a == 1) ? "x" : std::to_string(a) + "x";
    if (b > 0) s += "+" + std::to_string(b);
    if (b < 0) s += std::to_string(b);
    return s;
}

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::int64_t parse_i64(std::string_view s, std::string_view whole) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DomainError("malformed linear form '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace

LinearForm parse_form(std::string_view text) {
    const auto bad = [&] { return DomainError("malformed linear form '" + std::string(text) + "' (expected ax+b)"); };
    const auto xpos = text.find('x');
    if (xpos == std::string_view::npos || text.find('x', xpos + 1) != std::string_view::npos) throw bad();

    const std::string_view slope = text.substr(0, xpos);
    const std::string_view rest = text.substr(xpos + 1);

    std::int64_t a = 1;
    if (!slope.empty()) {
        if (!all_digits(slope)) throw bad();
        a = parse_i64(slope, text);
    }
    std::int64_t b = 0;
    if (!rest.empty()) {
        if ((rest[0] != '+' && rest[0] != '-') || !all_digits(rest.substr(1))) throw bad();
        b = parse_i64(rest.substr(1), text);
        if (rest[0] == '-') b = -b;
    }
    return LinearForm(a, b);
}

std::string to_string(i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    u128 u = neg ? u128(-(v + 1)) + 1 : u128(v);
    std::string s;
    while (u != 0) {
        s.push_back(char('0' + int(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    std::reverse(s.begin(), s.end());
    return s;
}

}  // namespace signlab

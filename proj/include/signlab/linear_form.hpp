#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace signlab {

using i128 = __int128;
using u128 = unsigned __int128;

/// f(x) = a*x + b with slope a >= 1.
struct LinearForm {
    std::int64_t a = 1;
    std::int64_t b = 0;

    LinearForm() = default;
    /// Throws DomainError when a < 1.
    LinearForm(std::int64_t slope, std::int64_t intercept);

    i128 operator()(std::int64_t n) const { return i128(a) * n + b; }
    mpz_class operator()(const mpz_class& n) const;

    /// Value at n as an unsigned 64-bit integer; throws DomainError if
    /// nonpositive and RangeError if it does not fit.
    std::uint64_t positive_at(std::int64_t n) const;

    /// Canonical `ax+b` rendering: "x", "30x", "30x+1", "6x-17".
    std::string str() const;

    friend auto operator<=>(const LinearForm&, const LinearForm&) = default;
};

/// Parses `[a]x[+|-b]`. Throws DomainError on malformed text or a < 1.
LinearForm parse_form(std::string_view text);

std::string to_string(i128 v);

}  // namespace signlab

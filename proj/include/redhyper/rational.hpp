#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace redhyper
{
    /// Exact rational used for every density and threshold comparison.
    using Rational = boost::rational<std::int64_t>;

    /// Parses `a/b` or a bare integer `a`. Decimal notation is rejected.
    auto parse_rational(std::string_view text) -> Rational;

    /// Formats as `a/b`, or `a` when the denominator is 1.
    auto to_string(const Rational & r) -> std::string;

    auto ceil(const Rational & r) -> std::int64_t;
    auto floor(const Rational & r) -> std::int64_t;

    /// count >= bound, exactly.
    inline auto at_least(std::int64_t count, const Rational & bound) -> bool
    {
        return Rational{count} >= bound;
    }
}

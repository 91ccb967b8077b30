#include <redhyper/errors.hpp>
#include <redhyper/rational.hpp>

#include <charconv>

namespace redhyper
{
    namespace
    {
        auto parse_int(std::string_view text) -> std::int64_t
        {
            std::int64_t value = 0;
            auto first = text.data(), last = text.data() + text.size();
            if (first != last && *first == '+')
                ++first;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last || first == last)
                throw DomainError("not an exact rational: '" + std::string(text) + "' (expected a/b)");
            return value;
        }
    }

    auto parse_rational(std::string_view text) -> Rational
    {
        auto slash = text.find('/');
        if (slash == std::string_view::npos)
            return Rational{parse_int(text)};

        auto num = parse_int(text.substr(0, slash));
        auto den = parse_int(text.substr(slash + 1));
        if (den == 0)
            throw DomainError("zero denominator in '" + std::string(text) + "'");
        return Rational{num, den};
    }

    auto to_string(const Rational & r) -> std::string
    {
        if (r.denominator() == 1)
            return std::to_string(r.numerator());
        return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
    }

    auto floor(const Rational & r) -> std::int64_t
    {
        auto q = r.numerator() / r.denominator();
        if (r.numerator() % r.denominator() != 0 && r.numerator() < 0)
            --q;
        return q;
    }

    auto ceil(const Rational & r) -> std::int64_t
    {
        auto q = r.numerator() / r.denominator();
        if (r.numerator() % r.denominator() != 0 && r.numerator() > 0)
            ++q;
        return q;
    }
}

#pragma once

#include <gmpxx.h>

#include <cctype>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

#include "deformlab/errors.hpp"

namespace deformlab {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p" or "p/q" with optional leading sign. A zero denominator
/// raises division_by_zero; anything else malformed raises
/// std::invalid_argument.
inline Rational parse_rational(std::string_view text)
{
    auto is_int = [](std::string_view s) {
        if (!s.empty() && (s.front() == '-' || s.front() == '+'))
            s.remove_prefix(1);
        if (s.empty())
            return false;
        for (char c : s)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                return false;
        return true;
    };
    auto strip_plus = [](std::string_view s) {
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        return std::string(s);
    };

    auto slash = text.find('/');
    std::string_view num = text.substr(0, slash);
    if (!is_int(num))
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    if (slash == std::string_view::npos)
        return Rational(Integer(strip_plus(num)));
    std::string_view den = text.substr(slash + 1);
    if (!is_int(den) || den.front() == '-' || den.front() == '+')
        throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    Integer d{std::string(den)};
    if (d == 0)
        throw division_by_zero("zero denominator in '" + std::string(text) + "'");
    Rational q(Integer(strip_plus(num)), d);
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Integer lcm(const Integer& a, const Integer& b)
{
    Integer r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline long lcm(long a, long b) { return std::lcm(a, b); }

} // namespace deformlab

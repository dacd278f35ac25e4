#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars/rational.hpp"

namespace deformlab {

namespace detail {

using IntPoly = std::vector<long>;

inline IntPoly poly_div_exact(IntPoly num, const IntPoly& den)
{
    // den is monic
    const long n = static_cast<long>(num.size()) - 1;
    const long d = static_cast<long>(den.size()) - 1;
    IntPoly q(static_cast<std::size_t>(n - d + 1), 0);
    for (long i = n; i >= d; --i) {
        const long long c = num[i];
        q[i - d] = c;
        if (c != 0)
            for (long j = 0; j <= d; ++j)
                num[i - d + j] -= c * den[j];
    }
    return q;
}

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
inline const IntPoly& cyclotomic_polynomial(int n)
{
    static std::mutex mutex;
    static std::map<int, IntPoly> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(n); it != cache.end())
            return it->second;
    }
    IntPoly p(static_cast<std::size_t>(n) + 1, 0);
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d)
        if (n % d == 0)
            p = poly_div_exact(p, cyclotomic_polynomial(d));
    std::lock_guard lock(mutex);
    return cache.emplace(n, std::move(p)).first->second;
}

inline int euler_phi(int n)
{
    int result = n;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0)
                n /= p;
            result -= result / p;
        }
    }
    if (n > 1)
        result -= result / n;
    return result;
}

using RatPoly = std::vector<Rational>;

inline void trim(RatPoly& p)
{
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

/// Reduces p in place modulo the monic integer polynomial m.
inline void reduce_mod(RatPoly& p, const IntPoly& m)
{
    const std::size_t deg = m.size() - 1;
    for (std::size_t i = p.size(); i-- > deg;) {
        if (p[i] == 0)
            continue;
        Rational c = p[i];
        for (std::size_t j = 0; j <= deg; ++j)
            if (m[j] != 0)
                p[i - deg + j] -= c * m[j];
    }
    p.resize(deg);
}

inline std::pair<RatPoly, RatPoly> divmod(RatPoly a, const RatPoly& b)
{
    RatPoly q;
    trim(a);
    if (a.size() < b.size())
        return {q, a};
    const long n = static_cast<long>(a.size()) - 1;
    const long d = static_cast<long>(b.size()) - 1;
    q.assign(static_cast<std::size_t>(n - d + 1), 0);
    const Rational lead_inv = 1 / b.back();
    for (long i = n; i >= d; --i) {
        Rational c = a[i] * lead_inv;
        if (c != 0)
            for (long j = 0; j <= d; ++j)
                a[i - d + j] -= c * b[j];
        q[i - d] = std::move(c);
    }
    trim(a);
    return {q, a};
}

inline RatPoly poly_sub_mul(const RatPoly& a, const RatPoly& q, const RatPoly& b)
{
    // a - q*b
    RatPoly r(std::max(a.size(), q.size() + b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        r[i] = a[i];
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] -= q[i] * b[j];
    trim(r);
    return r;
}

} // namespace detail

/// An element of the cyclotomic field Q(zeta_n), stored as the unique
/// residue of degree < phi(n) modulo the n-th cyclotomic polynomial.
/// Rational values are always stored with order 1.
class Cyclotomic {
public:
    Cyclotomic() : order_(1), coeffs_(1) {}
    Cyclotomic(long value) : order_(1), coeffs_{Rational(value)} {}
    Cyclotomic(int value) : Cyclotomic(static_cast<long>(value)) {}
    Cyclotomic(Rational value) : order_(1), coeffs_{std::move(value)} {}

    /// zeta_n^power.
    static Cyclotomic zeta(int n, long power = 1)
    {
        if (n < 1)
            throw std::invalid_argument("cyclotomic order must be positive");
        long k = ((power % n) + n) % n;
        detail::RatPoly p(static_cast<std::size_t>(k) + 1, 0);
        p[k] = 1;
        return from_poly(std::move(p), n);
    }

    /// Canonical residue of sum_i p[i] zeta_n^i.
    static Cyclotomic from_poly(detail::RatPoly p, int n)
    {
        if (n < 1)
            throw std::invalid_argument("cyclotomic order must be positive");
        const auto& phi = detail::cyclotomic_polynomial(n);
        if (p.size() < phi.size())
            p.resize(phi.size() - 1, 0);
        else
            detail::reduce_mod(p, phi);
        Cyclotomic c;
        c.order_ = n;
        c.coeffs_ = std::move(p);
        c.canonicalize();
        return c;
    }

    int order() const { return order_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const { return order_ == 1 && coeffs_[0] == 0; }
    bool is_one() const { return order_ == 1 && coeffs_[0] == 1; }
    bool is_rational() const { return order_ == 1; }

    const Rational& rational() const
    {
        if (order_ != 1)
            throw std::domain_error("cyclotomic value is not rational");
        return coeffs_[0];
    }

    /// Coefficient vector of this value in the power basis of Q(zeta_L);
    /// order() must divide L.
    std::vector<Rational> coefficients_in(int L) const
    {
        if (L % order_ != 0)
            throw std::invalid_argument("cyclotomic order does not divide embedding order");
        const int phi_L = detail::euler_phi(L);
        if (order_ == L)
            return coeffs_;
        if (order_ == 1) {
            std::vector<Rational> v(phi_L, 0);
            v[0] = coeffs_[0];
            return v;
        }
        const int step = L / order_;
        detail::RatPoly p((coeffs_.size() - 1) * step + 1, 0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            p[i * step] = coeffs_[i];
        const auto& phi = detail::cyclotomic_polynomial(L);
        if (p.size() < phi.size())
            p.resize(phi.size() - 1, 0);
        else
            detail::reduce_mod(p, phi);
        return p;
    }

    Cyclotomic operator-() const
    {
        Cyclotomic r = *this;
        for (auto& c : r.coeffs_)
            c = -c;
        return r;
    }

    friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b)
    {
        if (a.order_ == 1 && b.order_ == 1)
            return Cyclotomic(Rational(a.coeffs_[0] + b.coeffs_[0]));
        if (b.is_zero())
            return a;
        if (a.is_zero())
            return b;
        const int L = std::lcm(a.order_, b.order_);
        auto x = a.coefficients_in(L);
        auto y = b.coefficients_in(L);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += y[i];
        return from_residue(std::move(x), L);
    }

    friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b)
    {
        if (a.order_ == 1 && b.order_ == 1)
            return Cyclotomic(Rational(a.coeffs_[0] - b.coeffs_[0]));
        return a + (-b);
    }

    friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b)
    {
        if (a.order_ == 1 && b.order_ == 1)
            return Cyclotomic(Rational(a.coeffs_[0] * b.coeffs_[0]));
        if (a.is_zero() || b.is_zero())
            return Cyclotomic();
        if (a.order_ == 1)
            return b.scaled(a.coeffs_[0]);
        if (b.order_ == 1)
            return a.scaled(b.coeffs_[0]);
        const int L = std::lcm(a.order_, b.order_);
        auto x = a.coefficients_in(L);
        auto y = b.coefficients_in(L);
        detail::RatPoly p(x.size() + y.size() - 1, 0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] == 0)
                continue;
            for (std::size_t j = 0; j < y.size(); ++j)
                if (y[j] != 0)
                    p[i + j] += x[i] * y[j];
        }
        return from_poly(std::move(p), L);
    }

    /// Multiplicative inverse; raises division_by_zero on zero.
    Cyclotomic inverse() const
    {
        if (is_zero())
            throw division_by_zero();
        if (order_ == 1)
            return Cyclotomic(Rational(1 / coeffs_[0]));
        // Extended Euclid in Q[x] against the cyclotomic polynomial.
        const auto& phi_int = detail::cyclotomic_polynomial(order_);
        detail::RatPoly r0(phi_int.begin(), phi_int.end());
        detail::RatPoly r1 = coeffs_;
        detail::trim(r1);
        detail::RatPoly s0, s1{1};
        while (!r1.empty()) {
            auto [q, r] = detail::divmod(r0, r1);
            detail::RatPoly s2 = detail::poly_sub_mul(s0, q, s1);
            r0 = std::move(r1);
            r1 = std::move(r);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        // r0 is a nonzero constant since the cyclotomic polynomial is irreducible.
        Rational c = 1 / r0[0];
        for (auto& x : s0)
            x *= c;
        return from_poly(std::move(s0), order_);
    }

    friend Cyclotomic operator/(const Cyclotomic& a, const Cyclotomic& b) { return a * b.inverse(); }

    Cyclotomic& operator+=(const Cyclotomic& o) { return *this = *this + o; }
    Cyclotomic& operator-=(const Cyclotomic& o) { return *this = *this - o; }
    Cyclotomic& operator*=(const Cyclotomic& o) { return *this = *this * o; }
    Cyclotomic& operator/=(const Cyclotomic& o) { return *this = *this / o; }

    Cyclotomic pow(long e) const
    {
        if (e < 0)
            return inverse().pow(-e);
        Cyclotomic result(1), base = *this;
        while (e > 0) {
            if (e & 1)
                result *= base;
            base *= base;
            e >>= 1;
        }
        return result;
    }

    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b)
    {
        if (a.order_ == b.order_)
            return a.coeffs_ == b.coeffs_;
        if (a.order_ == 1 || b.order_ == 1)
            return false; // non-rational values are never stored with order 1
        const int L = std::lcm(a.order_, b.order_);
        return a.coefficients_in(L) == b.coefficients_in(L);
    }

    /// Renders as an integer-coefficient polynomial in zeta_n over a
    /// common denominator, e.g. "(1 - zeta_4)/2".
    std::string to_string() const
    {
        if (order_ == 1)
            return coeffs_[0].get_str();
        Integer den = 1;
        for (const auto& c : coeffs_)
            den = lcm(den, Integer(c.get_den()));
        std::ostringstream os;
        bool first = true;
        int terms = 0;
        const std::string z = "zeta_" + std::to_string(order_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i] == 0)
                continue;
            ++terms;
            Integer a = Integer(coeffs_[i] * den);
            const bool neg = a < 0;
            if (neg)
                a = -a;
            if (first)
                os << (neg ? "-" : "");
            else
                os << (neg ? " - " : " + ");
            first = false;
            if (i == 0)
                os << a.get_str();
            else {
                if (a != 1)
                    os << a.get_str() << "*";
                os << z;
                if (i > 1)
                    os << "^" << i;
            }
        }
        if (den == 1)
            return os.str();
        if (terms == 1)
            return os.str() + "/" + den.get_str();
        return "(" + os.str() + ")/" + den.get_str();
    }

    friend std::ostream& operator<<(std::ostream& os, const Cyclotomic& c) { return os << c.to_string(); }

private:
    static Cyclotomic from_residue(std::vector<Rational> v, int n)
    {
        Cyclotomic c;
        c.order_ = n;
        c.coeffs_ = std::move(v);
        c.canonicalize();
        return c;
    }

    Cyclotomic scaled(const Rational& s) const
    {
        if (s == 0)
            return Cyclotomic();
        Cyclotomic r = *this;
        for (auto& c : r.coeffs_)
            c *= s;
        return r;
    }

    void canonicalize()
    {
        if (order_ == 1)
            return;
        if (std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](const Rational& c) { return c == 0; })) {
            Rational v = coeffs_.empty() ? Rational(0) : coeffs_[0];
            order_ = 1;
            coeffs_.assign(1, v);
        }
    }

    int order_;
    std::vector<Rational> coeffs_;
};

/// Canonical residue of an integer polynomial in zeta modulo Phi_n
/// (coefficients low degree first).
inline Cyclotomic reduce_cyclotomic(std::span<const long> poly, int n)
{
    detail::RatPoly p(poly.begin(), poly.end());
    return Cyclotomic::from_poly(std::move(p), n);
}

inline Cyclotomic invert_scalar(const Cyclotomic& x) { return x.inverse(); }

} // namespace deformlab

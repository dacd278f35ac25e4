#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars/cyclotomic.hpp"

namespace deformlab {

/// Interned name of a formal parameter (or polynomial variable).
using Symbol = std::uint32_t;

namespace detail {

class SymbolTable {
public:
    static SymbolTable& instance()
    {
        static SymbolTable table;
        return table;
    }

    Symbol intern(std::string_view name)
    {
        std::lock_guard lock(mutex_);
        auto it = ids_.find(std::string(name));
        if (it != ids_.end())
            return it->second;
        const auto id = static_cast<Symbol>(names_.size());
        names_.emplace_back(name);
        ids_.emplace(names_.back(), id);
        return id;
    }

    const std::string& name(Symbol s) const
    {
        std::lock_guard lock(mutex_);
        return names_.at(s);
    }

private:
    mutable std::mutex mutex_;
    std::deque<std::string> names_; // stable references
    std::unordered_map<std::string, Symbol> ids_;
};

} // namespace detail

inline Symbol symbol(std::string_view name) { return detail::SymbolTable::instance().intern(name); }
inline const std::string& symbol_name(Symbol s) { return detail::SymbolTable::instance().name(s); }

/// Power product of symbols, sorted by symbol id, exponents positive.
class Monomial {
public:
    using Power = std::pair<Symbol, std::uint32_t>;

    Monomial() = default;
    explicit Monomial(Symbol s, std::uint32_t e = 1)
    {
        if (e > 0)
            powers_.emplace_back(s, e);
    }

    const std::vector<Power>& powers() const { return powers_; }
    bool is_one() const { return powers_.empty(); }

    std::uint32_t degree() const
    {
        std::uint32_t d = 0;
        for (const auto& p : powers_)
            d += p.second;
        return d;
    }

    std::uint32_t exponent(Symbol s) const
    {
        for (const auto& p : powers_)
            if (p.first == s)
                return p.second;
        return 0;
    }

    friend Monomial operator*(const Monomial& a, const Monomial& b)
    {
        Monomial r;
        r.powers_.reserve(a.powers_.size() + b.powers_.size());
        auto i = a.powers_.begin(), j = b.powers_.begin();
        while (i != a.powers_.end() || j != b.powers_.end()) {
            if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first))
                r.powers_.push_back(*i++);
            else if (i == a.powers_.end() || j->first < i->first)
                r.powers_.push_back(*j++);
            else {
                r.powers_.emplace_back(i->first, i->second + j->second);
                ++i;
                ++j;
            }
        }
        return r;
    }

    bool divides(const Monomial& other) const
    {
        for (const auto& p : powers_)
            if (other.exponent(p.first) < p.second)
                return false;
        return true;
    }

    /// other / this; requires divides(other).
    Monomial cofactor_in(const Monomial& other) const
    {
        Monomial r;
        for (const auto& p : other.powers_) {
            const auto e = p.second - exponent(p.first);
            if (e > 0)
                r.powers_.emplace_back(p.first, e);
        }
        return r;
    }

    Monomial without(Symbol s) const
    {
        Monomial r;
        for (const auto& p : powers_)
            if (p.first != s)
                r.powers_.push_back(p);
        return r;
    }

    /// Degree-lexicographic monomial order (compatible with multiplication).
    friend int compare(const Monomial& a, const Monomial& b)
    {
        const auto da = a.degree(), db = b.degree();
        if (da != db)
            return da < db ? -1 : 1;
        auto i = a.powers_.begin(), j = b.powers_.begin();
        while (i != a.powers_.end() && j != b.powers_.end()) {
            if (i->first != j->first)
                return i->first < j->first ? 1 : -1;
            if (i->second != j->second)
                return i->second > j->second ? 1 : -1;
            ++i;
            ++j;
        }
        if (i != a.powers_.end())
            return 1;
        if (j != b.powers_.end())
            return -1;
        return 0;
    }

    friend bool operator<(const Monomial& a, const Monomial& b) { return compare(a, b) < 0; }
    friend bool operator==(const Monomial& a, const Monomial& b) { return a.powers_ == b.powers_; }

    /// Symbols rendered in name order, e.g. "c1*t^2".
    std::string to_string() const
    {
        std::vector<std::pair<std::string, std::uint32_t>> named;
        for (const auto& p : powers_)
            named.emplace_back(symbol_name(p.first), p.second);
        std::sort(named.begin(), named.end());
        std::string s;
        for (const auto& [name, e] : named) {
            if (!s.empty())
                s += "*";
            s += name;
            if (e > 1)
                s += "^" + std::to_string(e);
        }
        return s;
    }

private:
    std::vector<Power> powers_;
};

class ParamPoly;
using Substitution = std::map<Symbol, ParamPoly>;

/// Polynomial in formal parameters with cyclotomic coefficients.
class ParamPoly {
public:
    using Term = std::pair<Monomial, Cyclotomic>;

    ParamPoly() = default;
    ParamPoly(long c) : ParamPoly(Cyclotomic(c)) {}
    ParamPoly(int c) : ParamPoly(Cyclotomic(c)) {}
    ParamPoly(Rational c) : ParamPoly(Cyclotomic(std::move(c))) {}
    ParamPoly(Cyclotomic c)
    {
        if (!c.is_zero())
            terms_.emplace_back(Monomial(), std::move(c));
    }

    static ParamPoly variable(Symbol s) { return from_term(Monomial(s), Cyclotomic(1)); }
    static ParamPoly variable(std::string_view name) { return variable(symbol(name)); }

    static ParamPoly from_term(Monomial m, Cyclotomic c)
    {
        ParamPoly p;
        if (!c.is_zero())
            p.terms_.emplace_back(std::move(m), std::move(c));
        return p;
    }

    /// Terms in increasing monomial order, no zero coefficients.
    const std::vector<Term>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first.is_one()); }
    bool is_one() const { return is_constant() && !terms_.empty() && terms_[0].second.is_one(); }

    Cyclotomic constant_term() const
    {
        if (!terms_.empty() && terms_[0].first.is_one())
            return terms_[0].second;
        return Cyclotomic();
    }

    /// Value of a constant polynomial; throws std::domain_error otherwise.
    Cyclotomic constant() const
    {
        if (!is_constant())
            throw std::domain_error("parameter polynomial is not constant: " + to_string());
        return constant_term();
    }

    const Term& leading_term() const { return terms_.back(); }

    std::set<Symbol> symbols() const
    {
        std::set<Symbol> s;
        for (const auto& [m, c] : terms_)
            for (const auto& p : m.powers())
                s.insert(p.first);
        return s;
    }

    std::uint32_t total_degree() const
    {
        std::uint32_t d = 0;
        for (const auto& t : terms_)
            d = std::max(d, t.first.degree());
        return d;
    }

    std::uint32_t degree_in(Symbol s) const
    {
        std::uint32_t d = 0;
        for (const auto& t : terms_)
            d = std::max(d, t.first.exponent(s));
        return d;
    }

    ParamPoly operator-() const
    {
        ParamPoly r = *this;
        for (auto& t : r.terms_)
            t.second = -t.second;
        return r;
    }

    friend ParamPoly operator+(const ParamPoly& a, const ParamPoly& b) { return combine(a, b, false); }
    friend ParamPoly operator-(const ParamPoly& a, const ParamPoly& b) { return combine(a, b, true); }

    friend ParamPoly operator*(const ParamPoly& a, const ParamPoly& b)
    {
        if (a.is_zero() || b.is_zero())
            return ParamPoly();
        if (a.is_constant())
            return b.scaled(a.terms_[0].second);
        if (b.is_constant())
            return a.scaled(b.terms_[0].second);
        std::map<Monomial, Cyclotomic> acc;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                auto [it, inserted] = acc.try_emplace(ma * mb, ca * cb);
                if (!inserted)
                    it->second += ca * cb;
            }
        ParamPoly r;
        r.terms_.reserve(acc.size());
        for (auto& [m, c] : acc)
            if (!c.is_zero())
                r.terms_.emplace_back(m, std::move(c));
        return r;
    }

    ParamPoly& operator+=(const ParamPoly& o) { return *this = *this + o; }
    ParamPoly& operator-=(const ParamPoly& o) { return *this = *this - o; }
    ParamPoly& operator*=(const ParamPoly& o) { return *this = *this * o; }

    ParamPoly scaled(const Cyclotomic& s) const
    {
        if (s.is_zero())
            return ParamPoly();
        if (s.is_one())
            return *this;
        ParamPoly r = *this;
        for (auto& t : r.terms_)
            t.second *= s;
        return r;
    }

    ParamPoly pow(unsigned e) const
    {
        ParamPoly result(1), base = *this;
        while (e > 0) {
            if (e & 1)
                result *= base;
            e >>= 1;
            if (e)
                base *= base;
        }
        return result;
    }

    ParamPoly derivative(Symbol s) const
    {
        ParamPoly r;
        for (const auto& [m, c] : terms_) {
            const auto e = m.exponent(s);
            if (e == 0)
                continue;
            Monomial reduced = m.without(s) * Monomial(s, e - 1);
            r.terms_.emplace_back(std::move(reduced), c * Cyclotomic(static_cast<long>(e)));
        }
        r.normalize();
        return r;
    }

    /// Replaces the listed symbols by the given polynomials; other symbols
    /// are kept.
    ParamPoly substitute(const Substitution& sub) const
    {
        if (sub.empty())
            return *this;
        ParamPoly r;
        std::map<std::pair<Symbol, std::uint32_t>, ParamPoly> powers;
        for (const auto& [m, c] : terms_) {
            ParamPoly term(c);
            Monomial kept;
            for (const auto& [s, e] : m.powers()) {
                auto it = sub.find(s);
                if (it == sub.end()) {
                    kept = kept * Monomial(s, e);
                    continue;
                }
                auto key = std::make_pair(s, e);
                auto pit = powers.find(key);
                if (pit == powers.end())
                    pit = powers.emplace(key, it->second.pow(e)).first;
                term *= pit->second;
            }
            r += term * from_term(kept, Cyclotomic(1));
        }
        return r;
    }

    /// Full evaluation; every symbol must be assigned a constant.
    Cyclotomic evaluate(const std::map<Symbol, Cyclotomic>& values) const
    {
        Cyclotomic total;
        for (const auto& [m, c] : terms_) {
            Cyclotomic t = c;
            for (const auto& [s, e] : m.powers()) {
                auto it = values.find(s);
                if (it == values.end())
                    throw std::invalid_argument("no value for parameter " + symbol_name(s));
                t *= it->second.pow(e);
            }
            total += t;
        }
        return total;
    }

    /// Exact quotient this / d, or nullopt if d does not divide this.
    std::optional<ParamPoly> divide_exact(const ParamPoly& d) const
    {
        if (d.is_zero())
            throw division_by_zero();
        if (d.is_constant())
            return scaled(d.terms_[0].second.inverse());
        ParamPoly rem = *this;
        ParamPoly quot;
        const auto& [lm, lc] = d.leading_term();
        const Cyclotomic lc_inv = lc.inverse();
        while (!rem.is_zero()) {
            const auto& [rm, rc] = rem.leading_term();
            if (!lm.divides(rm))
                return std::nullopt;
            ParamPoly t = from_term(lm.cofactor_in(rm), rc * lc_inv);
            quot += t;
            rem -= t * d;
        }
        return quot;
    }

    friend bool operator==(const ParamPoly& a, const ParamPoly& b) { return a.terms_ == b.terms_; }

    std::string to_string() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        // highest terms first; ties broken by rendered monomial for stability
        std::vector<const Term*> order;
        for (const auto& t : terms_)
            order.push_back(&t);
        std::stable_sort(order.begin(), order.end(), [](const Term* x, const Term* y) {
            const auto dx = x->first.degree(), dy = y->first.degree();
            if (dx != dy)
                return dx > dy;
            return x->first.to_string() < y->first.to_string();
        });
        for (const Term* t : order) {
            const auto& [m, c] = *t;
            std::string cs = c.to_string();
            bool neg = false;
            if (c.is_rational() && c.rational() < 0) {
                neg = true;
                cs = (-c).to_string();
            }
            std::string body;
            if (m.is_one())
                body = cs;
            else if (cs == "1")
                body = m.to_string();
            else if (c.is_rational())
                body = cs + "*" + m.to_string();
            else
                body = "(" + cs + ")*" + m.to_string();
            if (s.empty())
                s = neg ? "-" + body : body;
            else
                s += (neg ? " - " : " + ") + body;
        }
        return s;
    }

private:
    static ParamPoly combine(const ParamPoly& a, const ParamPoly& b, bool subtract)
    {
        ParamPoly r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        auto i = a.terms_.begin(), j = b.terms_.begin();
        while (i != a.terms_.end() || j != b.terms_.end()) {
            int cmp;
            if (i == a.terms_.end())
                cmp = 1;
            else if (j == b.terms_.end())
                cmp = -1;
            else
                cmp = compare(i->first, j->first);
            if (cmp < 0) {
                r.terms_.push_back(*i++);
            } else if (cmp > 0) {
                r.terms_.emplace_back(j->first, subtract ? -j->second : j->second);
                ++j;
            } else {
                Cyclotomic c = subtract ? i->second - j->second : i->second + j->second;
                if (!c.is_zero())
                    r.terms_.emplace_back(i->first, std::move(c));
                ++i;
                ++j;
            }
        }
        return r;
    }

    void normalize()
    {
        std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
        std::vector<Term> merged;
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().first == t.first)
                merged.back().second += t.second;
            else
                merged.push_back(std::move(t));
        }
        std::erase_if(merged, [](const Term& t) { return t.second.is_zero(); });
        terms_ = std::move(merged);
    }

    std::vector<Term> terms_;
};

/// Quotient of parameter polynomials. No gcd cancellation is attempted;
/// equality is by cross-multiplication.
class ParamFraction {
public:
    ParamFraction() : den_(1) {}
    ParamFraction(long c) : num_(c), den_(1) {}
    ParamFraction(int c) : num_(c), den_(1) {}
    ParamFraction(Cyclotomic c) : num_(std::move(c)), den_(1) {}
    ParamFraction(ParamPoly num) : num_(std::move(num)), den_(1) {}
    ParamFraction(ParamPoly num, ParamPoly den) : num_(std::move(num)), den_(std::move(den))
    {
        if (den_.is_zero())
            throw division_by_zero("zero denominator in parameter fraction");
        tidy();
    }

    const ParamPoly& num() const { return num_; }
    const ParamPoly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_one(); }

    ParamFraction operator-() const { return ParamFraction(-num_, den_); }

    friend ParamFraction operator+(const ParamFraction& a, const ParamFraction& b)
    {
        if (a.den_ == b.den_)
            return ParamFraction(a.num_ + b.num_, a.den_);
        return ParamFraction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend ParamFraction operator-(const ParamFraction& a, const ParamFraction& b) { return a + (-b); }
    friend ParamFraction operator*(const ParamFraction& a, const ParamFraction& b)
    {
        return ParamFraction(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend ParamFraction operator/(const ParamFraction& a, const ParamFraction& b)
    {
        if (b.is_zero())
            throw division_by_zero();
        return ParamFraction(a.num_ * b.den_, a.den_ * b.num_);
    }
    ParamFraction& operator+=(const ParamFraction& o) { return *this = *this + o; }
    ParamFraction& operator-=(const ParamFraction& o) { return *this = *this - o; }
    ParamFraction& operator*=(const ParamFraction& o) { return *this = *this * o; }

    friend bool operator==(const ParamFraction& a, const ParamFraction& b)
    {
        return a.num_ * b.den_ == b.num_ * a.den_;
    }

    ParamFraction substitute(const Substitution& sub) const
    {
        return ParamFraction(num_.substitute(sub), den_.substitute(sub));
    }

    std::string to_string() const
    {
        if (den_.is_one())
            return num_.to_string();
        return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
    }

private:
    void tidy()
    {
        if (num_.is_zero()) {
            den_ = ParamPoly(1);
            return;
        }
        if (den_.is_constant()) {
            num_ = num_.scaled(den_.constant().inverse());
            den_ = ParamPoly(1);
            return;
        }
        if (auto q = num_.divide_exact(den_)) {
            num_ = std::move(*q);
            den_ = ParamPoly(1);
        }
    }

    ParamPoly num_;
    ParamPoly den_;
};

} // namespace deformlab

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/groups.hpp"
#include "deformlab/scalars.hpp"

namespace deformlab {

/// f / delta^k with delta the product of all hyperplane forms.
struct LocalizedPoly {
    ParamPoly num;
    std::size_t den_power = 0;

    LocalizedPoly() = default;
    LocalizedPoly(ParamPoly n, std::size_t k = 0) : num(std::move(n)), den_power(k) {}

    bool is_zero() const { return num.is_zero(); }
};

/// Reflection hyperplanes of a finite group acting on E = C^d, with
/// coordinate functions as polynomial symbols.
class Arrangement {
public:
    explicit Arrangement(FiniteGroup G) : group_(std::move(G)), data_(reflection_data(group_))
    {
        const std::size_t d = group_.dim();
        static const char* common[] = {"x", "y", "z", "w"};
        for (std::size_t i = 0; i < d; ++i)
            coords_.push_back(symbol(d <= 4 ? std::string(common[i]) : "x" + std::to_string(i + 1)));
        delta_ = ParamPoly(1);
        for (const auto& Y : data_) {
            alpha_.push_back(linear_form(Y.hyperplane_form));
            delta_ = delta_ * alpha_.back();
        }
        for (std::size_t y = 0; y < data_.size(); ++y) {
            ParamPoly rest(1);
            for (std::size_t z = 0; z < data_.size(); ++z)
                if (z != y)
                    rest = rest * alpha_[z];
            cofactor_.push_back(std::move(rest));
        }
        for (std::size_t g = 0; g < group_.order(); ++g) {
            substitution_.push_back(action_substitution(g));
            const auto moved = delta_.substitute(substitution_.back());
            const auto q = moved.divide_exact(delta_);
            if (!q || !q->is_constant())
                throw internal_error("group does not permute the reflection hyperplanes");
            character_.push_back(q->constant());
        }
        d_delta_.resize(d);
        for (std::size_t i = 0; i < d; ++i)
            d_delta_[i] = delta_.derivative(coords_[i]);
    }

    const FiniteGroup& group() const { return group_; }
    const std::vector<ReflectionDatum>& data() const { return data_; }
    const std::vector<Symbol>& coords() const { return coords_; }
    const ParamPoly& delta() const { return delta_; }
    const ParamPoly& alpha(std::size_t y) const { return alpha_[y]; }
    std::size_t dim() const { return group_.dim(); }

    ParamPoly coordinate(std::size_t i) const { return ParamPoly::variable(coords_[i]); }

    ParamPoly monomial(const std::vector<std::size_t>& exponents) const
    {
        ParamPoly m(1);
        for (std::size_t i = 0; i < exponents.size(); ++i)
            for (std::size_t e = 0; e < exponents[i]; ++e)
                m = m * coordinate(i);
        return m;
    }

    ParamPoly linear_form(const std::vector<Cyclotomic>& a) const
    {
        ParamPoly p;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!a[i].is_zero())
                p += coordinate(i).scaled(a[i]);
        return p;
    }

    /// (g f)(v) = f(g^{-1} v).
    LocalizedPoly act(std::size_t g, const LocalizedPoly& f) const
    {
        // g delta = chi(g) delta
        auto num = f.num.substitute(substitution_[g]);
        if (f.den_power > 0)
            num = num.scaled(character_[g].pow(-static_cast<long>(f.den_power)));
        return {std::move(num), f.den_power};
    }

    ParamPoly act(std::size_t g, const ParamPoly& f) const { return f.substitute(substitution_[g]); }

    /// Index of the hyperplane h Y.
    std::size_t moved_hyperplane(std::size_t h, std::size_t y) const
    {
        const auto& hinv = group_.matrix(group_.inverse(h));
        const std::size_t d = dim();
        std::vector<Cyclotomic> moved(d, Cyclotomic(0));
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                moved[j] += data_[y].hyperplane_form[k] * hinv(k, j);
        moved = detail::normalize_covector(std::move(moved));
        for (std::size_t z = 0; z < data_.size(); ++z)
            if (data_[z].hyperplane_form == moved)
                return z;
        throw internal_error("hyperplane image not found");
    }

    /// Divides out delta while it divides the numerator.
    LocalizedPoly reduce(LocalizedPoly f) const
    {
        if (f.num.is_zero())
            return {ParamPoly(), 0};
        while (f.den_power > 0) {
            auto q = f.num.divide_exact(delta_);
            if (!q)
                break;
            f.num = std::move(*q);
            --f.den_power;
        }
        return f;
    }

    /// a / delta^k == b / delta^l by cross-multiplication.
    bool equal(const LocalizedPoly& a, const LocalizedPoly& b) const
    {
        return a.num * delta_power(b.den_power) == b.num * delta_power(a.den_power);
    }

    LocalizedPoly add(const LocalizedPoly& a, const LocalizedPoly& b) const
    {
        const std::size_t k = std::max(a.den_power, b.den_power);
        return {a.num * delta_power(k - a.den_power) + b.num * delta_power(k - b.den_power), k};
    }

    LocalizedPoly subtract(const LocalizedPoly& a, const LocalizedPoly& b) const { return add(a, {-b.num, b.den_power}); }

    ParamPoly delta_power(std::size_t k) const
    {
        ParamPoly p(1);
        for (std::size_t i = 0; i < k; ++i)
            p = p * delta_;
        return p;
    }

    /// d/da of N / delta^k, over delta^{k+1}.
    LocalizedPoly derivative(const std::vector<Cyclotomic>& a, const LocalizedPoly& f) const
    {
        ParamPoly dN, dDelta;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (a[i].is_zero())
                continue;
            dN += f.num.derivative(coords_[i]).scaled(a[i]);
            dDelta += d_delta_[i].scaled(a[i]);
        }
        if (f.den_power == 0)
            return {dN, 0};
        const Cyclotomic k(static_cast<long>(f.den_power));
        return {dN * delta_ - (f.num * dDelta).scaled(k), f.den_power + 1};
    }

    /// delta / alpha_Y.
    const ParamPoly& cofactor(std::size_t y) const { return cofactor_[y]; }

private:
    Substitution action_substitution(std::size_t g) const
    {
        const auto& ginv = group_.matrix(group_.inverse(g));
        Substitution s;
        for (std::size_t i = 0; i < dim(); ++i) {
            std::vector<Cyclotomic> row(ginv.data().begin() + i * dim(), ginv.data().begin() + (i + 1) * dim());
            s.emplace(coords_[i], linear_form(row));
        }
        return s;
    }

    FiniteGroup group_;
    std::vector<ReflectionDatum> data_;
    std::vector<Symbol> coords_;
    std::vector<ParamPoly> alpha_, cofactor_, d_delta_;
    ParamPoly delta_;
    std::vector<Substitution> substitution_;
    std::vector<Cyclotomic> character_;
};

/// c_{Y,g} for each hyperplane Y (by index) and g in G_Y.
struct DunklParams {
    std::vector<std::map<std::size_t, ParamPoly>> c;

    ParamPoly at(std::size_t y, std::size_t g) const
    {
        auto it = c[y].find(g);
        return it == c[y].end() ? ParamPoly() : it->second;
    }

    /// c_{Y,g} = gamma for each nonidentity g of G_Y (one symbol per orbit
    /// and element of the representative's stabilizer), c_{Y,1} = minus
    /// their sum. Named gamma when there is a single parameter, else
    /// gamma1, gamma2, ...
    static DunklParams balanced(const Arrangement& arr)
    {
        const auto& G = arr.group();
        const auto& data = arr.data();
        DunklParams p;
        p.c.resize(data.size());
        std::size_t count = 0;
        for (std::size_t y = 0; y < data.size(); ++y)
            if (std::none_of(data.begin(), data.begin() + static_cast<long>(y),
                             [&](const ReflectionDatum& d) { return d.orbit == data[y].orbit; }))
                count += data[y].stabilizer_order - 1;
        std::size_t next = 0;
        for (std::size_t y = 0; y < data.size(); ++y) {
            const auto rep = static_cast<std::size_t>(
                std::find_if(data.begin(), data.end(),
                             [&](const ReflectionDatum& d) { return d.orbit == data[y].orbit; }) -
                data.begin());
            if (rep == y) {
                ParamPoly sum;
                for (std::size_t k = 1; k < data[y].stabilizer.size(); ++k) {
                    const auto name = count == 1 ? std::string("gamma") : "gamma" + std::to_string(++next);
                    auto v = ParamPoly::variable(name);
                    sum += v;
                    p.c[y][data[y].stabilizer[k]] = std::move(v);
                }
                p.c[y][G.identity()] = -sum;
                continue;
            }
            // transport from the orbit representative: c_{hY, h g h^-1} = c_{Y, g}
            for (std::size_t h = 0; h < G.order(); ++h)
                if (arr.moved_hyperplane(h, rep) == y) {
                    for (const auto& [g, v] : p.c[rep])
                        p.c[y][G.conjugate(h, g)] = v;
                    break;
                }
        }
        return p;
    }

    /// c_{hY, h g h^-1} = c_{Y, g} for generators h.
    bool is_invariant(const Arrangement& arr) const
    {
        const auto& G = arr.group();
        for (auto h : G.generators())
            for (std::size_t y = 0; y < arr.data().size(); ++y) {
                const auto z = arr.moved_hyperplane(h, y);
                for (auto g : arr.data()[y].stabilizer)
                    if (!(at(z, G.conjugate(h, g)) == at(y, g)))
                        return false;
            }
        return true;
    }
};

/// D_a f = d_a f + sum_Y (alpha_Y(a) / alpha_Y) sum_{g in G_Y} c_{Y,g} (g f),
/// reduced by powers of delta.
inline LocalizedPoly dunkl_apply(const Arrangement& arr, const DunklParams& params, const std::vector<Cyclotomic>& a,
                                 const LocalizedPoly& f)
{
    if (a.size() != arr.dim())
        throw dimension_mismatch("direction has the wrong length");
    if (params.c.size() != arr.data().size())
        throw dimension_mismatch("parameters do not match the arrangement");
    LocalizedPoly d = arr.derivative(a, f);
    if (d.den_power == f.den_power)
        d = {d.num * arr.delta(), f.den_power + 1};
    // everything over delta^{k+1}
    for (std::size_t y = 0; y < arr.data().size(); ++y) {
        Cyclotomic alpha_a(0);
        for (std::size_t i = 0; i < a.size(); ++i)
            alpha_a += arr.data()[y].hyperplane_form[i] * a[i];
        if (alpha_a.is_zero())
            continue;
        ParamPoly sum;
        for (const auto& [g, c] : params.c[y])
            if (!c.is_zero())
                sum += c * arr.act(g, f).num;
        if (!sum.is_zero())
            d.num += (arr.cofactor(y) * sum).scaled(alpha_a);
    }
    return arr.reduce(std::move(d));
}

inline LocalizedPoly dunkl_apply(const Arrangement& arr, const DunklParams& params, std::size_t coordinate,
                                 const LocalizedPoly& f)
{
    std::vector<Cyclotomic> a(arr.dim(), Cyclotomic(0));
    a[coordinate] = 1;
    return dunkl_apply(arr, params, a, f);
}

struct DunklCounterexample {
    std::size_t a = 0, b = 0;              ///< coordinate directions, or generator index and direction
    std::vector<std::size_t> monomial;     ///< exponents
    LocalizedPoly residual;
};

struct DunklCheck {
    std::optional<DunklCounterexample> counterexample;
    std::size_t evaluations = 0;
    std::size_t max_den_power = 0;
    bool ok() const { return !counterexample; }
};

namespace detail {

template <class Fn>
void for_each_monomial(std::size_t d, std::size_t degree_max, Fn&& fn)
{
    // degree by degree, exponents in lexicographic order
    for (std::size_t deg = 0; deg <= degree_max; ++deg) {
        std::vector<std::size_t> e(d, 0);
        std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t left) {
            if (i + 1 == d) {
                e[i] = left;
                return fn(e);
            }
            for (std::size_t k = left + 1; k-- > 0;) {
                e[i] = k;
                if (!rec(i + 1, left - k))
                    return false;
            }
            return true;
        };
        if (d == 0 || !rec(0, deg))
            return;
    }
}

} // namespace detail

/// [D_a, D_b] m for coordinate pairs a < b and monomials of degree <= degree_max.
inline DunklCheck commutator_check(const Arrangement& arr, const DunklParams& params, std::size_t degree_max)
{
    if (degree_max < 1)
        throw std::invalid_argument("degree_max must be at least 1");
    DunklCheck out;
    const std::size_t d = arr.dim();
    detail::for_each_monomial(d, degree_max, [&](const std::vector<std::size_t>& e) {
        const LocalizedPoly m(arr.monomial(e));
        std::vector<LocalizedPoly> first;
        for (std::size_t a = 0; a < d; ++a) {
            first.push_back(dunkl_apply(arr, params, a, m));
            out.max_den_power = std::max(out.max_den_power, first.back().den_power);
        }
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = a + 1; b < d; ++b) {
                const auto ab = dunkl_apply(arr, params, a, first[b]);
                const auto ba = dunkl_apply(arr, params, b, first[a]);
                out.max_den_power = std::max({out.max_den_power, ab.den_power, ba.den_power});
                ++out.evaluations;
                if (!arr.equal(ab, ba)) {
                    out.counterexample = DunklCounterexample{a, b, e, arr.reduce(arr.subtract(ab, ba))};
                    return false;
                }
            }
        return true;
    });
    return out;
}

/// g D_a g^{-1} = D_{g a} on monomials, for each generator g and coordinate a.
/// In a counterexample, `a` is the position of the generator in
/// group().generators() and `b` the coordinate.
inline DunklCheck equivariance_check(const Arrangement& arr, const DunklParams& params, std::size_t degree_max)
{
    DunklCheck out;
    const auto& G = arr.group();
    const std::size_t d = arr.dim();
    const auto& gens = G.generators();
    detail::for_each_monomial(d, degree_max, [&](const std::vector<std::size_t>& e) {
        const LocalizedPoly m(arr.monomial(e));
        for (std::size_t gi = 0; gi < gens.size(); ++gi) {
            const auto g = gens[gi];
            const auto& M = G.matrix(g);
            for (std::size_t a = 0; a < d; ++a) {
                std::vector<Cyclotomic> ga(d);
                for (std::size_t i = 0; i < d; ++i)
                    ga[i] = M(i, a);
                const auto lhs = arr.act(g, dunkl_apply(arr, params, a, arr.act(G.inverse(g), m)));
                const auto rhs = dunkl_apply(arr, params, ga, m);
                ++out.evaluations;
                if (!arr.equal(lhs, rhs)) {
                    out.counterexample = DunklCounterexample{gi, a, e, arr.reduce(arr.subtract(lhs, rhs))};
                    return false;
                }
            }
        }
        return true;
    });
    return out;
}

} // namespace deformlab

#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars.hpp"

namespace deformlab {

/// Finite-dimensional algebra e_i e_j = sum_k c_ij^k e_k.
class StructConstAlgebra {
public:
    using Vec = std::vector<Cyclotomic>;

    /// mult[i][j] is the coefficient vector of e_i e_j. Checks
    /// associativity and, if given, the unit axioms.
    StructConstAlgebra(std::vector<std::vector<Vec>> mult, std::optional<Vec> unit = std::nullopt)
        : mult_(std::move(mult)), unit_(std::move(unit))
    {
        const std::size_t d = mult_.size();
        for (const auto& row : mult_) {
            if (row.size() != d)
                throw dimension_mismatch("structure constants must be d x d x d");
            for (const auto& v : row)
                if (v.size() != d)
                    throw dimension_mismatch("structure constants must be d x d x d");
        }
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k)
                    if (multiply(multiply(basis(i), basis(j)), basis(k)) != multiply(basis(i), multiply(basis(j), basis(k))))
                        throw std::invalid_argument("structure constants are not associative");
        if (unit_) {
            if (unit_->size() != d)
                throw dimension_mismatch("unit has wrong length");
            for (std::size_t i = 0; i < d; ++i)
                if (multiply(*unit_, basis(i)) != basis(i) || multiply(basis(i), *unit_) != basis(i))
                    throw std::invalid_argument("unit axioms fail");
        }
    }

    std::size_t dim() const { return mult_.size(); }
    const std::optional<Vec>& unit() const { return unit_; }
    const Vec& product(std::size_t i, std::size_t j) const { return mult_[i][j]; }
    const std::vector<std::vector<Vec>>& structure() const { return mult_; }

    Vec basis(std::size_t i) const
    {
        Vec v(dim(), Cyclotomic(0));
        v[i] = 1;
        return v;
    }

    Vec multiply(const Vec& a, const Vec& b) const
    {
        Vec out(dim(), Cyclotomic(0));
        for (std::size_t i = 0; i < dim(); ++i) {
            if (a[i].is_zero())
                continue;
            for (std::size_t j = 0; j < dim(); ++j) {
                if (b[j].is_zero())
                    continue;
                const auto ab = a[i] * b[j];
                for (std::size_t k = 0; k < dim(); ++k)
                    if (!mult_[i][j][k].is_zero())
                        out[k] += ab * mult_[i][j][k];
            }
        }
        return out;
    }

    /// Q[x]/(x^n), basis 1, x, ..., x^{n-1}.
    static StructConstAlgebra truncated_polynomial(std::size_t n)
    {
        std::vector<std::vector<Vec>> m(n, std::vector<Vec>(n, Vec(n, Cyclotomic(0))));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; i + j < n; ++j)
                m[i][j][i + j] = 1;
        Vec unit(n, Cyclotomic(0));
        unit[0] = 1;
        return StructConstAlgebra(std::move(m), unit);
    }

    /// Group algebra of Z/n, basis 1, g, ..., g^{n-1}.
    static StructConstAlgebra cyclic_group_algebra(std::size_t n)
    {
        std::vector<std::vector<Vec>> m(n, std::vector<Vec>(n, Vec(n, Cyclotomic(0))));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                m[i][j][(i + j) % n] = 1;
        Vec unit(n, Cyclotomic(0));
        unit[0] = 1;
        return StructConstAlgebra(std::move(m), unit);
    }

    /// Structure constants in the basis f_i = sum_j P(j, i) e_j.
    StructConstAlgebra change_basis(const CycMatrix& P) const
    {
        const std::size_t d = dim();
        const auto Pinv = inverse(P);
        auto column = [&](const CycMatrix& m, std::size_t i) {
            Vec v(d);
            for (std::size_t j = 0; j < d; ++j)
                v[j] = m(j, i);
            return v;
        };
        std::vector<std::vector<Vec>> m(d, std::vector<Vec>(d));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                const auto prod = multiply(column(P, i), column(P, j));
                CycMatrix pv(d, 1);
                for (std::size_t k = 0; k < d; ++k)
                    pv(k, 0) = prod[k];
                m[i][j] = column(Pinv * pv, 0);
            }
        std::optional<Vec> u;
        if (unit_) {
            CycMatrix uv(d, 1);
            for (std::size_t k = 0; k < d; ++k)
                uv(k, 0) = (*unit_)[k];
            u = column(Pinv * uv, 0);
        }
        return StructConstAlgebra(std::move(m), u);
    }

private:
    std::vector<std::vector<Vec>> mult_;
    std::optional<Vec> unit_;
};

/// Multilinear map A^{(x)n} -> A, stored on basis tuples (first argument
/// most significant) with d output coordinates each.
class Cochain {
public:
    Cochain(std::size_t arity, std::size_t dim) : arity_(arity), dim_(dim), values_(ipow(dim, arity) * dim, Cyclotomic(0)) {}

    std::size_t arity() const { return arity_; }
    std::size_t dim() const { return dim_; }
    std::size_t tuples() const { return values_.size() / dim_; }
    std::size_t size() const { return values_.size(); }

    Cyclotomic& at(std::size_t tuple, std::size_t k) { return values_[tuple * dim_ + k]; }
    const Cyclotomic& at(std::size_t tuple, std::size_t k) const { return values_[tuple * dim_ + k]; }
    Cyclotomic& operator[](std::size_t flat) { return values_[flat]; }
    const Cyclotomic& operator[](std::size_t flat) const { return values_[flat]; }
    const std::vector<Cyclotomic>& values() const { return values_; }

    std::size_t index(const std::vector<std::size_t>& args) const
    {
        std::size_t t = 0;
        for (auto a : args)
            t = t * dim_ + a;
        return t;
    }

    std::vector<std::size_t> args(std::size_t tuple) const
    {
        std::vector<std::size_t> a(arity_);
        for (std::size_t i = arity_; i-- > 0;) {
            a[i] = tuple % dim_;
            tuple /= dim_;
        }
        return a;
    }

    bool is_zero() const
    {
        for (const auto& x : values_)
            if (!x.is_zero())
                return false;
        return true;
    }

    friend bool operator==(const Cochain& a, const Cochain& b)
    {
        return a.arity_ == b.arity_ && a.dim_ == b.dim_ && a.values_ == b.values_;
    }
    friend Cochain operator+(Cochain a, const Cochain& b)
    {
        check(a, b);
        for (std::size_t i = 0; i < a.values_.size(); ++i)
            a.values_[i] += b.values_[i];
        return a;
    }
    friend Cochain operator-(Cochain a, const Cochain& b)
    {
        check(a, b);
        for (std::size_t i = 0; i < a.values_.size(); ++i)
            a.values_[i] -= b.values_[i];
        return a;
    }
    Cochain operator-() const
    {
        Cochain r = *this;
        for (auto& x : r.values_)
            x = -x;
        return r;
    }

    static std::size_t ipow(std::size_t b, std::size_t e)
    {
        std::size_t r = 1;
        while (e--)
            r *= b;
        return r;
    }

private:
    static void check(const Cochain& a, const Cochain& b)
    {
        if (a.arity_ != b.arity_ || a.dim_ != b.dim_)
            throw dimension_mismatch("cochain shapes differ");
    }

    std::size_t arity_, dim_;
    std::vector<Cyclotomic> values_;
};

namespace detail {

// f evaluated on basis arguments, except that position pos holds the
// vector v.
inline StructConstAlgebra::Vec eval_with(const Cochain& f, std::vector<std::size_t> args, std::size_t pos,
                                         const StructConstAlgebra::Vec& v)
{
    const std::size_t d = f.dim();
    StructConstAlgebra::Vec out(d, Cyclotomic(0));
    for (std::size_t k = 0; k < d; ++k) {
        if (v[k].is_zero())
            continue;
        args[pos] = k;
        const std::size_t t = f.index(args);
        for (std::size_t m = 0; m < d; ++m)
            if (!f.at(t, m).is_zero())
                out[m] += v[k] * f.at(t, m);
    }
    return out;
}

inline StructConstAlgebra::Vec eval_basis(const Cochain& f, const std::vector<std::size_t>& args)
{
    const std::size_t t = f.index(args);
    return StructConstAlgebra::Vec(f.values().begin() + t * f.dim(), f.values().begin() + (t + 1) * f.dim());
}

inline std::size_t cochain_budget()
{
    if (const char* env = std::getenv("DEFORMLAB_COCHAIN_BUDGET"))
        return static_cast<std::size_t>(std::stoull(env));
    return 65536;
}

} // namespace detail

/// df(a_1..a_{n+1}) = f(a_1..a_n) a_{n+1}
///   + sum_{i=1..n} (-1)^{n-i+1} f(a_1.., a_i a_{i+1}, ..a_{n+1})
///   + (-1)^{n+1} a_1 f(a_2..a_{n+1}).
inline Cochain differential(const Cochain& f, const StructConstAlgebra& A)
{
    const std::size_t d = A.dim();
    if (f.dim() != d)
        throw dimension_mismatch("cochain and algebra dimensions differ");
    const std::size_t n = f.arity();
    Cochain df(n + 1, d);
    for (std::size_t t = 0; t < df.tuples(); ++t) {
        const auto a = df.args(t);
        StructConstAlgebra::Vec total(d, Cyclotomic(0));
        auto add = [&](const StructConstAlgebra::Vec& v, bool negative) {
            for (std::size_t k = 0; k < d; ++k)
                if (!v[k].is_zero())
                    total[k] += negative ? -v[k] : v[k];
        };
        // f(a_1..a_n) a_{n+1}
        std::vector<std::size_t> head(a.begin(), a.end() - 1);
        add(A.multiply(detail::eval_basis(f, head), A.basis(a[n])), false);
        // merges
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> merged;
            merged.insert(merged.end(), a.begin(), a.begin() + i);
            merged.push_back(0);
            merged.insert(merged.end(), a.begin() + i + 2, a.end());
            const bool negative = (n - (i + 1) + 1) % 2 == 1;
            add(detail::eval_with(f, merged, i, A.product(a[i], a[i + 1])), negative);
        }
        // a_1 f(a_2..a_{n+1})
        std::vector<std::size_t> tail(a.begin() + 1, a.end());
        add(A.multiply(A.basis(a[0]), detail::eval_basis(f, tail)), (n + 1) % 2 == 1);
        for (std::size_t k = 0; k < d; ++k)
            df.at(t, k) = std::move(total[k]);
    }
    return df;
}

/// Matrix of d: C^n -> C^{n+1} on the flat coordinates of cochains.
inline CycMatrix differential_matrix(const StructConstAlgebra& A, std::size_t n)
{
    const std::size_t d = A.dim();
    const std::size_t src = Cochain::ipow(d, n) * d, dst = Cochain::ipow(d, n + 1) * d;
    if (dst > detail::cochain_budget())
        throw size_budget_exceeded("cochain space of arity " + std::to_string(n + 1) + " has " + std::to_string(dst) +
                                   " entries, over the budget of " + std::to_string(detail::cochain_budget()));
    CycMatrix m(dst, src);
    for (std::size_t c = 0; c < src; ++c) {
        Cochain e(n, d);
        e[c] = 1;
        const auto de = differential(e, A);
        for (std::size_t r = 0; r < dst; ++r)
            if (!de[r].is_zero())
                m(r, c) = de[r];
    }
    return m;
}

inline std::size_t sparse_rank(const CycMatrix& m)
{
    // rank of the transpose; columns become sparse rows
    Echelon<Cyclotomic> e(m.rows());
    for (std::size_t c = 0; c < m.cols(); ++c) {
        SparseRow<Cyclotomic> row;
        for (std::size_t r = 0; r < m.rows(); ++r)
            if (!m(r, c).is_zero())
                row.emplace_back(r, m(r, c));
        e.insert(std::move(row));
    }
    return e.rank();
}

/// dim H^n for n = 0..n_max by rank-nullity.
inline std::vector<std::size_t> cohomology_dims(const StructConstAlgebra& A, std::size_t n_max)
{
    const std::size_t d = A.dim();
    if (Cochain::ipow(d, n_max + 1) * d > detail::cochain_budget())
        throw size_budget_exceeded("cochains up to arity " + std::to_string(n_max + 1) + " exceed the budget");
    std::vector<std::size_t> ranks;
    for (std::size_t n = 0; n <= n_max; ++n)
        ranks.push_back(sparse_rank(differential_matrix(A, n)));
    std::vector<std::size_t> dims;
    for (std::size_t n = 0; n <= n_max; ++n)
        dims.push_back(Cochain::ipow(d, n) * d - ranks[n] - (n ? ranks[n - 1] : 0));
    return dims;
}

/// Center of A, by solving [z, e_i] = 0 directly.
inline std::size_t center_dim(const StructConstAlgebra& A)
{
    const std::size_t d = A.dim();
    CycMatrix m(d * d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                m(i * d + k, j) = A.product(j, i)[k] - A.product(i, j)[k];
    return d - rank(m);
}

struct DeformationSeries {
    std::size_t order = 0;
    std::vector<Cochain> maps; ///< mu_1..mu_order
};

struct ObstructionClass {
    std::size_t order = 0;
    Cochain cocycle{3, 1};                 ///< b_order
    std::vector<Cyclotomic> class_coords; ///< in the reported basis of H^3
    bool vanishes = false;
};

struct DeformationOutcome {
    DeformationSeries series; ///< all orders that were solved
    std::optional<ObstructionClass> obstruction;
    bool ok() const { return !obstruction; }
};

/// b_k(a,b,c) = sum_{s=1}^{k-1} [mu_s(mu_{k-s}(a,b),c) - mu_s(a,mu_{k-s}(b,c))]
/// with mu_0 excluded, so that the order-k associativity equation reads
/// d(mu_k) + b_k = 0.
inline Cochain lower_order_residual(const StructConstAlgebra& A, const std::vector<Cochain>& mu, std::size_t k)
{
    const std::size_t d = A.dim();
    Cochain b(3, d);
    for (std::size_t t = 0; t < b.tuples(); ++t) {
        const auto a = b.args(t);
        for (std::size_t s = 1; s < k; ++s) {
            const auto& ms = mu[s - 1];
            const auto& mks = mu[k - s - 1];
            const auto left = detail::eval_with(ms, {0, a[2]}, 0, detail::eval_basis(mks, {a[0], a[1]}));
            const auto right = detail::eval_with(ms, {a[0], 0}, 1, detail::eval_basis(mks, {a[1], a[2]}));
            for (std::size_t m = 0; m < d; ++m)
                b.at(t, m) += left[m] - right[m];
        }
    }
    return b;
}

/// sum_{s=0}^{k} mu_s(mu_{k-s}(a,b),c) - mu_s(a,mu_{k-s}(b,c)) with mu_0 the
/// product of A; zero iff the order-k associativity equation holds.
inline Cochain associativity_residual(const StructConstAlgebra& A, const std::vector<Cochain>& mu, std::size_t k)
{
    const std::size_t d = A.dim();
    Cochain mu0(2, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t m = 0; m < d; ++m)
                mu0.at(i * d + j, m) = A.product(i, j)[m];
    std::vector<Cochain> all{mu0};
    all.insert(all.end(), mu.begin(), mu.end());
    Cochain r(3, d);
    for (std::size_t t = 0; t < r.tuples(); ++t) {
        const auto a = r.args(t);
        for (std::size_t s = 0; s <= k; ++s) {
            const auto left = detail::eval_with(all[s], {0, a[2]}, 0, detail::eval_basis(all[k - s], {a[0], a[1]}));
            const auto right = detail::eval_with(all[s], {a[0], 0}, 1, detail::eval_basis(all[k - s], {a[1], a[2]}));
            for (std::size_t m = 0; m < d; ++m)
                r.at(t, m) += left[m] - right[m];
        }
    }
    return r;
}

/// Coordinates of the class of a 3-cocycle in H^3. The basis of H^3 is
/// the set of kernel vectors of d_3 (nullspace order) that are
/// independent modulo the image of d_2, taken in order.
inline std::vector<Cyclotomic> h3_coordinates(const StructConstAlgebra& A, const Cochain& z)
{
    const auto D2 = differential_matrix(A, 2);
    const auto D3 = differential_matrix(A, 3);
    const std::size_t N = D2.rows();
    std::vector<std::vector<Cyclotomic>> spanning;
    for (std::size_t c = 0; c < D2.cols(); ++c) {
        std::vector<Cyclotomic> v(N);
        for (std::size_t r = 0; r < N; ++r)
            v[r] = D2(r, c);
        spanning.push_back(std::move(v));
    }
    const std::size_t image_count = spanning.size();
    for (auto& v : nullspace(D3))
        spanning.push_back(std::move(v));
    // columns: image generators then kernel vectors; keep pivots
    CycMatrix M(N, spanning.size());
    for (std::size_t c = 0; c < spanning.size(); ++c)
        for (std::size_t r = 0; r < N; ++r)
            M(r, c) = spanning[c][r];
    const auto pivots = independent_columns(M);
    std::vector<std::size_t> image_basis, h3_basis;
    for (auto p : pivots)
        (p < image_count ? image_basis : h3_basis).push_back(p);
    CycMatrix B(N, pivots.size());
    for (std::size_t c = 0; c < pivots.size(); ++c)
        for (std::size_t r = 0; r < N; ++r)
            B(r, c) = M(r, pivots[c]);
    const auto x = solve(B, z.values());
    if (!x)
        throw not_a_cocycle("obstruction is not a 3-cocycle");
    return std::vector<Cyclotomic>(x->begin() + static_cast<long>(image_basis.size()), x->end());
}

/// Solves the associativity equations order by order from mu_1, choosing
/// at each order the solution of d(mu_k) = -b_k with free coordinates
/// zero. Stops with the obstruction class at the first unsolvable order.
inline DeformationOutcome solve_deformation(const StructConstAlgebra& A, const Cochain& mu1, std::size_t N)
{
    const std::size_t d = A.dim();
    if (mu1.arity() != 2 || mu1.dim() != d)
        throw dimension_mismatch("mu1 must be a 2-cochain on A");
    if (!differential(mu1, A).is_zero())
        throw not_a_cocycle("mu1 is not a Hochschild 2-cocycle");
    DeformationOutcome out;
    out.series.maps.push_back(mu1);
    out.series.order = 1;
    if (N < 2)
        return out;
    const auto D2 = differential_matrix(A, 2);
    for (std::size_t k = 2; k <= N; ++k) {
        const Cochain b = lower_order_residual(A, out.series.maps, k);
        if (!differential(b, A).is_zero())
            throw internal_error("b_" + std::to_string(k) + " is not a cocycle");
        const auto x = solve(D2, (-b).values());
        if (!x) {
            ObstructionClass obs;
            obs.order = k;
            obs.cocycle = b;
            obs.class_coords = h3_coordinates(A, b);
            obs.vanishes = std::all_of(obs.class_coords.begin(), obs.class_coords.end(),
                                       [](const Cyclotomic& c) { return c.is_zero(); });
            if (obs.vanishes)
                throw internal_error("unsolvable order with a vanishing obstruction class");
            out.obstruction = std::move(obs);
            return out;
        }
        Cochain mk(2, d);
        for (std::size_t i = 0; i < x->size(); ++i)
            mk[i] = (*x)[i];
        out.series.maps.push_back(std::move(mk));
        out.series.order = k;
        if (!associativity_residual(A, out.series.maps, k).is_zero())
            throw internal_error("associativity residual is nonzero at order " + std::to_string(k));
    }
    for (std::size_t k = 1; k <= out.series.order; ++k)
        if (!associativity_residual(A, out.series.maps, k).is_zero())
            throw internal_error("associativity residual is nonzero at order " + std::to_string(k));
    return out;
}

struct PoissonVerdict {
    bool ok = true;
    std::array<std::size_t, 3> triple{};
    ParamPoly residual;
};

/// {f, g} = sum_{i,j} d_i f d_j g B_ij for the bracket table B on the
/// given coordinate symbols.
inline ParamPoly poisson_bracket(const std::vector<Symbol>& vars, const std::vector<std::vector<ParamPoly>>& B,
                                 const ParamPoly& f, const ParamPoly& g)
{
    ParamPoly r;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        const auto fi = f.derivative(vars[i]);
        if (fi.is_zero())
            continue;
        for (std::size_t j = 0; j < vars.size(); ++j)
            if (!B[i][j].is_zero())
                r += fi * g.derivative(vars[j]) * B[i][j];
    }
    return r;
}

/// Jacobi identity on all coordinate triples i < j < k.
inline PoissonVerdict poisson_check(const std::vector<Symbol>& vars, const std::vector<std::vector<ParamPoly>>& B)
{
    const std::size_t m = vars.size();
    if (B.size() != m)
        throw dimension_mismatch("bracket table size differs from variable count");
    for (std::size_t i = 0; i < m; ++i) {
        if (B[i].size() != m)
            throw dimension_mismatch("bracket table must be square");
        if (!B[i][i].is_zero())
            throw std::invalid_argument("bracket table must have zero diagonal");
        for (std::size_t j = 0; j < i; ++j)
            if (!(B[i][j] == -B[j][i]))
                throw std::invalid_argument("bracket table must be antisymmetric");
    }
    std::vector<ParamPoly> x;
    for (auto s : vars)
        x.push_back(ParamPoly::variable(s));
    PoissonVerdict v;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
                const auto r = poisson_bracket(vars, B, x[i], B[j][k]) + poisson_bracket(vars, B, x[j], B[k][i]) +
                               poisson_bracket(vars, B, x[k], B[i][j]);
                if (!r.is_zero()) {
                    v.ok = false;
                    v.triple = {i, j, k};
                    v.residual = r;
                    return v;
                }
            }
    return v;
}

} // namespace deformlab

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars.hpp"

namespace deformlab {

struct GroupElement {
    CycMatrix matrix;
    std::string label;
};

using ConjugacyClass = std::vector<std::size_t>;

/// A finite matrix group with its multiplication table. Element 0 is the
/// identity.
class FiniteGroup {
public:
    std::size_t order() const { return elements_.size(); }
    std::size_t dim() const { return dim_; }
    std::size_t identity() const { return 0; }

    const CycMatrix& matrix(std::size_t i) const { return elements_[i].matrix; }
    const GroupElement& element(std::size_t i) const { return elements_[i]; }
    const std::vector<GroupElement>& elements() const { return elements_; }

    /// Indices of the generators passed to generate_group.
    const std::vector<std::size_t>& generators() const { return generators_; }

    std::size_t mult(std::size_t a, std::size_t b) const { return table_[a * order() + b]; }
    std::size_t inverse(std::size_t a) const { return inverse_[a]; }
    std::size_t conjugate(std::size_t h, std::size_t g) const { return mult(mult(h, g), inverse(h)); }

    /// Smallest common cyclotomic order containing every entry.
    int field_order() const { return field_order_; }

    std::optional<std::size_t> find(const CycMatrix& m) const
    {
        if (m.rows() != dim_ || m.cols() != dim_)
            return std::nullopt;
        for (const auto& x : m.data())
            if (field_order_ % x.order() != 0)
                return std::nullopt;
        auto it = index_.find(key(m));
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    /// Multiplicative order of element i.
    std::size_t element_order(std::size_t i) const
    {
        std::size_t k = 1;
        for (std::size_t x = i; x != identity(); x = mult(x, i))
            ++k;
        return k;
    }

private:
    friend FiniteGroup generate_group(const std::vector<GroupElement>&, std::size_t);

    std::string key(const CycMatrix& m) const
    {
        std::string k;
        for (const auto& x : m.data()) {
            for (const auto& c : x.coefficients_in(field_order_)) {
                k += c.get_str();
                k += ',';
            }
            k += ';';
        }
        return k;
    }

    std::size_t dim_ = 0;
    int field_order_ = 1;
    std::vector<GroupElement> elements_;
    std::vector<std::size_t> generators_;
    std::vector<std::size_t> table_;
    std::vector<std::size_t> inverse_;
    std::unordered_map<std::string, std::size_t> index_;
};

inline constexpr std::size_t kDefaultMaxOrder = 1000;

/// Closure of gens under multiplication; throws order_bound_exceeded once
/// more than max_order elements appear.
inline FiniteGroup generate_group(const std::vector<GroupElement>& gens, std::size_t max_order = kDefaultMaxOrder)
{
    if (gens.empty())
        throw std::invalid_argument("generate_group needs at least one generator (use the identity)");
    if (max_order < 1)
        throw std::invalid_argument("max_order must be positive");
    FiniteGroup G;
    G.dim_ = gens.front().matrix.rows();
    for (const auto& g : gens) {
        if (!g.matrix.is_square() || g.matrix.rows() != G.dim_)
            throw dimension_mismatch("generators must be square matrices of one size");
        if (rank(g.matrix) != G.dim_)
            throw division_by_zero("generator '" + g.label + "' is not invertible");
        for (const auto& x : g.matrix.data())
            G.field_order_ = static_cast<int>(std::lcm(G.field_order_, x.order()));
    }

    auto add = [&](CycMatrix m, std::string label) -> std::size_t {
        auto k = G.key(m);
        if (auto it = G.index_.find(k); it != G.index_.end())
            return it->second;
        if (G.elements_.size() == max_order)
            throw order_bound_exceeded("group closure exceeds " + std::to_string(max_order) + " elements");
        G.index_.emplace(std::move(k), G.elements_.size());
        G.elements_.push_back({std::move(m), std::move(label)});
        return G.elements_.size() - 1;
    };

    add(CycMatrix::identity(G.dim_), "1");
    for (const auto& g : gens)
        G.generators_.push_back(add(g.matrix, g.label));
    for (std::size_t i = 0; i < G.elements_.size(); ++i)
        for (std::size_t s = 0; s < gens.size(); ++s)
            add(G.elements_[i].matrix * gens[s].matrix, "");

    const std::size_t n = G.order();
    G.table_.resize(n * n);
    G.inverse_.resize(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const auto c = G.index_.find(G.key(G.elements_[a].matrix * G.elements_[b].matrix));
            if (c == G.index_.end())
                throw internal_error("group closure is not closed under multiplication");
            G.table_[a * n + b] = c->second;
            if (c->second == 0)
                G.inverse_[a] = b;
        }
    return G;
}

inline FiniteGroup generate_group(const std::vector<CycMatrix>& gens, std::size_t max_order = kDefaultMaxOrder)
{
    std::vector<GroupElement> e;
    for (std::size_t i = 0; i < gens.size(); ++i)
        e.push_back({gens[i], "g" + std::to_string(i + 1)});
    return generate_group(e, max_order);
}

inline FiniteGroup trivial_group(std::size_t dim) { return generate_group({CycMatrix::identity(dim)}); }

/// Partition of the elements into conjugacy classes, ordered by smallest
/// member (so the identity class comes first).
inline std::vector<ConjugacyClass> conjugacy_classes(const FiniteGroup& G)
{
    std::vector<long> class_of(G.order(), -1);
    std::vector<ConjugacyClass> classes;
    for (std::size_t x = 0; x < G.order(); ++x) {
        if (class_of[x] >= 0)
            continue;
        ConjugacyClass c;
        for (std::size_t h = 0; h < G.order(); ++h) {
            const auto y = G.conjugate(h, x);
            if (class_of[y] < 0) {
                class_of[y] = static_cast<long>(classes.size());
                c.push_back(y);
            }
        }
        std::sort(c.begin(), c.end());
        classes.push_back(std::move(c));
    }
    return classes;
}

/// rank(g - 1).
inline std::size_t fixed_rank(const CycMatrix& g) { return rank(g - CycMatrix::identity(g.rows())); }

/// Skew-symmetric nondegenerate bilinear form.
class SympForm {
public:
    explicit SympForm(CycMatrix m) : m_(std::move(m))
    {
        if (!m_.is_square() || m_.rows() % 2 != 0)
            throw dimension_mismatch("symplectic form needs an even-dimensional square matrix");
        if (!(m_.transpose() == -m_))
            throw not_symplectic("form is not skew-symmetric");
        if (rank(m_) != m_.rows())
            throw not_symplectic("form is degenerate");
    }

    /// [[0, I], [-I, 0]] on C^{2n}.
    static SympForm standard(std::size_t dim)
    {
        CycMatrix m(dim, dim);
        const std::size_t n = dim / 2;
        for (std::size_t i = 0; i < n; ++i) {
            m(i, n + i) = 1;
            m(n + i, i) = -1;
        }
        return SympForm(std::move(m));
    }

    const CycMatrix& matrix() const { return m_; }
    std::size_t dim() const { return m_.rows(); }

    bool preserved_by(const CycMatrix& g) const { return g.transpose() * m_ * g == m_; }

private:
    CycMatrix m_;
};

/// Conjugacy classes of symplectic reflections (rank(g-1) = 2). Their
/// number is the dimension of the space of conjugation-invariant
/// functions on the set of symplectic reflections.
inline std::vector<ConjugacyClass> symplectic_reflection_classes(const FiniteGroup& G, const SympForm& omega)
{
    if (omega.dim() != G.dim())
        throw dimension_mismatch("form and group act on spaces of different dimension");
    for (std::size_t i = 0; i < G.order(); ++i)
        if (!omega.preserved_by(G.matrix(i)))
            throw not_symplectic("element " + std::to_string(i) + " does not preserve the form");
    std::vector<ConjugacyClass> out;
    for (auto& c : conjugacy_classes(G))
        if (fixed_rank(G.matrix(c.front())) == 2)
            out.push_back(std::move(c));
    return out;
}

struct ReflectionDatum {
    std::vector<Cyclotomic> hyperplane_form; ///< alpha_Y, first nonzero entry 1
    std::size_t stabilizer_order = 0;        ///< n_Y
    std::vector<std::size_t> stabilizer;     ///< G_Y, identity first
    std::size_t orbit = 0;                   ///< index of the G-orbit of Y
};

namespace detail {

inline std::vector<Cyclotomic> normalize_covector(std::vector<Cyclotomic> a)
{
    for (const auto& x : a)
        if (!x.is_zero()) {
            const auto inv = x.inverse();
            for (auto& y : a)
                y *= inv;
            break;
        }
    return a;
}

// Row space of m is contained in the line spanned by alpha.
inline bool rows_in_span(const CycMatrix& m, const std::vector<Cyclotomic>& alpha)
{
    std::size_t lead = 0;
    while (alpha[lead].is_zero())
        ++lead;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const Cyclotomic s = m(i, lead);
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!(m(i, j) == s * alpha[j]))
                return false;
    }
    return true;
}

} // namespace detail

/// One datum per reflection hyperplane Y = ker(1 - g), g of fixed rank 1.
/// Hyperplanes are listed in order of first appearance in the element list.
inline std::vector<ReflectionDatum> reflection_data(const FiniteGroup& G)
{
    const std::size_t d = G.dim();
    const auto id = CycMatrix::identity(d);
    std::vector<ReflectionDatum> out;
    for (std::size_t g = 0; g < G.order(); ++g) {
        const CycMatrix m = G.matrix(g) - id;
        if (rank(m) != 1)
            continue;
        std::vector<Cyclotomic> alpha;
        for (std::size_t i = 0; i < d && alpha.empty(); ++i)
            for (std::size_t j = 0; j < d; ++j)
                if (!m(i, j).is_zero()) {
                    alpha.assign(m.data().begin() + i * d, m.data().begin() + (i + 1) * d);
                    break;
                }
        alpha = detail::normalize_covector(std::move(alpha));
        if (std::any_of(out.begin(), out.end(), [&](const auto& r) { return r.hyperplane_form == alpha; }))
            continue;
        ReflectionDatum r;
        r.hyperplane_form = alpha;
        for (std::size_t h = 0; h < G.order(); ++h)
            if (detail::rows_in_span(G.matrix(h) - id, alpha))
                r.stabilizer.push_back(h);
        r.stabilizer_order = r.stabilizer.size();
        out.push_back(std::move(r));
    }

    // h moves the covector alpha to alpha * h^{-1}
    std::vector<long> orbit(out.size(), -1);
    std::size_t next = 0;
    for (std::size_t y = 0; y < out.size(); ++y) {
        if (orbit[y] >= 0)
            continue;
        orbit[y] = static_cast<long>(next);
        for (std::size_t h = 0; h < G.order(); ++h) {
            const auto& hinv = G.matrix(G.inverse(h));
            std::vector<Cyclotomic> moved(d, Cyclotomic(0));
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t k = 0; k < d; ++k)
                    moved[j] += out[y].hyperplane_form[k] * hinv(k, j);
            moved = detail::normalize_covector(std::move(moved));
            for (std::size_t z = 0; z < out.size(); ++z)
                if (out[z].hyperplane_form == moved)
                    orbit[z] = static_cast<long>(next);
        }
        ++next;
    }
    for (std::size_t y = 0; y < out.size(); ++y)
        out[y].orbit = static_cast<std::size_t>(orbit[y]);
    return out;
}

/// dims[p] = number of conjugacy classes with rank(1 - g) = p, p = 0..dim V.
inline std::vector<std::size_t> orbifold_cohomology_dims(const FiniteGroup& G)
{
    std::vector<std::size_t> dims(G.dim() + 1, 0);
    for (const auto& c : conjugacy_classes(G))
        ++dims[fixed_rank(G.matrix(c.front()))];
    return dims;
}

// Frequently used linear actions.

/// diag(zeta_n, zeta_n^{-1}) in SL2.
inline CycMatrix cyclic_sl2_generator(int n)
{
    return CycMatrix{{Cyclotomic::zeta(n), 0}, {0, Cyclotomic::zeta(n, n - 1)}};
}

/// Multiplication by zeta_n on C.
inline CycMatrix cyclic_line_generator(int n) { return CycMatrix{{Cyclotomic::zeta(n)}}; }

/// Rotation of the real plane by 2 pi / n.
inline CycMatrix rotation(int n)
{
    const auto z = Cyclotomic::zeta(n), zi = Cyclotomic::zeta(n, n - 1), i = Cyclotomic::zeta(4);
    const Cyclotomic half(Rational(1, 2));
    const auto c = (z + zi) * half;
    const auto s = (z - zi) * half / i;
    return CycMatrix{{c, -s}, {s, c}};
}

inline CycMatrix swap_matrix() { return CycMatrix{{0, 1}, {1, 0}}; }

/// Generators of the quaternion group of order 8 inside SL2.
inline std::vector<CycMatrix> quaternion_generators()
{
    const auto i = Cyclotomic::zeta(4);
    return {CycMatrix{{i, 0}, {0, -i}}, CycMatrix{{0, 1}, {-1, 0}}};
}

/// Symmetries of the square: quarter turn and a coordinate swap.
inline std::vector<CycMatrix> dihedral8_generators() { return {rotation(4), swap_matrix()}; }

/// A in GL(V) acting on V + V* by A and A^{-T}; preserves the standard form.
inline CycMatrix symplectic_double(const CycMatrix& a)
{
    const std::size_t n = a.rows();
    const auto dual = inverse(a).transpose();
    CycMatrix m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = a(i, j);
            m(n + i, n + j) = dual(i, j);
        }
    return m;
}

} // namespace deformlab

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/ncalg.hpp"

namespace deformlab {

enum class Geometry { sphere, euclid, hyperbolic };

inline std::string to_string(Geometry g)
{
    switch (g) {
    case Geometry::sphere: return "sphere";
    case Geometry::euclid: return "euclid";
    case Geometry::hyperbolic: return "hyperbolic";
    }
    return "?";
}

struct TriangleData {
    int p = 2, q = 2, r = 2;
    Rational S;
    Geometry geometry = Geometry::sphere;
    std::vector<std::vector<Symbol>> tau; ///< tau[0][j] = tau_{1,j+1}, etc.
    std::optional<std::size_t> group_order; ///< spherical only
};

/// <a, b | a^p, b^q, (ab)^r>.
inline Presentation triangle_presentation(int p, int q, int r)
{
    auto P = Presentation::free_algebra(2);
    P.letters = {"a", "b"};
    auto power = [](const Word& w, int k) {
        Word out;
        for (int i = 0; i < k; ++i)
            out.insert(out.end(), w.begin(), w.end());
        return out;
    };
    P.relations = {SmashElement::monomial(power({0}, p)) - SmashElement(1),
                   SmashElement::monomial(power({1}, q)) - SmashElement(1),
                   SmashElement::monomial(power({0, 1}, r)) - SmashElement(1)};
    return P;
}

/// Geometry from the sign of 1/p + 1/q + 1/r - 1. For spherical triples the
/// group order comes from coset enumeration and is checked against 2/(S-1).
inline TriangleData classify_triangle(int p, int q, int r)
{
    if (p < 2 || q < 2 || r < 2)
        throw std::invalid_argument("triangle exponents must be at least 2");
    TriangleData t;
    t.p = p;
    t.q = q;
    t.r = r;
    t.S = Rational(1, p) + Rational(1, q) + Rational(1, r);
    t.geometry = t.S > 1 ? Geometry::sphere : t.S == 1 ? Geometry::euclid : Geometry::hyperbolic;
    const int n[3] = {p, q, r};
    for (int b = 0; b < 3; ++b) {
        t.tau.emplace_back();
        for (int j = 1; j <= n[b]; ++j)
            t.tau.back().push_back(symbol("tau" + std::to_string(b + 1) + "_" + std::to_string(j)));
    }
    if (t.geometry == Geometry::sphere) {
        const auto order = stabilized_group_order(triangle_presentation(p, q, r), 64);
        const Rational closed = Rational(2) / (t.S - 1);
        if (!order || Rational(static_cast<long>(*order)) != closed)
            throw internal_error("group order of (" + std::to_string(p) + "," + std::to_string(q) + "," +
                                 std::to_string(r) + ") disagrees with 2/(S-1)");
        t.group_order = order;
    }
    return t;
}

struct ObstructionReport {
    std::size_t group_order = 0;
    Cyclotomic root_factor{1};
    std::vector<std::vector<long>> linear_form; ///< one block per generator a, b, c
    bool nontrivial = false;
};

/// Determinant of abc = 1 in the regular representation, with eigenvalues
/// zeta_n^j e^{tau_j} of equal multiplicity |G|/n: the root factor
/// prod_j zeta_n^{j |G|/n} over the three generators and the linear form
/// with coefficient |G|/n on each tau of that generator.
inline ObstructionReport det_obstruction(int p, int q, int r)
{
    const auto t = classify_triangle(p, q, r);
    if (t.geometry != Geometry::sphere)
        throw not_spherical("(" + std::to_string(p) + "," + std::to_string(q) + "," + std::to_string(r) +
                            ") is " + to_string(t.geometry));
    ObstructionReport rep;
    rep.group_order = *t.group_order;
    const long G = static_cast<long>(rep.group_order);
    for (int n : {p, q, r}) {
        const long mult = G / n;
        rep.linear_form.emplace_back(static_cast<std::size_t>(n), mult);
        for (int j = 1; j <= n; ++j)
            rep.root_factor = rep.root_factor * Cyclotomic::zeta(n, j).pow(mult);
    }
    bool form_zero = true;
    for (const auto& b : rep.linear_form)
        for (auto c : b)
            form_zero = form_zero && c == 0;
    rep.nontrivial = !form_zero || !(rep.root_factor == Cyclotomic(1));
    return rep;
}

namespace detail {

inline std::vector<std::size_t> compose(const std::vector<std::size_t>& first, const std::vector<std::size_t>& then)
{
    std::vector<std::size_t> out(first.size());
    for (std::size_t x = 0; x < first.size(); ++x)
        out[x] = then[first[x]];
    return out;
}

inline std::vector<std::size_t> invert(const std::vector<std::size_t>& perm)
{
    std::vector<std::size_t> out(perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x)
        out[perm[x]] = x;
    return out;
}

inline CycMatrix permutation_matrix(const std::vector<std::size_t>& perm)
{
    CycMatrix m(perm.size(), perm.size());
    for (std::size_t x = 0; x < perm.size(); ++x)
        m(perm[x], x) = 1;
    return m;
}

// Product in the free algebra (no group part).
inline SmashElement word_product(const SmashElement& a, const SmashElement& b)
{
    SmashElement out;
    for (const auto& [ka, ca] : a.terms())
        for (const auto& [kb, cb] : b.terms()) {
            if (ka.first != 0 || kb.first != 0)
                throw std::invalid_argument("word_product needs elements without group part");
            Word w = ka.second;
            w.insert(w.end(), kb.second.begin(), kb.second.end());
            out.add(0, w, ca * cb);
        }
    return out;
}

} // namespace detail

/// Independent route: build the regular representation from the
/// enumerated group, then read the first-order coefficient of tau_{b,j}
/// as dim ker(R - zeta^j) and the root factor as det R_a det R_b det R_c.
inline ObstructionReport regular_rep_determinant(int p, int q, int r)
{
    const auto P = triangle_presentation(p, q, r);
    const auto Q = monoid_quotient(P);
    const auto& Ra = Q.right[0];
    const auto& Rb = Q.right[1];
    const auto Rc = detail::invert(detail::compose(Ra, Rb)); // c = (ab)^{-1}
    ObstructionReport rep;
    rep.group_order = Ra.size();
    const std::vector<std::size_t> perms[3] = {Ra, Rb, Rc};
    const int n[3] = {p, q, r};
    for (int b = 0; b < 3; ++b) {
        const auto M = detail::permutation_matrix(perms[b]);
        rep.linear_form.emplace_back();
        for (int j = 1; j <= n[b]; ++j) {
            CycMatrix shifted = M;
            const auto z = Cyclotomic::zeta(n[b], j);
            for (std::size_t i = 0; i < M.rows(); ++i)
                shifted(i, i) -= z;
            rep.linear_form.back().push_back(static_cast<long>(M.rows() - rank(shifted)));
        }
        // determinant of a permutation matrix is its sign
        std::vector<bool> seen(perms[b].size(), false);
        bool odd = false;
        for (std::size_t x = 0; x < perms[b].size(); ++x) {
            if (seen[x])
                continue;
            std::size_t len = 0;
            for (std::size_t y = x; !seen[y]; y = perms[b][y]) {
                seen[y] = true;
                ++len;
            }
            odd ^= (len % 2 == 0);
        }
        if (odd)
            rep.root_factor = -rep.root_factor;
    }
    bool form_zero = true;
    for (const auto& blk : rep.linear_form)
        for (auto c : blk)
            form_zero = form_zero && c == 0;
    rep.nontrivial = !form_zero || !(rep.root_factor == Cyclotomic(1));
    return rep;
}

/// Symmetric Coxeter matrix; off-diagonal entries >= 2, with kInfinity for
/// m = infinity.
class CoxeterMatrix {
public:
    static constexpr int kInfinity = 0;

    explicit CoxeterMatrix(std::vector<std::vector<int>> m) : m_(std::move(m))
    {
        const std::size_t r = m_.size();
        for (std::size_t i = 0; i < r; ++i) {
            if (m_[i].size() != r)
                throw dimension_mismatch("Coxeter matrix must be square");
            for (std::size_t j = 0; j < r; ++j) {
                if (m_[i][j] != m_[j][i])
                    throw std::invalid_argument("Coxeter matrix must be symmetric");
                if (i == j && m_[i][i] != 1)
                    throw std::invalid_argument("Coxeter matrix has 1 on the diagonal");
                if (i != j && m_[i][j] != kInfinity && m_[i][j] < 2)
                    throw std::invalid_argument("off-diagonal Coxeter entries must be >= 2 or infinity");
            }
        }
    }

    /// Rank 2 with m_12 = m.
    static CoxeterMatrix dihedral(int m) { return CoxeterMatrix({{1, m}, {m, 1}}); }

    /// Rank 3 from (m12, m23, m13).
    static CoxeterMatrix rank3(int m12, int m23, int m13)
    {
        return CoxeterMatrix({{1, m12, m13}, {m12, 1, m23}, {m13, m23, 1}});
    }

    std::size_t rank() const { return m_.size(); }
    int operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
    bool finite(std::size_t i, std::size_t j) const { return m_[i][j] != kInfinity; }

private:
    std::vector<std::vector<int>> m_;
};

struct ErVerdict {
    bool ok = true;
    std::optional<std::array<std::size_t, 3>> failing_triple; ///< 0-based
};

/// 1/m_ij + 1/m_jl + 1/m_li <= 1 for all i < j < l, with 1/infinity = 0.
inline ErVerdict er_criterion(const CoxeterMatrix& M)
{
    auto inv = [&](std::size_t i, std::size_t j) { return M.finite(i, j) ? Rational(1, M(i, j)) : Rational(0); };
    ErVerdict v;
    const std::size_t r = M.rank();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            for (std::size_t l = j + 1; l < r; ++l)
                if (inv(i, j) + inv(j, l) + inv(l, i) > 1) {
                    v.ok = false;
                    v.failing_triple = std::array<std::size_t, 3>{i, j, l};
                    return v;
                }
    return v;
}

struct EvenHeckePresentation {
    CoxeterMatrix coxeter;
    Presentation presentation;
    std::vector<std::pair<std::size_t, std::size_t>> pairs; ///< letter k is a_{pairs[k]}
    /// t[{i,j}] for i < j: eigenvalue parameters of a_ij; a_ji has the inverses.
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Symbol>> t;

    std::size_t letter(std::size_t i, std::size_t j) const
    {
        for (std::size_t k = 0; k < pairs.size(); ++k)
            if (pairs[k] == std::make_pair(i, j))
                return k;
        throw std::out_of_range("no generator a_" + std::to_string(i + 1) + std::to_string(j + 1));
    }

    /// Parameters at t_{ij,k} = zeta_m^k: the group algebra of W+.
    Substitution roots_of_unity() const
    {
        Substitution s;
        for (const auto& [ij, syms] : t) {
            const int m = static_cast<int>(syms.size());
            for (int k = 0; k < m; ++k)
                s.emplace(syms[static_cast<std::size_t>(k)], ParamPoly(Cyclotomic::zeta(m, k + 1)));
        }
        return s;
    }
};

/// Generators a_ij (i != j) with a_ij a_ji = 1, a_ij a_jk a_ki = 1 and
/// prod_k (a_ij - t_{ij,k}) = 0 for i < j. The eigenvalues of a_ji are the
/// inverses t_{ij,k}^{-1}, imposed as prod_k (t_{ij,k} a_ji - 1) = 0 so that
/// coefficients stay polynomial.
inline EvenHeckePresentation build_even_hecke(const CoxeterMatrix& M)
{
    const std::size_t r = M.rank();
    EvenHeckePresentation H{M, {}, {}, {}};
    std::vector<std::string> letters;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (i != j) {
                H.pairs.emplace_back(i, j);
                letters.push_back("a" + std::to_string(i + 1) + std::to_string(j + 1));
            }
    auto& P = H.presentation;
    P = Presentation::free_algebra(H.pairs.size());
    P.letters = letters;
    auto L = [&](std::size_t i, std::size_t j) { return static_cast<int>(H.letter(i, j)); };
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            if (i != j)
                P.relations.push_back(SmashElement::monomial({L(i, j), L(j, i)}) - SmashElement(1));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t k = 0; k < r; ++k)
                if (i != j && j != k && k != i)
                    P.relations.push_back(SmashElement::monomial({L(i, j), L(j, k), L(k, i)}) - SmashElement(1));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j) {
            if (!M.finite(i, j))
                continue;
            auto& syms = H.t[{i, j}];
            for (int k = 1; k <= M(i, j); ++k) {
                syms.push_back(symbol("t" + std::to_string(i + 1) + std::to_string(j + 1) + "_" + std::to_string(k)));
                P.parameters.push_back(syms.back());
            }
            SmashElement fwd(1), back(1);
            for (auto s : syms) {
                const auto tk = ParamPoly::variable(s);
                fwd = detail::word_product(fwd, SmashElement::monomial({L(i, j)}) - SmashElement(tk));
                back = detail::word_product(back, SmashElement::monomial({L(j, i)}, tk) - SmashElement(1));
            }
            P.relations.push_back(std::move(fwd));
            P.relations.push_back(std::move(back));
        }
    return H;
}

/// Rank of the span of words of length <= L modulo relation placements,
/// for L = 1..wordlen_max. Ranks are over the fraction field of the
/// parameters when they are left symbolic.
inline std::vector<std::size_t> bounded_span_rank(const EvenHeckePresentation& H, std::size_t wordlen_max,
                                                  const DimOptions& opt = {})
{
    if (wordlen_max < 1)
        throw std::invalid_argument("wordlen_max must be at least 1");
    std::vector<std::size_t> out;
    for (std::size_t L = 1; L <= wordlen_max; ++L)
        out.push_back(filtered_dim(H.presentation, L, opt));
    return out;
}

} // namespace deformlab

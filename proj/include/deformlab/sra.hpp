#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/groups.hpp"
#include "deformlab/ncalg.hpp"

namespace deformlab {

/// A finite group acting on (V, omega) by symplectic matrices.
struct SympAction {
    FiniteGroup group;
    SympForm form;

    SympAction(FiniteGroup g, SympForm w) : group(std::move(g)), form(std::move(w))
    {
        if (form.dim() != group.dim())
            throw dimension_mismatch("form and group act on spaces of different dimension");
        for (std::size_t i = 0; i < group.order(); ++i)
            if (!form.preserved_by(group.matrix(i)))
                throw not_symplectic("element " + std::to_string(i) + " does not preserve the form");
    }

    /// Standard form [[0, I], [-I, 0]].
    static SympAction standard(FiniteGroup g)
    {
        const auto d = g.dim();
        return SympAction(std::move(g), SympForm::standard(d));
    }

    std::size_t dim() const { return form.dim(); }
};

/// omega(P x, P y) with P the projection onto im(1 - g) along ker(1 - g).
inline CycMatrix omega_s(const CycMatrix& g, const SympForm& omega)
{
    if (g.rows() != omega.dim() || !g.is_square())
        throw dimension_mismatch("element and form have different dimensions");
    if (!omega.preserved_by(g))
        throw not_symplectic("element does not preserve the form");
    if (fixed_rank(g) != 2)
        throw not_a_symplectic_reflection("rank(g - 1) is " + std::to_string(fixed_rank(g)) + ", not 2");
    const std::size_t d = g.rows();
    const CycMatrix one_minus = CycMatrix::identity(d) - g;
    const auto image = independent_columns(one_minus);
    const auto kernel = nullspace(one_minus);
    CycMatrix B(d, d);
    std::size_t c = 0;
    for (auto col : image) {
        for (std::size_t r = 0; r < d; ++r)
            B(r, c) = one_minus(r, col);
        ++c;
    }
    for (const auto& v : kernel) {
        for (std::size_t r = 0; r < d; ++r)
            B(r, c) = v[r];
        ++c;
    }
    CycMatrix keep(d, d);
    for (std::size_t i = 0; i < image.size(); ++i)
        keep(i, i) = 1;
    const CycMatrix P = B * keep * inverse(B);
    return P.transpose() * omega.matrix() * P;
}

/// C[G]-valued bilinear form on V: kappa(u, v) = sum_g (u^T K_g v) g. Forms
/// are stored for one representative per conjugacy class; the rest follow
/// from kappa(hu, hv) = h kappa(u, v) h^{-1}.
struct KappaMap {
    std::map<std::size_t, PolyMatrix> by_class_rep;

    /// K_g for every element g.
    std::map<std::size_t, PolyMatrix> expand(const FiniteGroup& G) const
    {
        std::map<std::size_t, PolyMatrix> out;
        for (const auto& [rep, K] : by_class_rep)
            for (std::size_t h = 0; h < G.order(); ++h) {
                const auto g = G.conjugate(h, rep);
                if (out.count(g))
                    continue;
                // K_{h rep h^-1} = H^{-T} K_rep H^{-1}
                const auto Hinv = convert<ParamPoly>(G.matrix(G.inverse(h)));
                out.emplace(g, Hinv.transpose() * K * Hinv);
            }
        return out;
    }

    bool is_skew() const
    {
        for (const auto& [rep, K] : by_class_rep)
            if (!(K.transpose() == -K))
                return false;
        return true;
    }

    /// K_rep(hu, hv) = K_rep(u, v) for h in the centralizer of rep; this is
    /// exactly what makes expand() independent of the chosen conjugators.
    bool is_equivariant(const FiniteGroup& G) const
    {
        for (const auto& [rep, K] : by_class_rep)
            for (std::size_t h = 0; h < G.order(); ++h)
                if (G.conjugate(h, rep) == rep) {
                    const auto H = convert<ParamPoly>(G.matrix(h));
                    if (!(H.transpose() * K * H == K))
                        return false;
                }
        return true;
    }

    std::set<Symbol> symbols() const
    {
        std::set<Symbol> s;
        for (const auto& [rep, K] : by_class_rep)
            for (const auto& x : K.data())
                for (auto sym : x.symbols())
                    s.insert(sym);
        return s;
    }

    friend KappaMap operator+(const KappaMap& a, const KappaMap& b)
    {
        KappaMap r = a;
        for (const auto& [rep, K] : b.by_class_rep) {
            auto it = r.by_class_rep.find(rep);
            if (it == r.by_class_rep.end())
                r.by_class_rep.emplace(rep, K);
            else
                it->second = it->second + K;
        }
        return r;
    }

    KappaMap scaled(const ParamPoly& s) const
    {
        KappaMap r = *this;
        for (auto& [rep, K] : r.by_class_rep)
            for (auto& x : K.data())
                x = x * s;
        return r;
    }
};

namespace detail {

inline PolyMatrix scaled(PolyMatrix m, const ParamPoly& s)
{
    for (auto& x : m.data())
        x = x * s;
    return m;
}

} // namespace detail

/// Relations [x_i, x_j] - kappa(x_i, x_j). Skew kappa gives one relation per
/// pair i < j; otherwise every ordered pair, diagonal included, is imposed.
inline Presentation kappa_presentation(const SympAction& act, const KappaMap& kappa)
{
    const std::size_t d = act.dim();
    const auto forms = kappa.expand(act.group);
    Presentation P;
    P.group = act.group;
    P.v_dim = d;
    P.letters = Presentation::default_letters(d);
    const bool skew = kappa.is_skew();
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = skew ? i + 1 : 0; j < d; ++j) {
            SmashElement r = SmashElement::monomial({static_cast<int>(i), static_cast<int>(j)}) -
                             SmashElement::monomial({static_cast<int>(j), static_cast<int>(i)});
            for (const auto& [g, K] : forms)
                if (!K(i, j).is_zero())
                    r.add(g, {}, -K(i, j));
            P.relations.push_back(std::move(r));
        }
    const auto syms = kappa.symbols();
    P.parameters.assign(syms.begin(), syms.end());
    return P;
}

/// Symbolic SRA parameters: t and one c per symplectic reflection class.
struct SraParameters {
    Symbol t;
    std::vector<Symbol> c;
};

inline SraParameters sra_parameters(const SympAction& act)
{
    SraParameters p{symbol("t"), {}};
    const auto classes = symplectic_reflection_classes(act.group, act.form);
    for (std::size_t i = 0; i < classes.size(); ++i)
        p.c.push_back(symbol("c" + std::to_string(i + 1)));
    return p;
}

/// kappa(x, y) = t omega(x, y) - 2 sum_s c_s omega_s(x, y) s, with c given
/// per symplectic reflection (absent means 0).
inline KappaMap sra_kappa(const SympAction& act, const ParamPoly& t, const std::map<std::size_t, ParamPoly>& c)
{
    const auto& G = act.group;
    const auto classes = symplectic_reflection_classes(G, act.form);
    std::map<std::size_t, std::size_t> class_of;
    for (std::size_t k = 0; k < classes.size(); ++k)
        for (auto g : classes[k])
            class_of[g] = k;
    for (const auto& [g, v] : c) {
        if (g >= G.order())
            throw std::invalid_argument("c names element " + std::to_string(g) + " outside the group");
        if (!class_of.count(g) && !v.is_zero())
            throw std::invalid_argument("c is nonzero on element " + std::to_string(g) +
                                        ", which is not a symplectic reflection");
    }
    auto value = [&](std::size_t g) {
        auto it = c.find(g);
        return it == c.end() ? ParamPoly() : it->second;
    };
    KappaMap kappa;
    if (!t.is_zero())
        kappa.by_class_rep.emplace(G.identity(), detail::scaled(convert<ParamPoly>(act.form.matrix()), t));
    for (const auto& cls : classes) {
        const auto cs = value(cls.front());
        for (auto g : cls)
            if (!(value(g) == cs))
                throw c_not_class_invariant("c differs on conjugate reflections " + std::to_string(cls.front()) +
                                            " and " + std::to_string(g));
        if (cs.is_zero())
            continue;
        kappa.by_class_rep.emplace(cls.front(), detail::scaled(convert<ParamPoly>(omega_s(G.matrix(cls.front()), act.form)),
                                                                   cs * ParamPoly(-2)));
    }
    return kappa;
}

/// Same with one c value per symplectic reflection class, in class order.
inline KappaMap sra_kappa(const SympAction& act, const ParamPoly& t, const std::vector<ParamPoly>& c_per_class)
{
    const auto classes = symplectic_reflection_classes(act.group, act.form);
    if (c_per_class.size() != classes.size())
        throw dimension_mismatch("expected " + std::to_string(classes.size()) + " class parameters");
    std::map<std::size_t, ParamPoly> c;
    for (std::size_t k = 0; k < classes.size(); ++k)
        for (auto g : classes[k])
            c[g] = c_per_class[k];
    return sra_kappa(act, t, c);
}

inline Presentation build_sra(const SympAction& act, const ParamPoly& t, const std::map<std::size_t, ParamPoly>& c)
{
    return kappa_presentation(act, sra_kappa(act, t, c));
}

inline Presentation build_sra(const SympAction& act, const ParamPoly& t, const std::vector<ParamPoly>& c_per_class)
{
    return kappa_presentation(act, sra_kappa(act, t, c_per_class));
}

/// Fully symbolic H_{t,c}.
inline Presentation build_sra(const SympAction& act)
{
    const auto p = sra_parameters(act);
    std::vector<ParamPoly> c;
    for (auto s : p.c)
        c.push_back(ParamPoly::variable(s));
    auto P = build_sra(act, ParamPoly::variable(p.t), c);
    P.deformation = {p.t};
    return P;
}

struct ClassSolution {
    std::size_t rep = 0;
    std::vector<CycMatrix> basis; ///< skew forms for the class representative
};

struct KappaClassification {
    std::vector<ClassSolution> per_class; ///< identity class first
    std::size_t dimension = 0;
    std::size_t identity_dim = 0; ///< reported, not assumed to be 1

    /// Basis of admissible kappa, class by class.
    std::vector<KappaMap> basis() const
    {
        std::vector<KappaMap> out;
        for (const auto& cs : per_class)
            for (const auto& K : cs.basis) {
                KappaMap k;
                k.by_class_rep.emplace(cs.rep, convert<ParamPoly>(K));
                out.push_back(std::move(k));
            }
        return out;
    }
};

namespace detail {

// Position of the unknown K(i, j), i < j, among the skew entries.
inline std::size_t skew_index(std::size_t i, std::size_t j, std::size_t d)
{
    return i * d - i * (i + 1) / 2 + (j - i - 1);
}

inline CycMatrix skew_from_vector(const std::vector<Cyclotomic>& v, std::size_t d)
{
    CycMatrix K(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            K(i, j) = v[skew_index(i, j, d)];
            K(j, i) = -K(i, j);
        }
    return K;
}

inline std::vector<Cyclotomic> skew_to_vector(const CycMatrix& K)
{
    const std::size_t d = K.rows();
    std::vector<Cyclotomic> v(d * (d - 1) / 2);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j)
            v[skew_index(i, j, d)] = K(i, j);
    return v;
}

// Linear conditions on a skew form K_g:
//   K(x,y)(1-g)z + K(y,z)(1-g)x + K(z,x)(1-g)y = 0 on basis triples, and
//   H^T K H = K for h in the centralizer of g.
inline CycMatrix kappa_conditions(const FiniteGroup& G, std::size_t g)
{
    const std::size_t d = G.dim();
    const std::size_t unknowns = d * (d - 1) / 2;
    const CycMatrix L = CycMatrix::identity(d) - G.matrix(g);
    std::vector<std::vector<Cyclotomic>> rows;
    auto unit = [&](std::size_t a, std::size_t b, const Cyclotomic& c, std::vector<Cyclotomic>& row) {
        // adds c * K(a, b) to row
        if (a == b)
            return;
        if (a < b)
            row[skew_index(a, b, d)] += c;
        else
            row[skew_index(b, a, d)] -= c;
    };
    for (std::size_t x = 0; x < d; ++x)
        for (std::size_t y = x + 1; y < d; ++y)
            for (std::size_t z = y + 1; z < d; ++z)
                for (std::size_t k = 0; k < d; ++k) {
                    std::vector<Cyclotomic> row(unknowns, Cyclotomic(0));
                    unit(x, y, L(k, z), row);
                    unit(y, z, L(k, x), row);
                    unit(z, x, L(k, y), row);
                    rows.push_back(std::move(row));
                }
    for (std::size_t h = 0; h < G.order(); ++h) {
        if (G.conjugate(h, g) != g)
            continue;
        const auto& H = G.matrix(h);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) {
                // (H^T K H)(i, j) - K(i, j)
                std::vector<Cyclotomic> row(unknowns, Cyclotomic(0));
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = 0; b < d; ++b)
                        if (!H(a, i).is_zero() && !H(b, j).is_zero())
                            unit(a, b, H(a, i) * H(b, j), row);
                unit(i, j, Cyclotomic(-1), row);
                rows.push_back(std::move(row));
            }
    }
    CycMatrix M(rows.size(), unknowns);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < unknowns; ++c)
            M(r, c) = rows[r][c];
    return M;
}

inline bool in_span(const std::vector<CycMatrix>& basis, const CycMatrix& K)
{
    const auto target = skew_to_vector(K);
    CycMatrix M(target.size(), basis.size());
    for (std::size_t c = 0; c < basis.size(); ++c) {
        const auto v = skew_to_vector(basis[c]);
        for (std::size_t r = 0; r < v.size(); ++r)
            M(r, c) = v[r];
    }
    return solve(M, target).has_value();
}

} // namespace detail

/// Solves the componentwise Jacobi system together with equivariance, class
/// by class, and checks the answer against t*omega and the omega_s.
inline KappaClassification classify_kappa(const SympAction& act)
{
    const auto& G = act.group;
    const std::size_t d = act.dim();
    KappaClassification out;
    for (const auto& cls : conjugacy_classes(G)) {
        const std::size_t rep = cls.front();
        ClassSolution cs{rep, {}};
        for (const auto& v : nullspace(detail::kappa_conditions(G, rep)))
            cs.basis.push_back(detail::skew_from_vector(v, d));
        if (rep == G.identity()) {
            out.identity_dim = cs.basis.size();
            if (!detail::in_span(cs.basis, act.form.matrix()))
                throw internal_error("omega is not among the identity-class solutions");
        } else if (fixed_rank(G.matrix(rep)) == 2) {
            const auto ws = omega_s(G.matrix(rep), act.form);
            if (cs.basis.size() != 1 || !detail::in_span(cs.basis, ws))
                throw internal_error("solutions for reflection class of " + std::to_string(rep) +
                                     " are not spanned by omega_s");
            cs.basis = {ws};
        } else if (!cs.basis.empty()) {
            throw internal_error("nonzero solutions on non-reflection class of " + std::to_string(rep));
        }
        out.dimension += cs.basis.size();
        if (!cs.basis.empty())
            out.per_class.push_back(std::move(cs));
    }
    return out;
}

/// True iff kappa lies in the span of the classification: skew, and each
/// class form inside that class's solution space.
inline bool is_admissible(const KappaClassification& cls, const KappaMap& kappa)
{
    if (!kappa.is_skew() || !kappa.symbols().empty())
        return false;
    for (const auto& [rep, K] : kappa.by_class_rep) {
        CycMatrix Kc(K.rows(), K.cols());
        for (std::size_t i = 0; i < K.rows(); ++i)
            for (std::size_t j = 0; j < K.cols(); ++j)
                Kc(i, j) = K(i, j).constant();
        if (Kc == CycMatrix(K.rows(), K.cols()))
            continue;
        auto it = std::find_if(cls.per_class.begin(), cls.per_class.end(),
                               [&](const ClassSolution& s) { return s.rep == rep; });
        if (it == cls.per_class.end() || !detail::in_span(it->basis, Kc))
            return false;
    }
    return true;
}

/// Seeded equivariant bilinear perturbation (not necessarily skew) outside
/// the admissible span: random integer forms averaged over centralizers.
inline KappaMap random_inadmissible_perturbation(const SympAction& act, const KappaClassification& cls,
                                                 std::mt19937_64& rng)
{
    const auto& G = act.group;
    const std::size_t d = act.dim();
    std::uniform_int_distribution<int> coef(-2, 2);
    const auto classes = conjugacy_classes(G);
    for (;;) {
        KappaMap k;
        for (const auto& c : classes) {
            const std::size_t rep = c.front();
            CycMatrix R(d, d);
            for (auto& x : R.data())
                x = coef(rng);
            CycMatrix avg(d, d);
            std::size_t count = 0;
            for (std::size_t h = 0; h < G.order(); ++h)
                if (G.conjugate(h, rep) == rep) {
                    avg = avg + G.matrix(h).transpose() * R * G.matrix(h);
                    ++count;
                }
            const Cyclotomic inv(Rational(1, static_cast<long>(count)));
            for (auto& x : avg.data())
                x = x * inv;
            if (!(avg == CycMatrix(d, d)))
                k.by_class_rep.emplace(rep, convert<ParamPoly>(avg));
        }
        if (!k.by_class_rep.empty() && !is_admissible(cls, k))
            return k;
    }
}

/// Filtered dimension of the kappa-deformed smash product against
/// |G| * #{commutative monomials of degree <= n}, for n = 0..n_max.
inline std::vector<FlatnessVerdict> pbw_check(const SympAction& act, const KappaMap& kappa, std::size_t n_max,
                                              const DimOptions& opt = {RankMode::symbolic()})
{
    if (n_max < 3)
        throw std::invalid_argument("pbw_check needs n_max >= 3");
    const auto P = kappa_presentation(act, kappa);
    const std::size_t d = act.dim();
    std::vector<FlatnessVerdict> out;
    std::size_t monomials = 1; // C(n + d, d)
    for (std::size_t n = 0; n <= n_max; ++n) {
        if (n > 0)
            monomials = monomials * (n + d) / n;
        FlatnessVerdict v;
        v.degree = n;
        v.generic_dim = filtered_dim(P, n, opt);
        v.special_dim = act.group.order() * monomials;
        v.flat = v.generic_dim == v.special_dim;
        out.push_back(v);
    }
    return out;
}

} // namespace deformlab

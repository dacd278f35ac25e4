#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/groups.hpp"
#include "deformlab/scalars.hpp"

namespace deformlab {

/// Letters are indices into a basis of V.
using Word = std::vector<int>;

/// Element of G |x T(V) with parameter coefficients, stored as a sum of
/// normal-ordered monomials g.w.
class SmashElement {
public:
    using Key = std::pair<std::size_t, Word>;

    SmashElement() = default;
    SmashElement(ParamPoly c) { add(0, {}, std::move(c)); }

    static SmashElement monomial(Word w, ParamPoly c = ParamPoly(1), std::size_t g = 0)
    {
        SmashElement e;
        e.add(g, std::move(w), std::move(c));
        return e;
    }

    static SmashElement group_element(std::size_t g, ParamPoly c = ParamPoly(1)) { return monomial({}, std::move(c), g); }

    const std::map<Key, ParamPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add(std::size_t g, Word w, const ParamPoly& c)
    {
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.try_emplace({g, std::move(w)}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    /// Largest word length (group elements have degree 0).
    std::size_t degree() const
    {
        std::size_t d = 0;
        for (const auto& [k, c] : terms_)
            d = std::max(d, k.second.size());
        return d;
    }

    std::set<Symbol> symbols() const
    {
        std::set<Symbol> s;
        for (const auto& [k, c] : terms_)
            s.merge(c.symbols());
        return s;
    }

    SmashElement substitute(const Substitution& sub) const
    {
        SmashElement r;
        for (const auto& [k, c] : terms_)
            r.add(k.first, k.second, c.substitute(sub));
        return r;
    }

    SmashElement scaled(const ParamPoly& s) const
    {
        SmashElement r;
        for (const auto& [k, c] : terms_)
            r.add(k.first, k.second, c * s);
        return r;
    }

    friend SmashElement operator+(SmashElement a, const SmashElement& b)
    {
        for (const auto& [k, c] : b.terms_)
            a.add(k.first, k.second, c);
        return a;
    }
    friend SmashElement operator-(SmashElement a, const SmashElement& b)
    {
        for (const auto& [k, c] : b.terms_)
            a.add(k.first, k.second, -c);
        return a;
    }
    SmashElement operator-() const { return SmashElement() - *this; }
    SmashElement& operator+=(const SmashElement& o) { return *this = *this + o; }
    SmashElement& operator-=(const SmashElement& o) { return *this = *this - o; }

    friend bool operator==(const SmashElement& a, const SmashElement& b) { return a.terms_ == b.terms_; }

    /// Highest degree first; group elements other than the identity are
    /// printed by label (or g<index>) in front of the word.
    std::string to_string(const std::vector<std::string>& letters,
                          const std::function<std::string(std::size_t)>& group_label = {}) const
    {
        if (terms_.empty())
            return "0";
        std::vector<const std::pair<const Key, ParamPoly>*> order;
        for (const auto& t : terms_)
            order.push_back(&t);
        std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
            return a->first.second.size() > b->first.second.size();
        });
        std::string s;
        for (auto* t : order) {
            std::string mon;
            if (t->first.first != 0)
                mon = group_label ? group_label(t->first.first) : "g" + std::to_string(t->first.first);
            for (int l : t->first.second) {
                if (!mon.empty() && letters[l].size() > 1)
                    mon += "*";
                mon += letters[l];
            }
            std::string coef = t->second.to_string();
            const bool compound = t->second.size() > 1;
            bool negative = false;
            if (!compound && coef.front() == '-') {
                negative = true;
                coef.erase(0, 1);
            }
            if (compound)
                coef = "(" + coef + ")";
            std::string term;
            if (mon.empty())
                term = coef;
            else if (coef == "1")
                term = mon;
            else
                term = coef + "*" + mon;
            if (s.empty())
                s = negative ? "-" + term : term;
            else
                s += (negative ? " - " : " + ") + term;
        }
        return s;
    }

private:
    std::map<Key, ParamPoly> terms_;
};

/// Generators x_1..x_d of V (acted on by the matrices of group), relations
/// in G |x T(V), and the parameter names. Deformation parameters are those
/// set to zero to recover the undeformed algebra.
struct Presentation {
    FiniteGroup group = trivial_group(1);
    std::size_t v_dim = 0;
    std::vector<std::string> letters;
    std::vector<SmashElement> relations;
    std::vector<Symbol> parameters;
    std::vector<Symbol> deformation;

    /// Presentation over the trivial group with default letter names.
    static Presentation free_algebra(std::size_t d)
    {
        Presentation p;
        p.v_dim = d;
        p.group = trivial_group(std::max<std::size_t>(d, 1));
        p.letters = default_letters(d);
        return p;
    }

    static std::vector<std::string> default_letters(std::size_t d)
    {
        static const char* common[] = {"x", "y", "z", "w"};
        std::vector<std::string> l;
        for (std::size_t i = 0; i < d; ++i)
            l.push_back(d <= 4 ? std::string(common[i]) : "x" + std::to_string(i + 1));
        return l;
    }

    std::string render(const SmashElement& e) const
    {
        return e.to_string(letters, [this](std::size_t g) {
            const auto& label = group.element(g).label;
            return label.empty() ? "g" + std::to_string(g) : label;
        });
    }
};

struct FlatnessVerdict {
    std::size_t degree = 0;
    std::size_t generic_dim = 0;
    std::size_t special_dim = 0;
    bool flat = false;
};

struct TorsionWitness {
    SmashElement element; ///< v with hbar*v (up to higher order) in the span
    std::size_t degree = 0;
    std::size_t found_at = 0; ///< truncation degree where it appeared
};

/// Per-query options: truncation slack (relation placements up to n + slack
/// are used), rank strategy, and optional parameter values.
struct DimOptions {
    RankMode mode = RankMode();
    std::size_t slack = 0;
    Substitution at;
};

inline constexpr std::size_t kColumnBudget = 4'000'000;

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t b, std::size_t e)
{
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (b != 0 && r > kColumnBudget / b + 1)
            throw size_budget_exceeded("word space too large");
        r *= b;
    }
    return r;
}

inline std::uint64_t encode(const Word& w, std::size_t d)
{
    std::uint64_t v = 0;
    for (int l : w)
        v = v * d + static_cast<std::uint64_t>(l);
    return v;
}

inline Word decode(std::uint64_t v, std::size_t len, std::size_t d)
{
    Word w(len);
    for (std::size_t i = len; i-- > 0;) {
        w[i] = static_cast<int>(v % d);
        v /= d;
    }
    return w;
}

/// Columns (g, w) with |w| <= N, highest degree first, so that the span of
/// echelon rows with pivots at or after region_start(n) is span /\ F_n.
class ColumnIndex {
public:
    ColumnIndex(std::size_t groups, std::size_t d, std::size_t N) : groups_(groups), d_(d), N_(N)
    {
        pow_.resize(N + 1);
        for (std::size_t k = 0; k <= N; ++k)
            pow_[k] = checked_pow(d, k);
        start_.assign(N + 2, 0);
        std::uint64_t total = 0;
        for (std::size_t k = N + 1; k-- > 0;) {
            start_[k] = total;
            total += groups * pow_[k];
            if (total > kColumnBudget)
                throw size_budget_exceeded("more than " + std::to_string(kColumnBudget) + " normal-form columns");
        }
        size_ = total;
    }

    std::size_t size() const { return size_; }
    std::size_t max_degree() const { return N_; }
    std::size_t region_start(std::size_t n) const { return start_[std::min(n, N_)]; }
    std::size_t count_upto(std::size_t n) const { return size_ - region_start(n); }
    std::uint64_t power(std::size_t k) const { return pow_[k]; }

    std::size_t col(std::size_t g, std::size_t len, std::uint64_t value) const
    {
        return start_[len] + g * pow_[len] + value;
    }

    std::pair<std::size_t, Word> decode_col(std::size_t c) const
    {
        std::size_t len = 0;
        while (start_[len] > c)
            ++len;
        const std::uint64_t off = c - start_[len];
        return {off / pow_[len], decode(off % pow_[len], len, d_)};
    }

private:
    std::size_t groups_, d_, N_;
    std::vector<std::uint64_t> pow_;
    std::vector<std::size_t> start_;
    std::size_t size_ = 0;
};

/// Action of group elements on words: x_i -> sum_j M(j, i) x_j.
class WordAction {
public:
    using Image = std::vector<std::pair<std::uint64_t, Cyclotomic>>;

    WordAction(const FiniteGroup& G, std::size_t d) : G_(G), d_(d)
    {
        if (d > 0 && G.dim() != d)
            throw dimension_mismatch("group matrices do not match the number of letters");
        letters_.resize(G.order());
        for (std::size_t g = 0; g < G.order(); ++g) {
            letters_[g].resize(d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    if (!G.matrix(g)(j, i).is_zero())
                        letters_[g][i].emplace_back(static_cast<int>(j), G.matrix(g)(j, i));
        }
    }

    /// Image of the word of length len with code value under g (cached).
    const Image& apply(std::size_t g, std::size_t len, std::uint64_t value)
    {
        auto& slot = cache_[{g, len}];
        if (slot.empty()) {
            const std::uint64_t count = checked_pow(d_, len);
            slot.resize(count);
            for (std::uint64_t v = 0; v < count; ++v)
                slot[v] = expand(g, decode(v, len, d_));
        }
        return slot[value];
    }

    Image expand(std::size_t g, const Word& w) const
    {
        if (g == 0)
            return {{encode(w, d_), Cyclotomic(1)}};
        std::map<std::uint64_t, Cyclotomic> acc{{0, Cyclotomic(1)}};
        for (int l : w) {
            std::map<std::uint64_t, Cyclotomic> next;
            for (const auto& [v, c] : acc)
                for (const auto& [j, m] : letters_[g][l]) {
                    auto& slot = next[v * d_ + static_cast<std::uint64_t>(j)];
                    slot += c * m;
                }
            acc.clear();
            for (auto& [v, c] : next)
                if (!c.is_zero())
                    acc.emplace(v, std::move(c));
        }
        return {acc.begin(), acc.end()};
    }

    /// h^{-1} r h, written in normal order.
    SmashElement conjugate(const SmashElement& r, std::size_t h) const
    {
        const std::size_t hinv = G_.inverse(h);
        SmashElement out;
        for (const auto& [key, c] : r.terms()) {
            const std::size_t k = G_.mult(G_.mult(hinv, key.first), h);
            for (const auto& [v, m] : expand(hinv, key.second))
                out.add(k, decode(v, key.second.size(), d_), c.scaled(m));
        }
        return out;
    }

private:
    const FiniteGroup& G_;
    std::size_t d_;
    std::vector<std::vector<std::vector<std::pair<int, Cyclotomic>>>> letters_;
    std::map<std::pair<std::size_t, std::size_t>, std::vector<Image>> cache_;
};

/// Calls fn(row) for every placement g.u.(h^{-1} r h).v of filtered degree
/// at most N, as a sparse row over the given column index.
template <class Fn>
void for_each_placement(const FiniteGroup& G, std::size_t d, const std::vector<SmashElement>& relations,
                        const ColumnIndex& cols, Fn&& fn)
{
    WordAction act(G, d);
    const std::size_t N = cols.max_degree();
    struct Piece {
        std::size_t k;
        std::size_t len;
        std::uint64_t value;
        ParamPoly coef;
    };
    for (const auto& rel : relations) {
        const std::size_t deg = rel.degree();
        if (rel.is_zero() || deg > N)
            continue;
        std::vector<SmashElement> conjugates;
        for (std::size_t h = 0; h < G.order(); ++h) {
            auto rh = act.conjugate(rel, h);
            if (std::find(conjugates.begin(), conjugates.end(), rh) == conjugates.end())
                conjugates.push_back(std::move(rh));
        }
        for (const auto& rh : conjugates) {
            for (std::size_t a = 0; a + deg <= N; ++a)
                for (std::size_t b = 0; a + b + deg <= N; ++b) {
                    const std::uint64_t nu = cols.power(a), nv = cols.power(b);
                    for (std::uint64_t u = 0; u < nu; ++u)
                        for (std::uint64_t v = 0; v < nv; ++v) {
                            // identity-g row; pieces keyed by (k, len, value)
                            std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, ParamPoly> acc;
                            for (const auto& [key, c] : rh.terms()) {
                                const std::size_t k = key.first;
                                const std::size_t wl = key.second.size();
                                const std::uint64_t wv = encode(key.second, d);
                                const std::size_t len = a + wl + b;
                                for (const auto& [u2, m] : act.apply(G.inverse(k), a, u)) {
                                    const std::uint64_t value = (u2 * cols.power(wl) + wv) * nv + v;
                                    auto& slot = acc[{k, len, value}];
                                    slot += c.scaled(m);
                                }
                            }
                            std::vector<Piece> pieces;
                            for (auto& [key, c] : acc)
                                if (!c.is_zero())
                                    pieces.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::move(c)});
                            if (pieces.empty())
                                continue;
                            for (std::size_t g = 0; g < G.order(); ++g) {
                                SparseRow<ParamPoly> row;
                                row.reserve(pieces.size());
                                for (const auto& p : pieces)
                                    row.emplace_back(cols.col(G.mult(g, p.k), p.len, p.value), p.coef);
                                std::sort(row.begin(), row.end(),
                                          [](const auto& x, const auto& y) { return x.first < y.first; });
                                fn(std::move(row));
                            }
                        }
                }
        }
    }
}

inline std::set<Symbol> relation_symbols(const std::vector<SmashElement>& rels)
{
    std::set<Symbol> s;
    for (const auto& r : rels)
        s.merge(r.symbols());
    return s;
}

inline std::vector<SmashElement> substituted(const std::vector<SmashElement>& rels, const Substitution& at)
{
    if (at.empty())
        return rels;
    std::vector<SmashElement> out;
    for (const auto& r : rels)
        out.push_back(r.substitute(at));
    return out;
}

inline SparseRow<Cyclotomic> evaluate_row(const SparseRow<ParamPoly>& row, const std::map<Symbol, Cyclotomic>& point)
{
    SparseRow<Cyclotomic> r;
    for (const auto& [c, v] : row) {
        auto x = v.evaluate(point);
        if (!x.is_zero())
            r.emplace_back(c, std::move(x));
    }
    return r;
}

/// Pivot counts of the relation span, by region.
struct SpanProfile {
    std::size_t rank = 0;
    std::vector<std::size_t> pivots_from; ///< index n: pivots in F_n
};

template <class T>
SpanProfile profile_of(const Echelon<T>& e, const ColumnIndex& cols)
{
    SpanProfile p;
    p.rank = e.rank();
    for (std::size_t n = 0; n <= cols.max_degree(); ++n)
        p.pivots_from.push_back(e.pivots_from(cols.region_start(n)));
    return p;
}

// Trivial group, relations w1 - w2 or w with constant coefficients.
inline bool is_binomial_system(const FiniteGroup& G, const std::vector<SmashElement>& rels)
{
    if (G.order() != 1)
        return false;
    for (const auto& r : rels) {
        const auto& t = r.terms();
        for (const auto& [k, c] : t)
            if (!c.is_constant())
                return false;
        if (t.size() == 1)
            continue;
        if (t.size() != 2)
            return false;
        if (!(t.begin()->second == -std::next(t.begin())->second))
            return false;
    }
    return true;
}

/// Union-find over all words of length <= N; a monomial relation marks its
/// class as zero.
class WordClasses {
public:
    WordClasses(std::size_t d, std::size_t N, const std::vector<SmashElement>& rels) : d_(d), N_(N)
    {
        pow_.resize(N + 2);
        start_.resize(N + 2);
        std::uint64_t total = 0;
        for (std::size_t k = 0; k <= N; ++k) {
            pow_[k] = checked_pow(d, k);
            start_[k] = total;
            total += pow_[k];
            if (total > 16 * kColumnBudget)
                throw size_budget_exceeded("word graph too large");
        }
        start_[N + 1] = total;
        parent_.resize(total);
        std::iota(parent_.begin(), parent_.end(), std::uint64_t{0});
        zero_.assign(total, false);

        for (const auto& r : rels) {
            const std::size_t deg = r.degree();
            if (r.is_zero() || deg > N)
                continue;
            std::vector<const Word*> ws;
            for (const auto& [k, c] : r.terms())
                ws.push_back(&k.second);
            for (std::size_t a = 0; a + deg <= N; ++a)
                for (std::size_t b = 0; a + b + deg <= N; ++b)
                    for (std::uint64_t u = 0; u < pow_[a]; ++u)
                        for (std::uint64_t v = 0; v < pow_[b]; ++v) {
                            auto id = [&](const Word& w) {
                                const std::uint64_t val = (u * pow_[w.size()] + encode(w, d_)) * pow_[b] + v;
                                return start_[a + w.size() + b] + val;
                            };
                            if (ws.size() == 1)
                                zero_[find(id(*ws[0]))] = true;
                            else
                                unite(id(*ws[0]), id(*ws[1]));
                        }
        }
    }

    std::uint64_t index(const Word& w) const { return start_[w.size()] + encode(w, d_); }

    std::uint64_t find(std::uint64_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool is_zero(std::uint64_t x) { return zero_[find(x)]; }

    /// Nonzero classes meeting words of length <= n.
    std::size_t count(std::size_t n)
    {
        std::set<std::uint64_t> roots;
        for (std::uint64_t x = 0; x < start_[std::min(n, N_) + 1]; ++x) {
            const auto r = find(x);
            if (!zero_[r])
                roots.insert(r);
        }
        return roots.size();
    }

    Word word(std::uint64_t id) const
    {
        std::size_t len = 0;
        while (start_[len + 1] <= id)
            ++len;
        return decode(id - start_[len], len, d_);
    }

private:
    void unite(std::uint64_t a, std::uint64_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
        zero_[a] = zero_[a] || zero_[b];
    }

    std::size_t d_, N_;
    std::vector<std::uint64_t> pow_, start_, parent_;
    std::vector<bool> zero_;
};

/// Relation span profile at truncation N, generic in the remaining symbols.
inline SpanProfile span_profile(const FiniteGroup& G, std::size_t d, const std::vector<SmashElement>& rels,
                                const ColumnIndex& cols, const RankMode& mode)
{
    std::vector<SparseRow<ParamPoly>> rows;
    for_each_placement(G, d, rels, cols, [&](SparseRow<ParamPoly>&& r) { rows.push_back(std::move(r)); });
    const auto syms = relation_symbols(rels);

    if (syms.empty() || mode.use_symbolic(rows.size(), cols.size())) {
        if (syms.empty()) {
            Echelon<Cyclotomic> e(cols.size());
            for (const auto& r : rows)
                e.insert(evaluate_row(r, {}));
            return profile_of(e, cols);
        }
        Echelon<ParamPoly> e(cols.size());
        for (auto& r : rows)
            e.insert(std::move(r));
        return profile_of(e, cols);
    }

    if (mode.trials < 1)
        throw std::invalid_argument("specialize mode needs at least one trial");
    Specializer sampler(mode.seed);
    std::optional<SpanProfile> best;
    for (int t = 0; t < mode.trials; ++t) {
        const auto point = sampler.point(syms);
        Echelon<Cyclotomic> e(cols.size());
        for (const auto& r : rows)
            e.insert(evaluate_row(r, point));
        auto p = profile_of(e, cols);
        const std::size_t top = cols.max_degree();
        if (!best || std::pair(p.rank, p.pivots_from[top]) > std::pair(best->rank, best->pivots_from[top]))
            best = std::move(p);
    }
    return *best;
}

} // namespace detail

/// dim of F_n / (relation span /\ F_n), where F_n is spanned by g.w with
/// |w| <= n and the span uses relation placements of filtered degree
/// <= n + slack. Ranks are generic in any parameters left symbolic.
inline std::size_t filtered_dim(const Presentation& P, std::size_t n, const DimOptions& opt = {})
{
    const auto rels = detail::substituted(P.relations, opt.at);
    const std::size_t N = n + opt.slack;
    if (detail::is_binomial_system(P.group, rels)) {
        detail::WordClasses wc(P.v_dim, N, rels);
        return wc.count(n);
    }
    detail::ColumnIndex cols(P.group.order(), P.v_dim, N);
    const auto prof = detail::span_profile(P.group, P.v_dim, rels, cols, opt.mode);
    return cols.count_upto(n) - prof.pivots_from[n];
}

inline std::vector<std::size_t> filtered_dims(const Presentation& P, std::size_t n_max, const DimOptions& opt = {})
{
    std::vector<std::size_t> out;
    for (std::size_t n = 0; n <= n_max; ++n)
        out.push_back(filtered_dim(P, n, opt));
    return out;
}

inline Substitution deformation_to_zero(const Presentation& P)
{
    Substitution s;
    for (Symbol h : P.deformation)
        s.emplace(h, ParamPoly(0));
    return s;
}

/// Filtered dimension at generic parameters versus deformation parameters
/// set to zero.
inline FlatnessVerdict flat_at_degree(const Presentation& P, std::size_t n, const DimOptions& opt = {})
{
    if (P.deformation.empty())
        throw std::invalid_argument("presentation has no deformation parameter");
    FlatnessVerdict v;
    v.degree = n;
    v.generic_dim = filtered_dim(P, n, opt);
    DimOptions special = opt;
    for (auto& [s, val] : deformation_to_zero(P))
        special.at[s] = val;
    v.special_dim = filtered_dim(P, n, special);
    v.flat = v.generic_dim == v.special_dim;
    return v;
}

namespace detail {

// Saturates the K[hbar]-row module B: afterwards B(0) has full rank.
inline std::vector<SparseRow<ParamPoly>> saturate(std::vector<SparseRow<ParamPoly>> B, Symbol hbar)
{
    const std::map<Symbol, Cyclotomic> zero{{hbar, Cyclotomic(0)}};
    for (;;) {
        // dependency among rows of B(0), via elimination with tracking
        std::vector<SparseRow<Cyclotomic>> rows;
        std::vector<std::vector<Cyclotomic>> combo;
        std::optional<std::vector<Cyclotomic>> lambda;
        std::map<std::size_t, std::size_t> pivot_row;
        for (std::size_t i = 0; i < B.size() && !lambda; ++i) {
            auto r = evaluate_row(B[i], zero);
            std::vector<Cyclotomic> c(B.size(), Cyclotomic(0));
            c[i] = 1;
            // reduce by earlier rows
            bool changed = true;
            while (changed && !r.empty()) {
                changed = false;
                auto it = pivot_row.find(r.front().first);
                if (it != pivot_row.end()) {
                    const auto& p = rows[it->second];
                    const Cyclotomic f = r.front().second / p.front().second;
                    r = detail::combine(r, Cyclotomic(1), p, f);
                    for (std::size_t j = 0; j < B.size(); ++j)
                        if (!combo[it->second][j].is_zero())
                            c[j] -= f * combo[it->second][j];
                    changed = true;
                }
            }
            if (r.empty()) {
                lambda = std::move(c);
                break;
            }
            pivot_row[r.front().first] = rows.size();
            rows.push_back(std::move(r));
            combo.push_back(std::move(c));
        }
        if (!lambda)
            return B;
        std::size_t replace = 0;
        std::map<std::size_t, ParamPoly> acc;
        for (std::size_t i = 0; i < B.size(); ++i) {
            if ((*lambda)[i].is_zero())
                continue;
            replace = i;
            for (const auto& [col, v] : B[i])
                acc[col] += v.scaled((*lambda)[i]);
        }
        const auto h = ParamPoly::variable(hbar);
        SparseRow<ParamPoly> next;
        for (auto& [col, v] : acc) {
            if (v.is_zero())
                continue;
            auto q = v.divide_exact(h);
            if (!q)
                throw internal_error("saturation step produced a row not divisible by the deformation parameter");
            next.emplace_back(col, std::move(*q));
        }
        if (next.empty())
            throw internal_error("saturation step produced a zero row");
        B[replace] = std::move(next);
    }
}

inline SmashElement element_from_row(const SparseRow<Cyclotomic>& row, const ColumnIndex& cols)
{
    SmashElement e;
    for (const auto& [c, v] : row) {
        auto [g, w] = cols.decode_col(c);
        e.add(g, std::move(w), ParamPoly(v));
    }
    return e;
}

} // namespace detail

/// Searches truncation degrees 0..n_max for an element v outside the
/// relation span with hbar*v inside it (hbar = first deformation
/// parameter, other parameters at a seeded random point). Returns one of
/// minimal filtered degree.
inline std::optional<TorsionWitness> torsion_witness(const Presentation& P, std::size_t n_max, std::uint64_t seed = 0)
{
    if (P.deformation.empty())
        throw std::invalid_argument("presentation has no deformation parameter");
    const Symbol hbar = P.deformation.front();
    auto others = detail::relation_symbols(P.relations);
    others.erase(hbar);
    Specializer sampler(seed);
    const auto rels = detail::substituted(P.relations, sampler.substitution(others));
    const std::map<Symbol, Cyclotomic> at_zero{{hbar, Cyclotomic(0)}};

    std::optional<TorsionWitness> best;
    for (std::size_t n = 0; n <= n_max; ++n) {
        detail::ColumnIndex cols(P.group.order(), P.v_dim, n);
        Echelon<ParamPoly> generic(cols.size());
        Echelon<Cyclotomic> special(cols.size());
        detail::for_each_placement(P.group, P.v_dim, rels, cols, [&](SparseRow<ParamPoly>&& r) {
            special.insert(detail::evaluate_row(r, at_zero));
            generic.insert(std::move(r));
        });
        for (std::size_t d = 0; d <= n; ++d) {
            if (best && best->degree <= d)
                break;
            const std::size_t start = cols.region_start(d);
            if (generic.pivots_from(start) <= special.pivots_from(start))
                continue;
            std::vector<SparseRow<ParamPoly>> B;
            for (const auto& r : generic.rows())
                if (r.front().first >= start)
                    B.push_back(r);
            B = detail::saturate(std::move(B), hbar);
            for (const auto& r : B) {
                auto rem = special.reduce(detail::evaluate_row(r, at_zero), true);
                if (rem.empty())
                    continue;
                const auto inv = rem.front().second.inverse();
                for (auto& [c, v] : rem)
                    v *= inv;
                best = TorsionWitness{detail::element_from_row(rem, cols), d, n};
                break;
            }
            if (!best || best->degree != d)
                throw internal_error("rank drop without a torsion witness");
            break;
        }
        if (best && best->degree == 0)
            break;
    }
    return best;
}

namespace detail {

// w1 = w2 relations over the trivial group where every letter x has some
// relation x^k = 1, so the presented monoid is a group.
inline bool is_group_presentation(const Presentation& P)
{
    if (!is_binomial_system(P.group, P.relations))
        return false;
    std::vector<bool> finite_order(P.v_dim, false);
    for (const auto& r : P.relations) {
        if (r.terms().size() != 2)
            return false;
        const auto& [lo, hi] = std::pair(r.terms().begin()->first, std::next(r.terms().begin())->first);
        if (lo.second.empty() && !hi.second.empty() &&
            std::all_of(hi.second.begin(), hi.second.end(), [&](int l) { return l == hi.second.front(); }))
            finite_order[hi.second.front()] = true;
    }
    return std::all_of(finite_order.begin(), finite_order.end(), [](bool b) { return b; });
}

/// Coset enumeration over the trivial subgroup (HLT strategy with
/// coincidence processing): the classes of words modulo the relations,
/// found without bounding word length. Column 2i is letter i, 2i+1 its
/// inverse.
class CosetTable {
public:
    CosetTable(std::size_t letters, std::vector<std::vector<int>> relators, std::size_t limit)
        : cols_(2 * letters), relators_(std::move(relators)), limit_(limit)
    {
        new_coset();
    }

    /// False if the coset limit was reached first.
    bool run()
    {
        for (std::size_t c = 0; c < table_.size(); ++c) {
            for (const auto& r : relators_) {
                if (!live(c))
                    break;
                if (!scan_and_fill(c, r))
                    return false;
            }
            for (std::size_t x = 0; x < cols_ && live(c); ++x)
                if (table_[c][x] < 0 && !define(c, x))
                    return false;
        }
        return true;
    }

    /// Live cosets renumbered 0.. in order, coset 0 the identity;
    /// result[c][letter] is the coset c.letter.
    std::vector<std::vector<std::size_t>> compact() const
    {
        std::vector<long> id(table_.size(), -1);
        std::size_t next = 0;
        for (std::size_t c = 0; c < table_.size(); ++c)
            if (live(c))
                id[c] = static_cast<long>(next++);
        std::vector<std::vector<std::size_t>> out(next, std::vector<std::size_t>(cols_ / 2));
        for (std::size_t c = 0; c < table_.size(); ++c)
            if (live(c))
                for (std::size_t l = 0; l < cols_ / 2; ++l)
                    out[id[c]][l] = static_cast<std::size_t>(id[table_[c][2 * l]]);
        return out;
    }

private:
    static std::size_t inv(std::size_t x) { return x ^ 1; }
    bool live(std::size_t c) const { return parent_[c] == static_cast<long>(c); }

    bool new_coset()
    {
        if (live_count_ >= limit_)
            return false;
        parent_.push_back(static_cast<long>(table_.size()));
        table_.emplace_back(cols_, -1);
        ++live_count_;
        return true;
    }

    bool define(std::size_t c, std::size_t x)
    {
        if (!new_coset())
            return false;
        const long d = static_cast<long>(table_.size() - 1);
        table_[c][x] = d;
        table_[d][inv(x)] = static_cast<long>(c);
        return true;
    }

    bool scan_and_fill(std::size_t c, const std::vector<int>& w)
    {
        const long n = static_cast<long>(w.size());
        long f = static_cast<long>(c), b = static_cast<long>(c);
        long i = 0, j = n - 1;
        for (;;) {
            while (i <= j && table_[f][w[i]] >= 0)
                f = table_[f][w[i++]];
            if (i > j) {
                if (f != static_cast<long>(c))
                    coincidence(f, static_cast<long>(c));
                return true;
            }
            while (j >= i && table_[b][inv(w[j])] >= 0)
                b = table_[b][inv(w[j--])];
            if (j < i) {
                coincidence(f, b);
                return true;
            }
            if (i == j) {
                table_[f][w[i]] = b;
                table_[b][inv(w[i])] = f;
                return true;
            }
            if (!define(static_cast<std::size_t>(f), static_cast<std::size_t>(w[i])))
                return false;
        }
    }

    long rep(long k)
    {
        long r = k;
        while (parent_[r] != r)
            r = parent_[r];
        while (parent_[k] != r) {
            const long next = parent_[k];
            parent_[k] = r;
            k = next;
        }
        return r;
    }

    void merge(long k, long l, std::vector<long>& queue)
    {
        k = rep(k);
        l = rep(l);
        if (k == l)
            return;
        if (l < k)
            std::swap(k, l);
        parent_[l] = k;
        --live_count_;
        queue.push_back(l);
    }

    void coincidence(long a, long b)
    {
        std::vector<long> queue;
        merge(a, b, queue);
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const long g = queue[q];
            for (std::size_t x = 0; x < cols_; ++x) {
                const long d = table_[g][x];
                if (d < 0)
                    continue;
                table_[d][inv(x)] = -1;
                const long mu = rep(g), nu = rep(d);
                if (table_[mu][x] >= 0)
                    merge(nu, table_[mu][x], queue);
                else if (table_[nu][inv(x)] >= 0)
                    merge(mu, table_[nu][inv(x)], queue);
                else {
                    table_[mu][x] = nu;
                    table_[nu][inv(x)] = mu;
                }
            }
        }
    }

    std::size_t cols_;
    std::vector<std::vector<int>> relators_;
    std::size_t limit_;
    std::size_t live_count_ = 0;
    std::vector<long> parent_;
    std::vector<std::vector<long>> table_;
};

inline constexpr std::size_t kCosetLimit = 200'000;

/// Right multiplication table of the presented group, or nullopt if the
/// enumeration exceeds the coset limit.
inline std::optional<std::vector<std::vector<std::size_t>>> enumerate_group(const Presentation& P,
                                                                            std::size_t limit = kCosetLimit)
{
    std::vector<std::vector<int>> relators;
    for (const auto& r : P.relations) {
        const auto& a = r.terms().begin()->first.second;
        const auto& b = std::next(r.terms().begin())->first.second;
        std::vector<int> rel;
        for (int l : a)
            rel.push_back(2 * l);
        for (auto it = b.rbegin(); it != b.rend(); ++it)
            rel.push_back(2 * *it + 1);
        if (!rel.empty())
            relators.push_back(std::move(rel));
    }
    CosetTable t(P.v_dim, std::move(relators), limit);
    if (!t.run())
        return std::nullopt;
    return t.compact();
}

/// Number of elements reachable by words of length <= n, n = 0.., from a
/// right multiplication table; stops once the count stops growing.
inline std::vector<std::size_t> ball_sizes(const std::vector<std::vector<std::size_t>>& right, std::vector<Word>* reps = nullptr)
{
    std::vector<long> dist(right.size(), -1);
    std::vector<std::size_t> frontier{0}, sizes{1};
    dist[0] = 0;
    if (reps)
        reps->assign(right.size(), Word{});
    for (long n = 1; !frontier.empty(); ++n) {
        std::vector<std::size_t> next;
        for (auto c : frontier)
            for (std::size_t l = 0; l < right[c].size(); ++l) {
                const auto d = right[c][l];
                if (dist[d] >= 0)
                    continue;
                dist[d] = n;
                if (reps) {
                    (*reps)[d] = (*reps)[c];
                    (*reps)[d].push_back(static_cast<int>(l));
                }
                next.push_back(d);
            }
        std::sort(next.begin(), next.end(), [&](std::size_t x, std::size_t y) {
            return !reps || (*reps)[x] < (*reps)[y];
        });
        frontier = std::move(next);
        sizes.push_back(sizes.back() + frontier.size());
    }
    return sizes;
}

} // namespace detail

/// Filtered dimensions for n = 0, 1, ... until two consecutive values agree;
/// returns that value (the order of the presented group), or nullopt if
/// that does not happen by n_max.
///
/// For group presentations (every letter has a relation x^k = 1) the
/// exact filtered dimensions of the quotient are word-ball sizes, read off
/// a coset enumeration; other presentations use relation placements of
/// degree <= n_max for every n.
inline std::optional<std::size_t> stabilized_group_order(const Presentation& P, std::size_t n_max)
{
    if (!detail::relation_symbols(P.relations).empty())
        throw std::invalid_argument("relations must not involve parameters");
    std::vector<std::size_t> dims;
    if (detail::is_group_presentation(P)) {
        const auto table = detail::enumerate_group(P);
        if (!table)
            return std::nullopt;
        dims = detail::ball_sizes(*table);
    } else {
        for (std::size_t n = 0; n <= n_max; ++n) {
            DimOptions opt;
            opt.slack = n_max - n;
            dims.push_back(filtered_dim(P, n, opt));
        }
    }
    for (std::size_t n = 1; n < dims.size() && n <= n_max; ++n)
        if (dims[n] == dims[n - 1])
            return dims[n];
    return std::nullopt;
}

/// Right-regular action of the letters on the presented group.
struct MonoidQuotient {
    std::vector<Word> representatives;           ///< shortlex-least word per element
    std::vector<std::vector<std::size_t>> right; ///< right[letter][element]
};

inline MonoidQuotient monoid_quotient(const Presentation& P)
{
    if (!detail::is_group_presentation(P))
        throw std::invalid_argument("regular representation needs relations w1 = w2 with every letter of finite order");
    const auto table = detail::enumerate_group(P);
    if (!table)
        throw size_budget_exceeded("coset enumeration exceeded " + std::to_string(detail::kCosetLimit) + " cosets");
    MonoidQuotient q;
    detail::ball_sizes(*table, &q.representatives);
    // renumber elements by representative
    std::vector<std::size_t> order(table->size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto &x = q.representatives[a], &y = q.representatives[b];
        return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    std::vector<std::size_t> pos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        pos[order[i]] = i;
    std::vector<Word> reps(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        reps[i] = q.representatives[order[i]];
    q.representatives = std::move(reps);
    q.right.assign(P.v_dim, std::vector<std::size_t>(order.size()));
    for (std::size_t c = 0; c < order.size(); ++c)
        for (std::size_t l = 0; l < P.v_dim; ++l)
            q.right[l][pos[c]] = pos[(*table)[c][l]];
    return q;
}

} // namespace deformlab

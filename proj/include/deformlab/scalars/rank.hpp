#pragma once

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars/matrix.hpp"

namespace deformlab {

/// Sparse row: (column, nonzero value) pairs sorted by column.
template <class T>
using SparseRow = std::vector<std::pair<std::size_t, T>>;

namespace detail {

inline bool is_unit(const Cyclotomic& x) { return !x.is_zero(); }
inline Cyclotomic unit_inverse(const Cyclotomic& x) { return x.inverse(); }
inline bool is_one(const Cyclotomic& x) { return x.is_one(); }

inline bool is_unit(const ParamPoly& x) { return !x.is_zero() && x.is_constant(); }
inline ParamPoly unit_inverse(const ParamPoly& x) { return ParamPoly(x.constant().inverse()); }
inline bool is_one(const ParamPoly& x) { return x.is_one(); }

template <class T>
SparseRow<T> scale(SparseRow<T> row, const T& s)
{
    for (auto& e : row)
        e.second = e.second * s;
    return row;
}

// alpha*a - beta*b
template <class T>
SparseRow<T> combine(const SparseRow<T>& a, const T& alpha, const SparseRow<T>& b, const T& beta)
{
    const bool alpha_one = is_one(alpha);
    SparseRow<T> r;
    r.reserve(a.size() + b.size());
    auto i = a.begin(), j = b.begin();
    while (i != a.end() || j != b.end()) {
        if (j == b.end() || (i != a.end() && i->first < j->first)) {
            r.emplace_back(i->first, alpha_one ? i->second : alpha * i->second);
            ++i;
        } else if (i == a.end() || j->first < i->first) {
            r.emplace_back(j->first, -(beta * j->second));
            ++j;
        } else {
            T v = (alpha_one ? i->second : alpha * i->second) - beta * j->second;
            if (!v.is_zero())
                r.emplace_back(i->first, std::move(v));
            ++i;
            ++j;
        }
    }
    return r;
}

} // namespace detail

/// Incremental row echelon basis over a field, or over an integral domain
/// (ParamPoly) using fraction-free elimination when a pivot is not a unit.
/// Ranks are ranks over the fraction field.
template <class T>
class Echelon {
public:
    explicit Echelon(std::size_t cols) : pivot_of_(cols, -1) {}

    std::size_t cols() const { return pivot_of_.size(); }
    std::size_t rank() const { return rows_.size(); }
    const std::vector<SparseRow<T>>& rows() const { return rows_; }

    bool has_pivot(std::size_t col) const { return pivot_of_[col] >= 0; }
    const SparseRow<T>& pivot_row(std::size_t col) const { return rows_[pivot_of_[col]]; }

    /// Number of pivots in columns >= col.
    std::size_t pivots_from(std::size_t col) const
    {
        std::size_t n = 0;
        for (const auto& r : rows_)
            if (r.front().first >= col)
                ++n;
        return n;
    }

    /// Adds row to the span; returns true if it was independent.
    bool insert(SparseRow<T> row)
    {
        row = reduce(std::move(row), false);
        if (row.empty())
            return false;
        if (detail::is_unit(row.front().second) && !detail::is_one(row.front().second))
            row = detail::scale(std::move(row), detail::unit_inverse(row.front().second));
        pivot_of_[row.front().first] = static_cast<long>(rows_.size());
        rows_.push_back(std::move(row));
        return true;
    }

    bool contains(SparseRow<T> row) const { return reduce(std::move(row), false).empty(); }

    /// Eliminates pivot columns from row: only leading terms unless full.
    SparseRow<T> reduce(SparseRow<T> row, bool full) const
    {
        std::size_t pos = 0;
        while (pos < row.size()) {
            const std::size_t col = row[pos].first;
            if (pivot_of_[col] < 0) {
                if (!full)
                    return row;
                ++pos;
                continue;
            }
            const auto& p = rows_[pivot_of_[col]];
            const T& lead = p.front().second;
            const T factor = row[pos].second;
            if (detail::is_one(lead))
                row = detail::combine(row, T(1), p, factor);
            else
                row = detail::combine(row, lead, p, factor);
            // entries before col are untouched; col itself is gone
            pos = static_cast<std::size_t>(
                std::lower_bound(row.begin(), row.end(), col,
                                 [](const auto& e, std::size_t c) { return e.first < c; }) -
                row.begin());
        }
        return row;
    }

private:
    std::vector<long> pivot_of_;
    std::vector<SparseRow<T>> rows_;
};

/// How generic ranks over the parameter fraction field are computed.
struct RankMode {
    enum class Kind { automatic, symbolic, specialize };

    Kind kind = Kind::automatic;
    std::uint64_t seed = 0;
    int trials = 3;
    std::size_t symbolic_limit = default_symbolic_limit();

    static RankMode symbolic()
    {
        RankMode m;
        m.kind = Kind::symbolic;
        return m;
    }

    static RankMode specialize(std::uint64_t seed, int trials = 3)
    {
        RankMode m;
        m.kind = Kind::specialize;
        m.seed = seed;
        m.trials = trials;
        return m;
    }

    static RankMode automatic(std::uint64_t seed = 0)
    {
        RankMode m;
        m.seed = seed;
        return m;
    }

    bool use_symbolic(std::size_t rows, std::size_t cols) const
    {
        switch (kind) {
        case Kind::symbolic:
            return true;
        case Kind::specialize:
            return false;
        default:
            return rows <= symbolic_limit && cols <= symbolic_limit;
        }
    }

    /// 200 unless DEFORMLAB_SYMBOLIC_LIMIT overrides it.
    static std::size_t default_symbolic_limit()
    {
        if (const char* env = std::getenv("DEFORMLAB_SYMBOLIC_LIMIT"))
            return static_cast<std::size_t>(std::stoull(env));
        return 200;
    }
};

/// Seeded source of random rational parameter values.
class Specializer {
public:
    explicit Specializer(std::uint64_t seed) : rng_(seed) {}

    Cyclotomic random_value()
    {
        std::uniform_int_distribution<long> num(-(1L << 30), 1L << 30);
        std::uniform_int_distribution<long> den(1, 1L << 12);
        long n = 0;
        while (n == 0)
            n = num(rng_);
        return Cyclotomic(Rational(n, den(rng_)));
    }

    std::map<Symbol, Cyclotomic> point(const std::set<Symbol>& symbols)
    {
        std::map<Symbol, Cyclotomic> p;
        for (Symbol s : symbols)
            p.emplace(s, random_value());
        return p;
    }

    Substitution substitution(const std::set<Symbol>& symbols)
    {
        Substitution sub;
        for (auto& [s, v] : point(symbols))
            sub.emplace(s, ParamPoly(v));
        return sub;
    }

private:
    std::mt19937_64 rng_;
};

inline constexpr int kSpecializationRetries = 16;

inline std::set<Symbol> symbols_of(const ExactMatrix& m)
{
    std::set<Symbol> s;
    for (const auto& x : m.data()) {
        s.merge(x.num().symbols());
        s.merge(x.den().symbols());
    }
    return s;
}

/// Rank of M over the fraction field of the parameter ring. Specialize
/// mode returns the maximum rank over random rational substitutions.
inline std::size_t matrix_rank(const ExactMatrix& m, const RankMode& mode = RankMode())
{
    const auto syms = symbols_of(m);
    if (syms.empty() || mode.use_symbolic(m.rows(), m.cols())) {
        Echelon<ParamPoly> e(m.cols());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            // clear denominators row by row
            std::vector<ParamPoly> dens;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                const auto& d = m(i, j).den();
                if (!m(i, j).is_zero() && !d.is_one() &&
                    std::find(dens.begin(), dens.end(), d) == dens.end())
                    dens.push_back(d);
            }
            ParamPoly common(1);
            for (const auto& d : dens)
                common *= d;
            SparseRow<ParamPoly> row;
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (m(i, j).is_zero())
                    continue;
                row.emplace_back(j, m(i, j).num() * *common.divide_exact(m(i, j).den()));
            }
            e.insert(std::move(row));
        }
        return e.rank();
    }

    if (mode.trials < 1)
        throw std::invalid_argument("specialize mode needs at least one trial");
    Specializer sampler(mode.seed);
    std::optional<std::size_t> best;
    for (int t = 0; t < mode.trials; ++t) {
        for (int attempt = 0; attempt < kSpecializationRetries; ++attempt) {
            const auto point = sampler.point(syms);
            Echelon<Cyclotomic> e(m.cols());
            bool ok = true;
            for (std::size_t i = 0; i < m.rows() && ok; ++i) {
                SparseRow<Cyclotomic> row;
                for (std::size_t j = 0; j < m.cols(); ++j) {
                    if (m(i, j).is_zero())
                        continue;
                    const Cyclotomic d = m(i, j).den().evaluate(point);
                    if (d.is_zero()) {
                        ok = false;
                        break;
                    }
                    Cyclotomic v = m(i, j).num().evaluate(point) / d;
                    if (!v.is_zero())
                        row.emplace_back(j, std::move(v));
                }
                if (ok)
                    e.insert(std::move(row));
            }
            if (ok) {
                best = std::max(best.value_or(0), e.rank());
                break;
            }
        }
    }
    if (!best)
        throw specialization_failed("every random substitution hit a zero denominator");
    return *best;
}

/// Rank after substituting values for some parameters (e.g. hbar = 0).
inline std::size_t matrix_rank_at(const ExactMatrix& m, const Substitution& at, const RankMode& mode = RankMode())
{
    ExactMatrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            s(i, j) = m(i, j).substitute(at);
    return matrix_rank(s, mode);
}

} // namespace deformlab

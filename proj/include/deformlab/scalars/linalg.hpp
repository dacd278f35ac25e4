#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars/matrix.hpp"

namespace deformlab {

// Dense Gaussian elimination over an exact field (Cyclotomic in practice).

template <class T>
struct RowEchelon {
    Matrix<T> reduced;              ///< reduced row echelon form
    std::vector<std::size_t> pivots; ///< pivot column of each nonzero row
};

template <class T>
RowEchelon<T> rref(Matrix<T> m)
{
    RowEchelon<T> out;
    std::size_t row = 0;
    for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
        std::size_t p = row;
        while (p < m.rows() && m(p, col).is_zero())
            ++p;
        if (p == m.rows())
            continue;
        if (p != row)
            for (std::size_t j = 0; j < m.cols(); ++j)
                std::swap(m(p, j), m(row, j));
        const T inv = m(row, col).inverse();
        for (std::size_t j = col; j < m.cols(); ++j)
            if (!m(row, j).is_zero())
                m(row, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == row || m(i, col).is_zero())
                continue;
            const T f = m(i, col);
            for (std::size_t j = col; j < m.cols(); ++j)
                if (!m(row, j).is_zero())
                    m(i, j) -= f * m(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.reduced = std::move(m);
    return out;
}

template <class T>
std::size_t rank(const Matrix<T>& m)
{
    return rref(m).pivots.size();
}

/// Basis of {x : m x = 0}, one vector per free column in increasing order.
template <class T>
std::vector<std::vector<T>> nullspace(const Matrix<T>& m)
{
    auto e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots)
        is_pivot[p] = true;
    std::vector<std::vector<T>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free])
            continue;
        std::vector<T> v(m.cols(), T(0));
        v[free] = T(1);
        for (std::size_t r = 0; r < e.pivots.size(); ++r)
            v[e.pivots[r]] = -e.reduced(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// A solution of m x = b with every free variable set to zero, or nullopt
/// if the system is inconsistent.
template <class T>
std::optional<std::vector<T>> solve(const Matrix<T>& m, const std::vector<T>& b)
{
    if (b.size() != m.rows())
        throw dimension_mismatch("right-hand side length mismatch");
    Matrix<T> aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j)
            aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    auto e = rref(std::move(aug));
    if (!e.pivots.empty() && e.pivots.back() == m.cols())
        return std::nullopt;
    std::vector<T> x(m.cols(), T(0));
    for (std::size_t r = 0; r < e.pivots.size(); ++r)
        x[e.pivots[r]] = e.reduced(r, m.cols());
    return x;
}

template <class T>
Matrix<T> inverse(const Matrix<T>& m)
{
    if (!m.is_square())
        throw dimension_mismatch("inverse of non-square matrix");
    const std::size_t n = m.rows();
    Matrix<T> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = m(i, j);
        aug(i, n + i) = T(1);
    }
    auto e = rref(std::move(aug));
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1)
        throw division_by_zero("matrix is singular");
    Matrix<T> inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            inv(i, j) = e.reduced(i, n + j);
    return inv;
}

/// Indices of a maximal independent subset of the columns (first-come).
template <class T>
std::vector<std::size_t> independent_columns(const Matrix<T>& m)
{
    return rref(m).pivots;
}

template <class T>
std::vector<T> mat_vec(const Matrix<T>& m, const std::vector<T>& v)
{
    if (v.size() != m.cols())
        throw dimension_mismatch("matrix-vector shape mismatch");
    std::vector<T> r(m.rows(), T(0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_zero() && !v[j].is_zero())
                r[i] += m(i, j) * v[j];
    return r;
}

} // namespace deformlab

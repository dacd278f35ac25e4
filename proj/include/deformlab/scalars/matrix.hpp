#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include "deformlab/errors.hpp"
#include "deformlab/scalars/cyclotomic.hpp"
#include "deformlab/scalars/param_poly.hpp"

namespace deformlab {

/// Dense row-major matrix over an exact scalar type.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init)
    {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw dimension_mismatch("ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const { return data_; }
    std::vector<T>& data() { return data_; }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_)
            throw dimension_mismatch("matrix product shape mismatch");
        Matrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& x = a(i, k);
                if (x.is_zero())
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (!b(k, j).is_zero())
                        r(i, j) += x * b(k, j);
            }
        return r;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b)
    {
        check_same(a, b);
        Matrix r = a;
        for (std::size_t i = 0; i < r.data_.size(); ++i)
            r.data_[i] += b.data_[i];
        return r;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b)
    {
        check_same(a, b);
        Matrix r = a;
        for (std::size_t i = 0; i < r.data_.size(); ++i)
            r.data_[i] -= b.data_[i];
        return r;
    }

    Matrix operator-() const
    {
        Matrix r = *this;
        for (auto& x : r.data_)
            x = -x;
        return r;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    bool is_zero() const
    {
        for (const auto& x : data_)
            if (!x.is_zero())
                return false;
        return true;
    }

    std::string to_string() const
    {
        std::string s = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            s += i ? ", [" : "[";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j)
                    s += ", ";
                s += (*this)(i, j).to_string();
            }
            s += "]";
        }
        return s + "]";
    }

private:
    static void check_same(const Matrix& a, const Matrix& b)
    {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw dimension_mismatch("matrix shape mismatch");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> data_;
};

using CycMatrix = Matrix<Cyclotomic>;
using PolyMatrix = Matrix<ParamPoly>;
/// Matrix over the fraction field of the parameter ring.
using ExactMatrix = Matrix<ParamFraction>;

template <class To, class From>
Matrix<To> convert(const Matrix<From>& m)
{
    Matrix<To> r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            r(i, j) = To(m(i, j));
    return r;
}

} // namespace deformlab

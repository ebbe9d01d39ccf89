// SPDX-License-Identifier: Apache-2.0
//
// softnull: many-antenna full-duplex simulation via digital beamforming
// Copyright (c) 2026 the softnull authors
//
// Licensed under the Apache License, Version 2.0; see LICENSE for terms.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace softnull {

using cxd = std::complex<double>;

/// Dense row-major matrix. All channel/precoder symbols live in the complex
/// instantiation; dB maps and other real-valued tables use the double one.
template <typename T>
class Matrix {
  public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T value = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::vector<T> &data() { return data_; }
    const std::vector<T> &data() const { return data_; }

    bool operator==(const Matrix &o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using ComplexMatrix = Matrix<cxd>;
using RealMatrix = Matrix<double>;

namespace detail {
inline double sq_mag(double x) { return x * x; }
inline double sq_mag(const cxd &x) { return std::norm(x); }
inline double conj_scalar(double x) { return x; }
inline cxd conj_scalar(const cxd &x) { return std::conj(x); }
inline bool finite_scalar(double x) { return std::isfinite(x); }
inline bool finite_scalar(const cxd &x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
}
} // namespace detail

template <typename T>
Matrix<T> operator*(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix product: inner dimensions differ");
    Matrix<T> out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                out(i, j) += aik * b(k, j);
        }
    return out;
}

template <typename T>
Matrix<T> operator+(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix sum: dimensions differ");
    Matrix<T> out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] += b.data()[i];
    return out;
}

template <typename T>
Matrix<T> operator-(const Matrix<T> &a, const Matrix<T> &b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix difference: dimensions differ");
    Matrix<T> out = a;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data()[i] -= b.data()[i];
    return out;
}

template <typename T, typename S>
Matrix<T> operator*(const S &s, const Matrix<T> &m) {
    Matrix<T> out = m;
    for (auto &x : out.data())
        x *= s;
    return out;
}

/// Conjugate transpose.
inline ComplexMatrix adjoint(const ComplexMatrix &a) {
    ComplexMatrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(j, i) = std::conj(a(i, j));
    return out;
}

template <typename T>
Matrix<T> transpose(const Matrix<T> &a) {
    Matrix<T> out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(j, i) = a(i, j);
    return out;
}

/// Sum of squared entry magnitudes (total power carried by the matrix).
template <typename T>
double frobenius_norm_sq(const Matrix<T> &a) {
    double s = 0.0;
    for (const auto &x : a.data())
        s += detail::sq_mag(x);
    return s;
}

template <typename T>
double frobenius_norm(const Matrix<T> &a) {
    return std::sqrt(frobenius_norm_sq(a));
}

template <typename T>
bool is_finite(const Matrix<T> &a) {
    for (const auto &x : a.data())
        if (!detail::finite_scalar(x))
            return false;
    return true;
}

template <typename T>
double max_abs(const Matrix<T> &a) {
    double m = 0.0;
    for (const auto &x : a.data())
        m = std::max(m, std::abs(x));
    return m;
}

template <typename T>
Matrix<T> select_rows(const Matrix<T> &a, const std::vector<std::size_t> &idx) {
    Matrix<T> out(idx.size(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= a.rows())
            throw std::invalid_argument("select_rows: index out of range");
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(i, j) = a(idx[i], j);
    }
    return out;
}

template <typename T>
Matrix<T> select_cols(const Matrix<T> &a, const std::vector<std::size_t> &idx) {
    Matrix<T> out(a.rows(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        if (idx[j] >= a.cols())
            throw std::invalid_argument("select_cols: index out of range");
        for (std::size_t i = 0; i < a.rows(); ++i)
            out(i, j) = a(i, idx[j]);
    }
    return out;
}

} // namespace softnull

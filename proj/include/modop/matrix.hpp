#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "modop/errors.hpp"

namespace modop {

using Complex = std::complex<double>;

inline double conj_of(double x) { return x; }
inline Complex conj_of(const Complex& z) { return std::conj(z); }
inline double abs2(double x) { return x * x; }
inline double abs2(const Complex& z) { return std::norm(z); }

/// Dense column-major matrix. Columns are contiguous, which is what the
/// one-sided Jacobi sweeps in numkernel want.
template <class Scalar>
class Matrix {
 public:
  using value_type = Scalar;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  // Row-wise literal: Matrix{{a, b}, {c, d}}.
  Matrix(std::initializer_list<std::initializer_list<Scalar>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.assign(rows_ * cols_, Scalar{});
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw ShapeMismatch("ragged matrix literal");
      std::size_t j = 0;
      for (const auto& v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar{1};
    return m;
  }

  static Matrix diagonal(std::span<const Scalar> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  std::span<Scalar> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Scalar> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<Scalar> data() { return data_; }
  std::span<const Scalar> data() const { return data_; }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(Scalar s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("matrix dimensions differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

using CMatrix = Matrix<Complex>;
using RMatrix = Matrix<double>;

template <class S>
Matrix<S> operator+(Matrix<S> a, const Matrix<S>& b) {
  return a += b;
}
template <class S>
Matrix<S> operator-(Matrix<S> a, const Matrix<S>& b) {
  return a -= b;
}
template <class S>
Matrix<S> operator-(Matrix<S> a) {
  return a *= S{-1};
}
template <class S>
Matrix<S> operator*(S s, Matrix<S> a) {
  return a *= s;
}
inline CMatrix operator*(double s, CMatrix a) { return a *= Complex{s}; }

template <class S>
Matrix<S> operator*(const Matrix<S>& a, const Matrix<S>& b) {
  if (a.cols() != b.rows()) throw ShapeMismatch("matrix product dimensions differ");
  Matrix<S> c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const S blj = b(l, j);
      if (blj == S{}) continue;
      auto al = a.col(l);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += al[i] * blj;
    }
  }
  return c;
}

template <class S>
Matrix<S> adjoint(const Matrix<S>& a) {
  Matrix<S> r(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) r(j, i) = conj_of(a(i, j));
  return r;
}

template <class S>
double frobenius_norm(const Matrix<S>& a) {
  double s = 0.0;
  for (const auto& v : a.data()) s += abs2(v);
  return std::sqrt(s);
}

template <class S>
double max_abs(const Matrix<S>& a) {
  double m = 0.0;
  for (const auto& v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

template <class S>
S trace(const Matrix<S>& a) {
  S t{};
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

}  // namespace modop

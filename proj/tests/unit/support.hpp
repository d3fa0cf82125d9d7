#pragma once

#include <Eigen/Dense>

#include "doctest.h"
#include "modop/harness.hpp"
#include "modop/matrix.hpp"
#include "modop/module_space.hpp"

namespace testing {

using modop::AlgebraShape;
using modop::CMatrix;
using modop::Complex;
using modop::OperatorMatrix;

inline constexpr Complex I{0.0, 1.0};

// Operator on ℂ^k (A = ℂ) from a plain k×k matrix.
inline OperatorMatrix scalar_op(const CMatrix& m) {
  return OperatorMatrix::from_blocks(AlgebraShape({1}), m.rows(), {m});
}

inline OperatorMatrix diag_op(std::initializer_list<Complex> d) {
  std::vector<Complex> v(d);
  return scalar_op(CMatrix::diagonal(v));
}

inline double dist(const OperatorMatrix& a, const OperatorMatrix& b) { return modop::norm(a - b); }
inline double dist(const CMatrix& a, const CMatrix& b) { return modop::frobenius_norm(a - b); }

inline CMatrix random_matrix(std::size_t rows, std::size_t cols, modop::harness::Rng& rng) {
  CMatrix m(rows, cols);
  for (auto& z : m.data()) z = rng.cnormal();
  return m;
}

inline Eigen::MatrixXcd to_eigen(const CMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) e(i, j) = m(i, j);
  return e;
}

inline CMatrix from_eigen(const Eigen::MatrixXcd& e) {
  CMatrix m(e.rows(), e.cols());
  for (Eigen::Index j = 0; j < e.cols(); ++j)
    for (Eigen::Index i = 0; i < e.rows(); ++i) m(i, j) = e(i, j);
  return m;
}

// Independent oracle for the operator norm.
inline double oracle_norm(const OperatorMatrix& t) {
  const auto e = to_eigen(modop::embed(t));
  if (e.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(e).singularValues()(0);
}

// Random (shape, rank) as drawn by the harness, capped at embed dimension 24.
inline modop::harness::Dims random_dims(modop::harness::Rng& rng) { return modop::harness::gen_dims(rng, 3, 4); }

}  // namespace testing

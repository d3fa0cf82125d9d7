#pragma once

#include <cstddef>
#include <vector>

#include "modop/matrix.hpp"

namespace modop {

/// Shape of a finite-dimensional C*-algebra A = M_{n1}(C) ⊕ … ⊕ M_{nm}(C).
class AlgebraShape {
 public:
  explicit AlgebraShape(std::vector<int> block_dims);

  const std::vector<int>& block_dims() const { return dims_; }
  std::size_t block_count() const { return dims_.size(); }
  std::size_t block_dim(std::size_t b) const { return static_cast<std::size_t>(dims_[b]); }
  /// Σ nᵢ
  std::size_t total_dim() const { return total_; }
  /// Complex dimension of A, Σ nᵢ².
  std::size_t algebra_dim() const;

  friend bool operator==(const AlgebraShape&, const AlgebraShape&) = default;

 private:
  std::vector<int> dims_;
  std::size_t total_ = 0;
};

/// Block-diagonal element of A.
class AlgebraElement {
 public:
  AlgebraElement(AlgebraShape shape, std::vector<CMatrix> blocks);

  static AlgebraElement zero(const AlgebraShape& shape);
  static AlgebraElement identity(const AlgebraShape& shape);
  /// Matrix unit E_{ij} placed in block b, zero elsewhere.
  static AlgebraElement unit(const AlgebraShape& shape, std::size_t b, std::size_t i, std::size_t j);

  const AlgebraShape& shape() const { return shape_; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t b) const { return blocks_[b]; }

  AlgebraElement& operator+=(const AlgebraElement& o);
  AlgebraElement& operator-=(const AlgebraElement& o);
  AlgebraElement& operator*=(Complex s);

  friend bool operator==(const AlgebraElement&, const AlgebraElement&) = default;

 private:
  AlgebraShape shape_;
  std::vector<CMatrix> blocks_;
};

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b);
AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(Complex s, AlgebraElement a);

AlgebraElement adjoint(const AlgebraElement& a);

/// C*-norm: the largest block spectral norm.
double norm(const AlgebraElement& a);

/// Positive square root of a positive element; eigenvalues slightly below
/// zero (within the PSD tolerance) are clamped. Throws NotPositive.
AlgebraElement positive_sqrt(const AlgebraElement& a);

/// Largest |entry| difference, for tests and tolerance checks.
double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b);

}  // namespace modop

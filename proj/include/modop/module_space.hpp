#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "modop/algebra.hpp"

namespace modop {

inline constexpr double kEmbedTol = 1e-12;

/// Element of the standard Hilbert module X = A^k.
///
/// Stored per algebra block b as the (k·n_b) × n_b matrix stacking the b-th
/// blocks of the k entries. In that form ⟨x,y⟩ is X_b†·Y_b and the right
/// action x·a is X_b·a_b.
class ModuleVector {
 public:
  ModuleVector(const AlgebraShape& shape, const std::vector<AlgebraElement>& entries);
  static ModuleVector from_blocks(AlgebraShape shape, std::size_t rank, std::vector<CMatrix> blocks);
  static ModuleVector zero(const AlgebraShape& shape, std::size_t rank);

  const AlgebraShape& shape() const { return shape_; }
  std::size_t rank() const { return rank_; }
  AlgebraElement entry(std::size_t r) const;
  const std::vector<CMatrix>& blocks() const { return blocks_; }

  /// x·a
  ModuleVector right_mul(const AlgebraElement& a) const;

  ModuleVector& operator+=(const ModuleVector& o);
  ModuleVector& operator*=(Complex s);

 private:
  ModuleVector(AlgebraShape shape, std::size_t rank) : shape_(std::move(shape)), rank_(rank) {}

  AlgebraShape shape_;
  std::size_t rank_ = 0;
  std::vector<CMatrix> blocks_;
};

ModuleVector operator+(ModuleVector a, const ModuleVector& b);
ModuleVector operator*(Complex s, ModuleVector a);

/// A-valued inner product Σᵢ xᵢ*·yᵢ, A-linear in y.
AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y);

/// ‖⟨x,x⟩‖^{1/2}
double norm(const ModuleVector& x);

/// Adjointable operator on A^k as a k×k matrix over A.
///
/// Internally each algebra block b carries the (k·n_b)-square complex matrix
/// whose (r,c) sub-block is T_{rc} restricted to block b. The concatenation of
/// these along the diagonal is the embedding M_k(⊕M_{nᵢ}) ≅ ⊕M_{k·nᵢ}.
class OperatorMatrix {
 public:
  /// entries in row-major order, k·k of them.
  OperatorMatrix(const AlgebraShape& shape, std::size_t rank, const std::vector<AlgebraElement>& entries);
  static OperatorMatrix from_blocks(AlgebraShape shape, std::size_t rank, std::vector<CMatrix> blocks);
  static OperatorMatrix identity(const AlgebraShape& shape, std::size_t rank);
  static OperatorMatrix zero(const AlgebraShape& shape, std::size_t rank);

  const AlgebraShape& shape() const { return shape_; }
  std::size_t rank() const { return rank_; }
  /// k·Σnᵢ, the side of the full embedded matrix.
  std::size_t embed_dim() const { return rank_ * shape_.total_dim(); }
  AlgebraElement entry(std::size_t r, std::size_t c) const;
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const CMatrix& block(std::size_t b) const { return blocks_[b]; }

  OperatorMatrix& operator+=(const OperatorMatrix& o);
  OperatorMatrix& operator-=(const OperatorMatrix& o);
  OperatorMatrix& operator*=(Complex s);

  bool same_space(const OperatorMatrix& o) const { return rank_ == o.rank_ && shape_ == o.shape_; }

  friend bool operator==(const OperatorMatrix&, const OperatorMatrix&) = default;

 private:
  OperatorMatrix(AlgebraShape shape, std::size_t rank) : shape_(std::move(shape)), rank_(rank) {}

  AlgebraShape shape_;
  std::size_t rank_ = 0;
  std::vector<CMatrix> blocks_;
};

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(Complex s, OperatorMatrix a);
OperatorMatrix operator*(double s, OperatorMatrix a);
ModuleVector operator*(const OperatorMatrix& t, const ModuleVector& x);

/// Entry-wise *-transpose.
OperatorMatrix adjoint(const OperatorMatrix& t);

/// Operator norm on L(X): largest singular value of the embedding.
double norm(const OperatorMatrix& t);

/// Apply f to every embedded block.
OperatorMatrix map_blocks(const OperatorMatrix& t, const std::function<CMatrix(const CMatrix&)>& f);

/// Full embedded (k·Σnᵢ)-square complex matrix, block-diagonal by algebra block.
CMatrix embed(const OperatorMatrix& t);

/// Inverse of embed. Throws StructureViolation if the mass outside the
/// block-diagonal pattern exceeds kEmbedTol·(1+‖m‖).
OperatorMatrix unembed(const CMatrix& m, const AlgebraShape& shape, std::size_t rank);

}  // namespace modop

#include "modop/module_space.hpp"

#include <algorithm>
#include <string>

#include "modop/numkernel.hpp"

namespace modop {
namespace {

void require_rank(std::size_t rank) {
  if (rank < 1) throw InvalidShape("module rank must be at least 1");
}

}  // namespace

// ---- ModuleVector ----------------------------------------------------------

ModuleVector::ModuleVector(const AlgebraShape& shape, const std::vector<AlgebraElement>& entries)
    : shape_(shape), rank_(entries.size()) {
  require_rank(rank_);
  for (const auto& e : entries)
    if (!(e.shape() == shape_)) throw ShapeMismatch("module vector entries must share the algebra shape");
  for (std::size_t b = 0; b < shape_.block_count(); ++b) {
    const std::size_t n = shape_.block_dim(b);
    CMatrix blk(rank_ * n, n);
    for (std::size_t r = 0; r < rank_; ++r)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) blk(r * n + i, j) = entries[r].block(b)(i, j);
    blocks_.push_back(std::move(blk));
  }
}

ModuleVector ModuleVector::from_blocks(AlgebraShape shape, std::size_t rank, std::vector<CMatrix> blocks) {
  require_rank(rank);
  ModuleVector v(std::move(shape), rank);
  if (blocks.size() != v.shape_.block_count()) throw ShapeMismatch("module vector block count");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t n = v.shape_.block_dim(b);
    if (blocks[b].rows() != rank * n || blocks[b].cols() != n) throw ShapeMismatch("module vector block dimensions");
  }
  v.blocks_ = std::move(blocks);
  return v;
}

ModuleVector ModuleVector::zero(const AlgebraShape& shape, std::size_t rank) {
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) blocks.emplace_back(rank * n, n);
  return from_blocks(shape, rank, std::move(blocks));
}

AlgebraElement ModuleVector::entry(std::size_t r) const {
  if (r >= rank_) throw ShapeMismatch("module vector index out of range");
  std::vector<CMatrix> out;
  for (std::size_t b = 0; b < shape_.block_count(); ++b) {
    const std::size_t n = shape_.block_dim(b);
    CMatrix e(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) e(i, j) = blocks_[b](r * n + i, j);
    out.push_back(std::move(e));
  }
  return {shape_, std::move(out)};
}

ModuleVector ModuleVector::right_mul(const AlgebraElement& a) const {
  if (!(a.shape() == shape_)) throw ShapeMismatch("algebra shapes differ");
  ModuleVector v(shape_, rank_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) v.blocks_.push_back(blocks_[b] * a.block(b));
  return v;
}

ModuleVector& ModuleVector::operator+=(const ModuleVector& o) {
  if (!(shape_ == o.shape_) || rank_ != o.rank_) throw ShapeMismatch("module vectors live in different modules");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
  return *this;
}

ModuleVector& ModuleVector::operator*=(Complex s) {
  for (auto& blk : blocks_) blk *= s;
  return *this;
}

ModuleVector operator+(ModuleVector a, const ModuleVector& b) { return a += b; }
ModuleVector operator*(Complex s, ModuleVector a) { return a *= s; }

AlgebraElement inner_product(const ModuleVector& x, const ModuleVector& y) {
  if (!(x.shape() == y.shape()) || x.rank() != y.rank()) throw ShapeMismatch("inner product of vectors from different modules");
  std::vector<CMatrix> blocks;
  for (std::size_t b = 0; b < x.blocks().size(); ++b) blocks.push_back(adjoint(x.blocks()[b]) * y.blocks()[b]);
  return {x.shape(), std::move(blocks)};
}

double norm(const ModuleVector& x) { return std::sqrt(norm(inner_product(x, x))); }

// ---- OperatorMatrix --------------------------------------------------------

OperatorMatrix::OperatorMatrix(const AlgebraShape& shape, std::size_t rank, const std::vector<AlgebraElement>& entries)
    : shape_(shape), rank_(rank) {
  require_rank(rank_);
  if (entries.size() != rank_ * rank_) throw ShapeMismatch("operator needs k*k entries");
  for (const auto& e : entries)
    if (!(e.shape() == shape_)) throw ShapeMismatch("operator entries must share the algebra shape");
  for (std::size_t b = 0; b < shape_.block_count(); ++b) {
    const std::size_t n = shape_.block_dim(b);
    CMatrix blk(rank_ * n, rank_ * n);
    for (std::size_t r = 0; r < rank_; ++r)
      for (std::size_t c = 0; c < rank_; ++c) {
        const CMatrix& src = entries[r * rank_ + c].block(b);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < n; ++i) blk(r * n + i, c * n + j) = src(i, j);
      }
    blocks_.push_back(std::move(blk));
  }
}

OperatorMatrix OperatorMatrix::from_blocks(AlgebraShape shape, std::size_t rank, std::vector<CMatrix> blocks) {
  require_rank(rank);
  OperatorMatrix t(std::move(shape), rank);
  if (blocks.size() != t.shape_.block_count()) throw ShapeMismatch("operator block count");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::size_t m = rank * t.shape_.block_dim(b);
    if (blocks[b].rows() != m || blocks[b].cols() != m)
      throw ShapeMismatch("operator block " + std::to_string(b) + " has the wrong dimensions");
  }
  t.blocks_ = std::move(blocks);
  return t;
}

OperatorMatrix OperatorMatrix::identity(const AlgebraShape& shape, std::size_t rank) {
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) blocks.push_back(CMatrix::identity(rank * n));
  return from_blocks(shape, rank, std::move(blocks));
}

OperatorMatrix OperatorMatrix::zero(const AlgebraShape& shape, std::size_t rank) {
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) blocks.emplace_back(rank * n, rank * n);
  return from_blocks(shape, rank, std::move(blocks));
}

AlgebraElement OperatorMatrix::entry(std::size_t r, std::size_t c) const {
  if (r >= rank_ || c >= rank_) throw ShapeMismatch("operator index out of range");
  std::vector<CMatrix> out;
  for (std::size_t b = 0; b < shape_.block_count(); ++b) {
    const std::size_t n = shape_.block_dim(b);
    CMatrix e(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) e(i, j) = blocks_[b](r * n + i, c * n + j);
    out.push_back(std::move(e));
  }
  return {shape_, std::move(out)};
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& o) {
  if (!same_space(o)) throw ShapeMismatch("operators act on different modules");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& o) {
  if (!same_space(o)) throw ShapeMismatch("operators act on different modules");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= o.blocks_[b];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(Complex s) {
  for (auto& blk : blocks_) blk *= s;
  return *this;
}

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
OperatorMatrix operator*(Complex s, OperatorMatrix a) { return a *= s; }
OperatorMatrix operator*(double s, OperatorMatrix a) { return a *= Complex(s); }

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (!a.same_space(b)) throw ShapeMismatch("operators act on different modules");
  std::vector<CMatrix> blocks;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) blocks.push_back(a.block(i) * b.block(i));
  return OperatorMatrix::from_blocks(a.shape(), a.rank(), std::move(blocks));
}

ModuleVector operator*(const OperatorMatrix& t, const ModuleVector& x) {
  if (!(t.shape() == x.shape()) || t.rank() != x.rank()) throw ShapeMismatch("operator and vector live on different modules");
  std::vector<CMatrix> blocks;
  for (std::size_t b = 0; b < t.blocks().size(); ++b) blocks.push_back(t.block(b) * x.blocks()[b]);
  return ModuleVector::from_blocks(t.shape(), t.rank(), std::move(blocks));
}

OperatorMatrix adjoint(const OperatorMatrix& t) {
  return map_blocks(t, [](const CMatrix& m) { return adjoint(m); });
}

double norm(const OperatorMatrix& t) {
  double n = 0.0;
  for (const auto& blk : t.blocks()) n = std::max(n, numkernel::spectral_norm(blk));
  return n;
}

OperatorMatrix map_blocks(const OperatorMatrix& t, const std::function<CMatrix(const CMatrix&)>& f) {
  std::vector<CMatrix> blocks;
  blocks.reserve(t.blocks().size());
  for (const auto& blk : t.blocks()) blocks.push_back(f(blk));
  return OperatorMatrix::from_blocks(t.shape(), t.rank(), std::move(blocks));
}

CMatrix embed(const OperatorMatrix& t) {
  const std::size_t d = t.embed_dim();
  CMatrix m(d, d);
  std::size_t off = 0;
  for (const auto& blk : t.blocks()) {
    for (std::size_t j = 0; j < blk.cols(); ++j)
      for (std::size_t i = 0; i < blk.rows(); ++i) m(off + i, off + j) = blk(i, j);
    off += blk.rows();
  }
  return m;
}

OperatorMatrix unembed(const CMatrix& m, const AlgebraShape& shape, std::size_t rank) {
  require_rank(rank);
  const std::size_t d = rank * shape.total_dim();
  if (m.rows() != d || m.cols() != d) throw ShapeMismatch("embedded matrix has the wrong size for this module");

  std::vector<std::size_t> owner(d);
  std::vector<CMatrix> blocks;
  std::size_t off = 0;
  for (std::size_t b = 0; b < shape.block_count(); ++b) {
    const std::size_t size = rank * shape.block_dim(b);
    CMatrix blk(size, size);
    for (std::size_t j = 0; j < size; ++j)
      for (std::size_t i = 0; i < size; ++i) blk(i, j) = m(off + i, off + j);
    for (std::size_t i = 0; i < size; ++i) owner[off + i] = b;
    blocks.push_back(std::move(blk));
    off += size;
  }

  double stray = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < d; ++i)
      if (owner[i] != owner[j]) stray += std::norm(m(i, j));
  stray = std::sqrt(stray);
  if (stray > 0.0 && stray > kEmbedTol * (1.0 + numkernel::spectral_norm(m)))
    throw StructureViolation("matrix is not block-structured for this module (stray mass " + std::to_string(stray) + ")");
  return OperatorMatrix::from_blocks(shape, rank, std::move(blocks));
}

}  // namespace modop

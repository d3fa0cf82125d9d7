#include "modop/algebra.hpp"

#include <algorithm>
#include <string>

#include "modop/numkernel.hpp"

namespace modop {

AlgebraShape::AlgebraShape(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw InvalidShape("algebra shape needs at least one block");
  for (int n : dims_) {
    if (n < 1) throw InvalidShape("block dimension must be positive, got " + std::to_string(n));
    total_ += static_cast<std::size_t>(n);
  }
}

std::size_t AlgebraShape::algebra_dim() const {
  std::size_t d = 0;
  for (int n : dims_) d += static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  return d;
}

AlgebraElement::AlgebraElement(AlgebraShape shape, std::vector<CMatrix> blocks)
    : shape_(std::move(shape)), blocks_(std::move(blocks)) {
  if (blocks_.size() != shape_.block_count()) throw ShapeMismatch("block count does not match algebra shape");
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const std::size_t n = shape_.block_dim(b);
    if (blocks_[b].rows() != n || blocks_[b].cols() != n)
      throw ShapeMismatch("block " + std::to_string(b) + " has the wrong dimensions");
  }
}

AlgebraElement AlgebraElement::zero(const AlgebraShape& shape) {
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) blocks.emplace_back(n, n);
  return {shape, std::move(blocks)};
}

AlgebraElement AlgebraElement::identity(const AlgebraShape& shape) {
  std::vector<CMatrix> blocks;
  for (int n : shape.block_dims()) blocks.push_back(CMatrix::identity(n));
  return {shape, std::move(blocks)};
}

AlgebraElement AlgebraElement::unit(const AlgebraShape& shape, std::size_t b, std::size_t i, std::size_t j) {
  auto e = zero(shape);
  if (b >= shape.block_count() || i >= shape.block_dim(b) || j >= shape.block_dim(b))
    throw ShapeMismatch("matrix unit index out of range");
  e.blocks_[b](i, j) = 1.0;
  return e;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& o) {
  if (!(shape_ == o.shape_)) throw ShapeMismatch("algebra shapes differ");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] += o.blocks_[b];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& o) {
  if (!(shape_ == o.shape_)) throw ShapeMismatch("algebra shapes differ");
  for (std::size_t b = 0; b < blocks_.size(); ++b) blocks_[b] -= o.blocks_[b];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex s) {
  for (auto& blk : blocks_) blk *= s;
  return *this;
}

AlgebraElement operator+(AlgebraElement a, const AlgebraElement& b) { return a += b; }
AlgebraElement operator-(AlgebraElement a, const AlgebraElement& b) { return a -= b; }
AlgebraElement operator*(Complex s, AlgebraElement a) { return a *= s; }

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  if (!(a.shape() == b.shape())) throw ShapeMismatch("algebra shapes differ");
  std::vector<CMatrix> blocks;
  blocks.reserve(a.blocks().size());
  for (std::size_t i = 0; i < a.blocks().size(); ++i) blocks.push_back(a.block(i) * b.block(i));
  return {a.shape(), std::move(blocks)};
}

AlgebraElement adjoint(const AlgebraElement& a) {
  std::vector<CMatrix> blocks;
  for (const auto& blk : a.blocks()) blocks.push_back(adjoint(blk));
  return {a.shape(), std::move(blocks)};
}

double norm(const AlgebraElement& a) {
  double n = 0.0;
  for (const auto& blk : a.blocks()) n = std::max(n, numkernel::spectral_norm(blk));
  return n;
}

AlgebraElement positive_sqrt(const AlgebraElement& a) {
  const double scale = norm(a);
  std::vector<CMatrix> blocks;
  for (const auto& blk : a.blocks()) {
    // The clamp is relative to the whole element, not the individual block.
    const auto e = numkernel::herm_eig(blk);
    if (!e.lambda.empty() && e.lambda.front() < -numkernel::kPsdTol * (1.0 + scale))
      throw NotPositive("algebra element is not positive");
    blocks.push_back(numkernel::hermitian_calculus(blk, [](double l) { return Complex(std::sqrt(std::max(l, 0.0))); }));
  }
  return {a.shape(), std::move(blocks)};
}

double max_abs_diff(const AlgebraElement& a, const AlgebraElement& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.blocks().size(); ++i) m = std::max(m, max_abs(a.block(i) - b.block(i)));
  return m;
}

}  // namespace modop

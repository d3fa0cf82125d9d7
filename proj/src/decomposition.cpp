#include "modop/decomposition.hpp"

#include <algorithm>
#include <functional>

#include "modop/regular.hpp"

namespace modop {
namespace {

// Σ over selected k of x_k·y_k†, for columns of x and y.
CMatrix outer_sum(const CMatrix& x, const CMatrix& y, const std::vector<double>& weights,
                  const std::function<bool(std::size_t)>& keep) {
  CMatrix out(x.rows(), y.rows());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!keep(k) || weights[k] == 0.0) continue;
    auto xk = x.col(k);
    auto yk = y.col(k);
    for (std::size_t j = 0; j < y.rows(); ++j) {
      const Complex cy = weights[k] * std::conj(yk[j]);
      auto oj = out.col(j);
      for (std::size_t i = 0; i < x.rows(); ++i) oj[i] += xk[i] * cy;
    }
  }
  return out;
}

template <class F>
OperatorMatrix from_system(const OperatorMatrix& t, const SingularSystem& sys, F&& per_block) {
  std::vector<CMatrix> blocks;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) blocks.push_back(per_block(sys.blocks[b], t.block(b).rows()));
  return OperatorMatrix::from_blocks(t.shape(), t.rank(), std::move(blocks));
}

}  // namespace

std::size_t SingularSystem::rank() const {
  std::size_t r = 0;
  for (const auto& b : blocks)
    for (double s : b.sigma)
      if (s > cutoff) ++r;
  return r;
}

std::vector<double> SingularSystem::singular_values() const {
  std::vector<double> all;
  for (const auto& b : blocks) all.insert(all.end(), b.sigma.begin(), b.sigma.end());
  std::sort(all.begin(), all.end(), std::greater<>());
  return all;
}

SingularSystem singular_system(const OperatorMatrix& t) {
  SingularSystem sys;
  for (const auto& blk : t.blocks()) {
    sys.blocks.push_back(numkernel::svd(blk));
    if (!sys.blocks.back().sigma.empty()) sys.scale = std::max(sys.scale, sys.blocks.back().sigma.front());
  }
  sys.cutoff = numkernel::rank_cutoff(t.embed_dim(), sys.scale);
  return sys;
}

OperatorMatrix abs_op(const OperatorMatrix& t) {
  const auto sys = singular_system(t);
  auto abs = from_system(t, sys, [](const numkernel::SvdResult& r, std::size_t) {
    return outer_sum(r.v, r.v, r.sigma, [](std::size_t) { return true; });
  });
  return map_blocks(abs, [](const CMatrix& m) { return 0.5 * (m + adjoint(m)); });
}

PolarParts polar(const OperatorMatrix& t) {
  const auto sys = singular_system(t);
  auto v = from_system(t, sys, [&](const numkernel::SvdResult& r, std::size_t) {
    const std::vector<double> ones(r.sigma.size(), 1.0);
    return outer_sum(r.u, r.v, ones, [&](std::size_t k) { return r.sigma[k] > sys.cutoff; });
  });
  auto abs = from_system(t, sys, [](const numkernel::SvdResult& r, std::size_t) {
    CMatrix m = outer_sum(r.v, r.v, r.sigma, [](std::size_t) { return true; });
    return 0.5 * (m + adjoint(m));
  });
  return {std::move(v), std::move(abs)};
}

OperatorMatrix kernel_projection(const OperatorMatrix& t) {
  const auto sys = singular_system(t);
  return from_system(t, sys, [&](const numkernel::SvdResult& r, std::size_t n) {
    const std::vector<double> ones(r.sigma.size(), 1.0);
    return CMatrix::identity(n) - outer_sum(r.v, r.v, ones, [&](std::size_t k) { return r.sigma[k] > sys.cutoff; });
  });
}

OperatorMatrix range_projection(const OperatorMatrix& t) {
  const auto sys = singular_system(t);
  return from_system(t, sys, [&](const numkernel::SvdResult& r, std::size_t) {
    const std::vector<double> ones(r.sigma.size(), 1.0);
    return outer_sum(r.u, r.u, ones, [&](std::size_t k) { return r.sigma[k] > sys.cutoff; });
  });
}

Report check_polar_conditions(const OperatorMatrix& t, double tol) { return polar_residuals(t, polar(t), tol); }

Report polar_residuals(const OperatorMatrix& t, const PolarParts& parts, double tol) {
  Report rep{"polar_conditions"};
  const auto& v = parts.v;
  const auto& abs = parts.abs;
  const auto ts = adjoint(t);
  const auto vs = adjoint(v);
  const auto id = OperatorMatrix::identity(t.shape(), t.rank());
  const double bound = tol * (1.0 + norm(t));

  // (i) T = V|T|, V a partial isometry, Ker(V) = Ker(T)
  rep.add("factorization", norm(t - v * abs), bound);
  rep.add("partial_isometry", norm(v * vs * v - v), bound);
  rep.add("kernel_match", norm(kernel_projection(v) - kernel_projection(t)), bound);
  // (ii) X = Ker(|T|) ⊕ Ran(|T|) and X = Ker(T*) ⊕ Ran(T)
  rep.add("abs_splitting", norm(kernel_projection(abs) + range_projection(abs) - id), bound);
  rep.add("adjoint_splitting", norm(kernel_projection(ts) + range_projection(t) - id), bound);
  // (iii) T* = V*|T*|
  rep.add("adjoint_polar", norm(ts - vs * abs_op(ts)), bound);
  // (iv) F_T = V|F_T| with the same V
  const auto f = bounded_transform(t).transform();
  rep.add("transform_polar", norm(f - v * abs_op(f)), bound);

  rep.add("vstar_v_abs", norm(vs * v * abs - abs), bound);
  rep.add("vstar_t", norm(vs * t - abs), bound);
  rep.add("v_vstar_t", norm(v * vs * t - t), bound);
  rep.add("initial_projection", norm(vs * v - range_projection(ts)), bound);
  rep.add("final_projection", norm(v * vs - range_projection(t)), bound);
  rep.add("adjoint_kernel_match", norm(kernel_projection(vs) - kernel_projection(ts)), bound);
  rep.add("abs_squared", norm(abs * abs - ts * t), bound * (1.0 + norm(t)));
  return rep;
}

}  // namespace modop

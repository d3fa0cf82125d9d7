#include "modop/regular.hpp"

#include <algorithm>
#include <limits>

#include "modop/decomposition.hpp"
#include "modop/numkernel.hpp"

namespace modop {
namespace {

using numkernel::PsdPower;

// λ_min(1 − F*F) over all blocks.
double contraction_margin(const OperatorMatrix& f) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& blk : f.blocks()) {
    const CMatrix gap = CMatrix::identity(blk.cols()) - adjoint(blk) * blk;
    const auto e = numkernel::herm_eig(0.5 * (gap + adjoint(gap)));
    if (!e.lambda.empty()) m = std::min(m, e.lambda.front());
  }
  return m;
}

}  // namespace

RegularOp::RegularOp(OperatorMatrix transform) : f_(std::move(transform)) {
  const double n = norm(f_);
  if (n > 1.0 + 1e-12) throw TransformSingular("bounded transform must be a contraction");
  margin_ = contraction_margin(f_);
  if (!(margin_ > 0.0)) throw TransformSingular("1 - F*F is not invertible");
}

RegularOp bounded_transform(const OperatorMatrix& t) {
  const auto f = t * transform_q(t);
  return RegularOp(f, contraction_margin(f), RegularOp::Trusted{});
}

OperatorMatrix transform_q(const OperatorMatrix& t) {
  return map_blocks(t, [](const CMatrix& b) {
    return numkernel::psd_power(CMatrix::identity(b.cols()) + adjoint(b) * b, PsdPower::MinusHalf);
  });
}

OperatorMatrix transform_q(const RegularOp& r) {
  return map_blocks(r.transform(), [](const CMatrix& b) {
    return numkernel::psd_power(CMatrix::identity(b.cols()) - adjoint(b) * b, PsdPower::Half);
  });
}

OperatorMatrix inverse_transform(const RegularOp& r) {
  if (r.margin() < kTransformMargin)
    throw TransformSingular("1 - F*F is too close to singular to invert in double precision");
  const auto root = map_blocks(r.transform(), [](const CMatrix& b) {
    return numkernel::psd_power(CMatrix::identity(b.cols()) - adjoint(b) * b, PsdPower::MinusHalf);
  });
  return r.transform() * root;
}

Report transform_adjoint_compat(const OperatorMatrix& t, double tol) {
  return transform_compat_residuals(t, bounded_transform(t).transform(), tol);
}

Report transform_compat_residuals(const OperatorMatrix& t, const OperatorMatrix& f, double tol) {
  Report rep{"transform_compat"};
  const auto fs = bounded_transform(adjoint(t)).transform();
  rep.add("adjoint_preserving", norm(fs - adjoint(f)), 0.1 * tol * (1.0 + norm(t)));

  auto agree = [&](const char* key, Verdict a, Verdict b) {
    rep.flag(std::string(key) + "_t", a.holds);
    rep.flag(std::string(key) + "_f", b.holds);
    rep.add(std::string(key) + "_agreement", a.holds == b.holds ? 0.0 : 1.0, 0.0);
  };
  agree("normal", is_normal(t, tol), is_normal(f, tol));
  agree("selfadjoint", is_selfadjoint(t, tol), is_selfadjoint(f, tol));
  agree("positive", is_positive(t, tol), is_positive(f, tol));

  rep.add("kernel_match", norm(kernel_projection(t) - kernel_projection(f)), tol);
  rep.add("range_match", norm(range_projection(t) - range_projection(f)), tol);
  return rep;
}

UnitaryWitness theorem_regular_normal(const OperatorMatrix& t, double tol) {
  const auto n = is_normal(t, tol);
  if (!n.holds) throw PreconditionFailed("t is not normal");
  // t and F_t share the partial isometry of their polar decompositions, so the
  // unitary for F_t = U F_t* serves t as well.
  const auto f = bounded_transform(t).transform();
  return regular_witness(t, unitary_star_construction(f, tol), tol);
}

UnitaryWitness regular_witness(const OperatorMatrix& t, const OperatorMatrix& u, double tol) {
  UnitaryWitness w{u};
  const auto ts = adjoint(t);
  const auto f = bounded_transform(t).transform();
  const auto q = transform_q(t);
  const double nt = norm(t);
  const double bound = tol * (1.0 + nt) * (1.0 + nt);

  w.residual_factorization = norm(t - u * ts);
  w.residual_unitarity = unitarity_defect(u);
  w.residual_commutation_t = norm(u * t - t * u);
  w.residual_commutation_tstar = norm(u * ts - ts * u);
  auto& rep = w.report;
  rep.name = "theorem_regular";
  rep.add("factorization", w.residual_factorization, bound);
  rep.add("unitarity", w.residual_unitarity, tol);
  rep.add("transform_factorization", norm(f - u * adjoint(f)), tol);
  rep.add("commutes_q", norm(u * q - q * u), bound);
  rep.add("commutes_t", w.residual_commutation_t, bound);
  rep.add("commutes_tstar", w.residual_commutation_tstar, bound);
  rep.add("polar_compat", norm(polar(t).v - polar(f).v), tol);
  return w;
}

Report check_closed_range_specialization(const OperatorMatrix& t, double tol) {
  Report rep{"closed_range_specialization"};
  // Every submodule of A^k is closed and A is a finite direct sum of matrix
  // algebras, so both hypotheses hold unconditionally.
  rep.flag("closed_range", true);
  rep.flag("compact_algebra", true);
  const auto polar_report = check_polar_conditions(t, tol);
  rep.flag("polar_decomposition", polar_report.passed());
  rep.merge(polar_report, "polar");

  const auto n = is_normal(t, tol);
  rep.flag("normal", n.holds);
  if (n.holds) {
    rep.merge(theorem_regular_normal(t, tol).report, "inherited");
    rep.notes.emplace_back("normal: unitary conclusions inherited along regular -> closed range -> compact algebra");
  } else {
    rep.notes.emplace_back("not normal: unitary conclusions not applicable");
  }
  return rep;
}

}  // namespace modop

#pragma once

#include "modop/module_space.hpp"
#include "modop/normality.hpp"
#include "modop/report.hpp"

namespace modop {

// Every operator on a finite-rank module is everywhere defined, so a regular
// operator t is carried through its bounded transform F_t = t(1+t*t)^{-1/2}.

inline constexpr double kTransformMargin = 1e-8;  // floor on λ_min(1 − F*F) for inversion
inline constexpr double kRegularTol = 1e-8;

/// A contraction F with 1 − F*F invertible, i.e. the bounded transform of a
/// regular operator.
class RegularOp {
 public:
  /// Throws TransformSingular unless ‖F‖ ≤ 1 + 1e-12 and 1 − F*F is positive definite.
  explicit RegularOp(OperatorMatrix transform);

  const OperatorMatrix& transform() const { return f_; }
  /// Smallest eigenvalue of 1 − F*F.
  double margin() const { return margin_; }

 private:
  struct Trusted {};
  RegularOp(OperatorMatrix transform, double margin, Trusted) : f_(std::move(transform)), margin_(margin) {}
  friend RegularOp bounded_transform(const OperatorMatrix& t);

  OperatorMatrix f_;
  double margin_ = 1.0;
};

/// F_t = t·(1 + t*t)^{-1/2}
RegularOp bounded_transform(const OperatorMatrix& t);
/// Q_t = (1 + t*t)^{-1/2}
OperatorMatrix transform_q(const OperatorMatrix& t);
/// (1 − F*F)^{1/2}, which equals Q_t when F = F_t.
OperatorMatrix transform_q(const RegularOp& r);
/// t = F·(1 − F*F)^{-1/2}. Throws TransformSingular when the margin is below kTransformMargin.
OperatorMatrix inverse_transform(const RegularOp& r);

/// F_{t*} = (F_t)*, predicate agreement (normal, selfadjoint, positive) and
/// kernel/range agreement between t and F_t.
Report transform_adjoint_compat(const OperatorMatrix& t, double tol = kDefaultTol);
/// Same checks against a supplied transform f in place of F_t.
Report transform_compat_residuals(const OperatorMatrix& t, const OperatorMatrix& f, double tol = kDefaultTol);

/// t = U t* with U built from the bounded transform; also UQ_t = Q_tU,
/// Ut = tU, Ut* = t*U. Residuals bounded by tol·(1+‖t‖)². Requires t normal.
UnitaryWitness theorem_regular_normal(const OperatorMatrix& t, double tol = kRegularTol);
UnitaryWitness regular_witness(const OperatorMatrix& t, const OperatorMatrix& u, double tol = kRegularTol);

/// Closed-range and compact-algebra specializations: their hypotheses hold
/// for every operator here, and for normal t the conclusions are inherited
/// from theorem_regular_normal.
Report check_closed_range_specialization(const OperatorMatrix& t, double tol = kRegularTol);

}  // namespace modop

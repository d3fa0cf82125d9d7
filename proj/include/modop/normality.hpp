#pragma once

#include <optional>
#include <vector>

#include "modop/decomposition.hpp"
#include "modop/module_space.hpp"
#include "modop/report.hpp"

namespace modop {

/// A unitary U together with the residuals certifying what it was built for.
struct UnitaryWitness {
  OperatorMatrix u;
  double residual_factorization = 0.0;
  double residual_unitarity = 0.0;
  double residual_commutation_t = 0.0;
  double residual_commutation_tstar = 0.0;
  Report report;
};

// ---- predicates ------------------------------------------------------------

/// ‖T*T − TT*‖ (unnormalized).
double normality_defect(const OperatorMatrix& t);
/// Residual ‖T*T − TT*‖/(1+‖T‖²), holds iff residual ≤ tol.
Verdict is_normal(const OperatorMatrix& t, double tol = kDefaultTol);
/// Residual ‖T − T*‖/(1+‖T‖).
Verdict is_selfadjoint(const OperatorMatrix& t, double tol = kDefaultTol);
/// Selfadjoint and spectrum ≥ −tol·(1+‖T‖); residual is the larger of the two defects.
Verdict is_positive(const OperatorMatrix& t, double tol = kDefaultTol);
/// Residual ‖AB − BA‖/((1+‖A‖)(1+‖B‖)).
Verdict commutes(const OperatorMatrix& a, const OperatorMatrix& b, double tol = kDefaultTol);
/// ‖U*U − I‖ ∨ ‖UU* − I‖
double unitarity_defect(const OperatorMatrix& u);

// ---- commutant transfer ----------------------------------------------------

/// If S commutes with T and T*, then V and |T| commute with S and S*.
/// Throws PreconditionFailed if S does not commute with T and T*.
Report check_commutant_transfer(const OperatorMatrix& t, const OperatorMatrix& s, double tol = kDefaultTol);
Report commutant_transfer_residuals(const OperatorMatrix& t, const OperatorMatrix& s, const PolarParts& parts,
                                    double tol = kDefaultTol);

// ---- V is unitary on the range of a normal operator ------------------------

Report check_v_unitary_on_range(const OperatorMatrix& t, double tol = kDefaultTol);
Report v_unitary_on_range_residuals(const OperatorMatrix& t, const OperatorMatrix& v, double tol = kDefaultTol);

// ---- T = U|T| --------------------------------------------------------------

/// U = P_ker(T) + V. Requires T normal.
OperatorMatrix unitary_abs_construction(const OperatorMatrix& t, double tol = kDefaultTol);
UnitaryWitness build_unitary_abs(const OperatorMatrix& t, double tol = kDefaultTol);
/// Residuals of T = U|T|, unitarity and [U,|T|], [U,T], [U,T*] for a given U.
UnitaryWitness witness_abs(const OperatorMatrix& t, const OperatorMatrix& u, double tol = kDefaultTol);
/// Converse: U unitary commuting with positive P makes U·P normal, with |UP| = P.
Report verify_converse_abs(const OperatorMatrix& u, const OperatorMatrix& p, double tol = kDefaultTol);

// ---- T = UT* ---------------------------------------------------------------

/// U = P_ker(T) + V². Requires T normal.
OperatorMatrix unitary_star_construction(const OperatorMatrix& t, double tol = kDefaultTol);
UnitaryWitness build_unitary_star(const OperatorMatrix& t, double tol = kDefaultTol);
UnitaryWitness witness_star(const OperatorMatrix& t, const OperatorMatrix& u, double tol = kDefaultTol);
/// Converse: T = UT* with U unitary forces T normal.
Report verify_converse_star(const OperatorMatrix& t, const OperatorMatrix& u, double tol = kDefaultTol);

// ---- Fuglede-Putnam --------------------------------------------------------

/// For normal T, S with TA = AS, reports ‖T*A − AS*‖ against tol·(‖T‖+‖S‖)(1+‖A‖).
Report fuglede_putnam_check(const OperatorMatrix& t, const OperatorMatrix& s, const OperatorMatrix& a,
                            double tol = kDefaultTol);
/// Basis of {A ∈ L(X) : TA = AS}, orthonormal for the trace inner product.
std::vector<OperatorMatrix> solve_intertwiners(const OperatorMatrix& t, const OperatorMatrix& s);

// ---- Kaplansky -------------------------------------------------------------

enum class KaplanskyStatus { Agree, Disagree, Indeterminate };

struct KaplanskyReport {
  Verdict lhs;  // ST normal
  Verdict rhs;  // S commutes with |T|
  KaplanskyStatus status = KaplanskyStatus::Indeterminate;
  std::optional<double> proof_identity;  // ‖U*(TS)U − ST‖ when rhs holds
  Report report;

  bool passed() const { return status != KaplanskyStatus::Disagree && report.passed(); }
};

/// With T and TS normal: ST is normal iff S commutes with |T|.
/// Residuals within a factor 10 of tol on either side are Indeterminate.
KaplanskyReport kaplansky_check(const OperatorMatrix& t, const OperatorMatrix& s, double tol = kDefaultTol);

const char* to_string(KaplanskyStatus s);

}  // namespace modop

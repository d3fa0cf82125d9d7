#include "modop/normality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "modop/numkernel.hpp"

namespace modop {
namespace {

std::string fmt_residual(double r) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << r;
  return os.str();
}

void require_normal(const OperatorMatrix& t, double tol, const char* what) {
  const auto n = is_normal(t, tol);
  if (!n.holds) throw PreconditionFailed(std::string(what) + " is not normal (residual " + fmt_residual(n.residual) + ")");
}

double min_eigenvalue(const OperatorMatrix& t) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& blk : t.blocks()) {
    const auto e = numkernel::herm_eig(0.5 * (blk + adjoint(blk)));
    if (!e.lambda.empty()) m = std::min(m, e.lambda.front());
  }
  return m;
}

}  // namespace

double normality_defect(const OperatorMatrix& t) {
  const auto ts = adjoint(t);
  return norm(ts * t - t * ts);
}

Verdict is_normal(const OperatorMatrix& t, double tol) {
  const double n = norm(t);
  const double r = normality_defect(t) / (1.0 + n * n);
  return {r <= tol, r};
}

Verdict is_selfadjoint(const OperatorMatrix& t, double tol) {
  const double r = norm(t - adjoint(t)) / (1.0 + norm(t));
  return {r <= tol, r};
}

Verdict is_positive(const OperatorMatrix& t, double tol) {
  const double n = norm(t);
  const double sa = norm(t - adjoint(t)) / (1.0 + n);
  const double neg = std::max(0.0, -min_eigenvalue(t)) / (1.0 + n);
  const double r = std::max(sa, neg);
  return {r <= tol, r};
}

Verdict commutes(const OperatorMatrix& a, const OperatorMatrix& b, double tol) {
  if (!a.same_space(b)) throw ShapeMismatch("commutator of operators on different modules");
  const double r = norm(a * b - b * a) / ((1.0 + norm(a)) * (1.0 + norm(b)));
  return {r <= tol, r};
}

double unitarity_defect(const OperatorMatrix& u) {
  const auto id = OperatorMatrix::identity(u.shape(), u.rank());
  const auto us = adjoint(u);
  return std::max(norm(us * u - id), norm(u * us - id));
}

// ---- commutant transfer ----------------------------------------------------

Report check_commutant_transfer(const OperatorMatrix& t, const OperatorMatrix& s, double tol) {
  const auto c1 = commutes(s, t, tol);
  if (!c1.holds) throw PreconditionFailed("S does not commute with T (residual " + fmt_residual(c1.residual) + ")");
  const auto c2 = commutes(s, adjoint(t), tol);
  if (!c2.holds) throw PreconditionFailed("S does not commute with T* (residual " + fmt_residual(c2.residual) + ")");
  return commutant_transfer_residuals(t, s, polar(t), tol);
}

Report commutant_transfer_residuals(const OperatorMatrix& t, const OperatorMatrix& s, const PolarParts& parts,
                                    double tol) {
  Report rep{"commutant_transfer"};
  const auto ss = adjoint(s);
  const double bound = tol * (1.0 + norm(t)) * (1.0 + norm(s));
  rep.add("precondition_s_t", commutes(s, t, tol).residual, tol);
  rep.add("precondition_s_tstar", commutes(s, adjoint(t), tol).residual, tol);
  // The transferred factors must be genuine polar parts of T.
  rep.add("polar_factorization", norm(t - parts.v * parts.abs), tol * (1.0 + norm(t)));
  rep.add("partial_isometry", norm(parts.v * adjoint(parts.v) * parts.v - parts.v), tol);
  rep.add("s_v", norm(s * parts.v - parts.v * s), bound);
  rep.add("sstar_v", norm(ss * parts.v - parts.v * ss), bound);
  rep.add("s_abs", norm(s * parts.abs - parts.abs * s), bound);
  rep.add("sstar_abs", norm(ss * parts.abs - parts.abs * ss), bound);
  return rep;
}

// ---- V on the range --------------------------------------------------------

Report check_v_unitary_on_range(const OperatorMatrix& t, double tol) {
  require_normal(t, tol, "T");
  return v_unitary_on_range_residuals(t, polar(t).v, tol);
}

Report v_unitary_on_range_residuals(const OperatorMatrix& t, const OperatorMatrix& v, double tol) {
  Report rep{"v_unitary_range"};
  const auto ts = adjoint(t);
  const auto vs = adjoint(v);
  const auto p = range_projection(t);
  rep.add("initial_projection", norm(vs * v - p), tol);
  rep.add("final_projection", norm(v * vs - p), tol);
  rep.add("range_match", norm(p - range_projection(ts)), tol);
  rep.add("kernel_match", norm(kernel_projection(t) - kernel_projection(ts)), tol);
  rep.add("v_commutes_t", norm(v * t - t * v), tol * (1.0 + norm(t)));
  rep.add("v_commutes_vstar", norm(v * vs - vs * v), tol);
  return rep;
}

// ---- T = U|T| --------------------------------------------------------------

OperatorMatrix unitary_abs_construction(const OperatorMatrix& t, double tol) {
  require_normal(t, tol, "T");
  return kernel_projection(t) + polar(t).v;
}

UnitaryWitness build_unitary_abs(const OperatorMatrix& t, double tol) {
  return witness_abs(t, unitary_abs_construction(t, tol), tol);
}

UnitaryWitness witness_abs(const OperatorMatrix& t, const OperatorMatrix& u, double tol) {
  UnitaryWitness w{u};
  const auto abs = abs_op(t);
  const auto ts = adjoint(t);
  const double bound = tol * (1.0 + norm(t));
  w.residual_factorization = norm(t - u * abs);
  w.residual_unitarity = unitarity_defect(u);
  w.residual_commutation_t = norm(u * t - t * u);
  w.residual_commutation_tstar = norm(u * ts - ts * u);
  w.report.name = "unitary_abs";
  w.report.add("factorization", w.residual_factorization, bound);
  w.report.add("unitarity", w.residual_unitarity, 0.1 * tol);
  w.report.add("commutes_abs", norm(u * abs - abs * u), bound);
  w.report.add("commutes_t", w.residual_commutation_t, bound);
  w.report.add("commutes_tstar", w.residual_commutation_tstar, bound);
  return w;
}

Report verify_converse_abs(const OperatorMatrix& u, const OperatorMatrix& p, double tol) {
  const double ud = unitarity_defect(u);
  if (ud > tol) throw PreconditionFailed("U is not unitary (defect " + fmt_residual(ud) + ")");
  const auto pos = is_positive(p, tol);
  if (!pos.holds) throw PreconditionFailed("P is not positive (residual " + fmt_residual(pos.residual) + ")");
  const double comm = norm(u * p - p * u);
  if (comm > tol * (1.0 + norm(p)))
    throw PreconditionFailed("U does not commute with P (residual " + fmt_residual(comm) + ")");

  Report rep{"converse_abs"};
  const auto t = u * p;
  rep.add("normality", is_normal(t, tol).residual, tol);
  rep.add("abs_recovered", norm(abs_op(t) - p), tol * (1.0 + norm(p)));
  return rep;
}

// ---- T = UT* ---------------------------------------------------------------

OperatorMatrix unitary_star_construction(const OperatorMatrix& t, double tol) {
  require_normal(t, tol, "T");
  const auto v = polar(t).v;
  return kernel_projection(t) + v * v;
}

UnitaryWitness build_unitary_star(const OperatorMatrix& t, double tol) {
  return witness_star(t, unitary_star_construction(t, tol), tol);
}

UnitaryWitness witness_star(const OperatorMatrix& t, const OperatorMatrix& u, double tol) {
  UnitaryWitness w{u};
  const auto ts = adjoint(t);
  const double bound = tol * (1.0 + norm(t));
  w.residual_factorization = norm(t - u * ts);
  w.residual_unitarity = unitarity_defect(u);
  w.residual_commutation_t = norm(u * t - t * u);
  w.residual_commutation_tstar = norm(u * ts - ts * u);
  w.report.name = "unitary_star";
  w.report.add("factorization", w.residual_factorization, bound);
  w.report.add("unitarity", w.residual_unitarity, 0.1 * tol);
  w.report.add("commutes_t", w.residual_commutation_t, bound);
  w.report.add("commutes_tstar", w.residual_commutation_tstar, bound);
  return w;
}

Report verify_converse_star(const OperatorMatrix& t, const OperatorMatrix& u, double tol) {
  const double ud = unitarity_defect(u);
  if (ud > tol) throw PreconditionFailed("U is not unitary (defect " + fmt_residual(ud) + ")");
  const double nt = norm(t);
  const double fac = norm(t - u * adjoint(t));
  if (fac > tol * (1.0 + nt)) throw PreconditionFailed("T != U T* (residual " + fmt_residual(fac) + ")");

  Report rep{"converse_star"};
  rep.add("normality", normality_defect(t), tol * (1.0 + nt) * (1.0 + nt));
  rep.value("normality_normalized", is_normal(t, tol).residual);
  rep.value("factorization", fac);
  return rep;
}

// ---- Fuglede-Putnam --------------------------------------------------------

Report fuglede_putnam_check(const OperatorMatrix& t, const OperatorMatrix& s, const OperatorMatrix& a, double tol) {
  if (!t.same_space(s) || !t.same_space(a)) throw ShapeMismatch("Fuglede-Putnam operands live on different modules");
  require_normal(t, tol, "T");
  require_normal(s, tol, "S");
  const double scale = (norm(t) + norm(s)) * (1.0 + norm(a));
  const double inter = norm(t * a - a * s);
  if (inter > tol * scale) throw PreconditionFailed("TA != AS (residual " + fmt_residual(inter) + ")");

  const double num = norm(adjoint(t) * a - a * adjoint(s));
  Report rep{"fuglede_putnam"};
  rep.add("adjoint_intertwining", num == 0.0 ? 0.0 : num / scale, tol);
  rep.value("intertwining", inter);
  return rep;
}

std::vector<OperatorMatrix> solve_intertwiners(const OperatorMatrix& t, const OperatorMatrix& s) {
  if (!t.same_space(s)) throw ShapeMismatch("intertwiners between operators on different modules");
  // Single cutoff for every block: ‖I⊗T_b − S_bᵀ⊗I‖ ≤ ‖T‖ + ‖S‖.
  const double scale = norm(t) + norm(s);
  std::size_t dim = 0;
  for (const auto& blk : t.blocks()) dim = std::max(dim, blk.rows() * blk.rows());
  const double cut = numkernel::rank_cutoff(dim, scale);

  std::vector<OperatorMatrix> basis;
  for (std::size_t b = 0; b < t.blocks().size(); ++b) {
    const CMatrix& tb = t.block(b);
    const CMatrix& sb = s.block(b);
    const std::size_t m = tb.rows();
    // vec(TX − XS) = (I⊗T − Sᵀ⊗I) vec(X), column-major vec.
    CMatrix k(m * m, m * m);
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < m; ++i) k(c * m + i, c * m + j) += tb(i, j);
    for (std::size_t c = 0; c < m; ++c)
      for (std::size_t d = 0; d < m; ++d) {
        const Complex sdc = sb(d, c);
        if (sdc == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) k(c * m + i, d * m + i) -= sdc;
      }
    const auto r = numkernel::svd(k);
    for (std::size_t col = 0; col < r.sigma.size(); ++col) {
      if (r.sigma[col] > cut) continue;
      std::vector<CMatrix> blocks;
      for (const auto& other : t.blocks()) blocks.emplace_back(other.rows(), other.cols());
      auto vcol = r.v.col(col);
      for (std::size_t jj = 0; jj < m; ++jj)
        for (std::size_t ii = 0; ii < m; ++ii) blocks[b](ii, jj) = vcol[jj * m + ii];
      basis.push_back(OperatorMatrix::from_blocks(t.shape(), t.rank(), std::move(blocks)));
    }
  }
  return basis;
}

// ---- Kaplansky -------------------------------------------------------------

const char* to_string(KaplanskyStatus s) {
  switch (s) {
    case KaplanskyStatus::Agree:
      return "agree";
    case KaplanskyStatus::Disagree:
      return "disagree";
    case KaplanskyStatus::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

KaplanskyReport kaplansky_check(const OperatorMatrix& t, const OperatorMatrix& s, double tol) {
  if (!t.same_space(s)) throw ShapeMismatch("Kaplansky operands live on different modules");
  const auto pre_t = is_normal(t, tol);
  if (!pre_t.holds) throw PreconditionFailed("hypothesis 'T normal' fails (residual " + fmt_residual(pre_t.residual) + ")");
  const auto ts = t * s;
  const auto pre_ts = is_normal(ts, tol);
  if (!pre_ts.holds)
    throw PreconditionFailed("hypothesis 'TS normal' fails (residual " + fmt_residual(pre_ts.residual) + ")");

  KaplanskyReport out;
  const auto st = s * t;
  const auto abs = abs_op(t);
  out.lhs = is_normal(st, tol);
  out.rhs = commutes(s, abs, tol);

  auto knife_edge = [&](double r) { return r >= 0.1 * tol && r <= 10.0 * tol; };
  if (knife_edge(out.lhs.residual) || knife_edge(out.rhs.residual)) {
    out.status = KaplanskyStatus::Indeterminate;
  } else {
    out.status = out.lhs.holds == out.rhs.holds ? KaplanskyStatus::Agree : KaplanskyStatus::Disagree;
  }

  auto& rep = out.report;
  rep.name = "kaplansky";
  rep.add("precondition_t_normal", pre_t.residual, tol);
  rep.add("precondition_ts_normal", pre_ts.residual, tol);
  rep.value("st_normal_residual", out.lhs.residual);
  rep.value("s_commutes_abs_residual", out.rhs.residual);
  rep.flag("st_normal", out.lhs.holds);
  rep.flag("s_commutes_abs", out.rhs.holds);
  rep.notes.emplace_back(std::string("status: ") + to_string(out.status));

  if (out.rhs.holds) {
    // U*·TS·U = U*U|T|SU = S|T|U = SU|T| = ST
    const auto u = unitary_abs_construction(t, tol);
    const double id = norm(adjoint(u) * ts * u - st);
    out.proof_identity = id;
    rep.add("proof_identity", id, tol * (1.0 + norm(t)) * (1.0 + norm(s)));
  }
  return out;
}

}  // namespace modop

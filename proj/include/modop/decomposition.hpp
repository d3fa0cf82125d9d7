#pragma once

#include <vector>

#include "modop/module_space.hpp"
#include "modop/numkernel.hpp"
#include "modop/report.hpp"

namespace modop {

/// T = V|T| with V a partial isometry and Ker(V) = Ker(T).
struct PolarParts {
  OperatorMatrix v;
  OperatorMatrix abs;
};

/// Per-block SVDs of the embedding together with the single rank cutoff
/// shared by every kernel/range split derived from them.
struct SingularSystem {
  std::vector<numkernel::SvdResult> blocks;
  double scale = 0.0;   // σ_max over all blocks
  double cutoff = 0.0;  // numkernel::rank_cutoff(embed_dim, scale)

  std::size_t rank() const;
  std::vector<double> singular_values() const;  // all blocks, descending
};

SingularSystem singular_system(const OperatorMatrix& t);

/// |T| = (T*T)^{1/2}, assembled from the singular system as Σ σᵢ vᵢvᵢ†.
OperatorMatrix abs_op(const OperatorMatrix& t);

PolarParts polar(const OperatorMatrix& t);

/// Orthogonal projection onto Ker(T).
OperatorMatrix kernel_projection(const OperatorMatrix& t);
/// Orthogonal projection onto the closure of Ran(T).
OperatorMatrix range_projection(const OperatorMatrix& t);

/// Residuals of the four equivalent polar-decomposition conditions and their
/// consequences, each bounded by tol·(1+‖T‖).
Report check_polar_conditions(const OperatorMatrix& t, double tol = kDefaultTol);
/// Same, for externally supplied parts (used to audit a given factorization).
Report polar_residuals(const OperatorMatrix& t, const PolarParts& parts, double tol = kDefaultTol);

}  // namespace modop

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "modop/matrix.hpp"

namespace modop {

/// Numerical primitives on plain complex matrices. Every decomposition in the
/// library funnels through these: a one-sided (Hestenes) Jacobi SVD and a
/// cyclic Jacobi eigensolver for Hermitian matrices, both self-contained.
namespace numkernel {

inline constexpr int kMaxSweeps = 60;
inline constexpr double kRankSafety = 100.0;
inline constexpr double kHermTol = 1e-10;    // relative, ‖M − M†‖ ≤ kHermTol·(1+‖M‖)
inline constexpr double kPsdTol = 1e-10;     // eigenvalue clamp, scaled by 1+‖M‖
inline constexpr double kInverseFloor = 1e-12;  // smallest eigenvalue admitted by p = −1/2, scaled by max(1,‖M‖)

template <class Scalar>
struct SvdResultT {
  Matrix<Scalar> u;           // rows × min(rows, cols), orthonormal columns
  std::vector<double> sigma;  // descending
  Matrix<Scalar> v;           // cols × min(rows, cols), orthonormal columns
};
using SvdResult = SvdResultT<Complex>;

struct EigResult {
  CMatrix q;                   // unitary, eigenvectors in columns
  std::vector<double> lambda;  // ascending
};

EigResult herm_eig(const CMatrix& m);

SvdResult svd(const CMatrix& m);
SvdResultT<double> svd(const RMatrix& m);

double spectral_norm(const CMatrix& m);

enum class PsdPower { Half, MinusHalf };

/// Functional calculus M^{±1/2} for Hermitian positive semidefinite M.
/// Throws NotPositive / SingularMatrix.
CMatrix psd_power(const CMatrix& m, PsdPower p);

/// Q·diag(f(λ))·Q† for Hermitian h.
CMatrix hermitian_calculus(const CMatrix& h, const std::function<Complex(double)>& f);

/// Spectral projections of Hermitian h, eigenvalues grouped when they lie
/// within cluster_tol·(1+‖h‖) of their neighbour. Ascending eigenvalue order.
std::vector<CMatrix> spectral_projections(const CMatrix& h, double cluster_tol = 1e-8);

double rank_cutoff(std::size_t dim, double scale);

/// Number of σᵢ above rank_cutoff(dim, scale); dim defaults to sigma.size().
std::size_t numeric_rank(std::span<const double> sigma, double scale);
std::size_t numeric_rank(std::span<const double> sigma, double scale, std::size_t dim);

/// Orthonormal basis (columns) of the numerical null space of m.
CMatrix null_space(const CMatrix& m);
RMatrix null_space(const RMatrix& m);

}  // namespace numkernel
}  // namespace modop

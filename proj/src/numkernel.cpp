#include "modop/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace modop::numkernel {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

inline double phase_of(double g, double mag) { return g / mag; }
inline Complex phase_of(const Complex& g, double mag) { return g / mag; }

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  S s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += conj_of(a[i]) * b[i];
  return s;
}

template <class S>
double norm2(std::span<const S> a) {
  double s = 0.0;
  for (const auto& v : a) s += abs2(v);
  return s;
}

// Replace column j by a unit vector orthogonal to columns [0, j) of u.
template <class S>
void complete_column(Matrix<S>& u, std::size_t j) {
  const std::size_t n = u.rows();
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<S> cand(n, S{});
    cand[k] = S{1};
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t c = 0; c < j; ++c) {
        auto uc = u.col(c);
        const S proj = dot<S>(uc, cand);
        for (std::size_t i = 0; i < n; ++i) cand[i] -= proj * uc[i];
      }
    }
    const double nrm = std::sqrt(norm2<S>(cand));
    if (nrm > 0.5) {
      auto uj = u.col(j);
      for (std::size_t i = 0; i < n; ++i) uj[i] = cand[i] / nrm;
      return;
    }
  }
}

// Hestenes one-sided Jacobi for rows >= cols.
template <class S>
SvdResultT<S> svd_tall(const Matrix<S>& m) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  Matrix<S> a = m;
  Matrix<S> v = Matrix<S>::identity(cols);
  const double tol = kEps * static_cast<double>(std::max<std::size_t>(rows, 1));

  bool converged = cols < 2;
  std::vector<double> sq(cols);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    bool rotated = false;
    // Squared column norms are carried through the rotations and refreshed once per sweep.
    for (std::size_t j = 0; j < cols; ++j) sq[j] = norm2<S>(a.col(j));
    for (std::size_t i = 0; i + 1 < cols; ++i) {
      for (std::size_t j = i + 1; j < cols; ++j) {
        auto ai = a.col(i);
        auto aj = a.col(j);
        const double alpha = sq[i];
        const double beta = sq[j];
        if (alpha == 0.0 || beta == 0.0) continue;
        const S gamma = dot<S>(ai, aj);
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;

        const S ph = phase_of(gamma, g);
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        const S cph = conj_of(ph);

        for (std::size_t r = 0; r < rows; ++r) {
          const S x = ai[r];
          const S y = aj[r] * cph;
          ai[r] = c * x - s * y;
          aj[r] = s * x + c * y;
        }
        sq[i] = std::max(0.0, alpha - t * g);
        sq[j] = beta + t * g;
        auto vi = v.col(i);
        auto vj = v.col(j);
        for (std::size_t r = 0; r < cols; ++r) {
          const S x = vi[r];
          const S y = vj[r] * cph;
          vi[r] = c * x - s * y;
          vj[r] = s * x + c * y;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw NoConvergence("one-sided Jacobi SVD exceeded the sweep cap");

  std::vector<double> sig(cols);
  for (std::size_t j = 0; j < cols; ++j) sig[j] = std::sqrt(norm2<S>(a.col(j)));
  std::vector<std::size_t> order(cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sig[x] > sig[y]; });

  SvdResultT<S> out{Matrix<S>(rows, cols), std::vector<double>(cols), Matrix<S>(cols, cols)};
  std::vector<std::size_t> missing;
  for (std::size_t k = 0; k < cols; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sig[j];
    auto src_v = v.col(j);
    std::copy(src_v.begin(), src_v.end(), out.v.col(k).begin());
    if (sig[j] > std::numeric_limits<double>::min() * 1e4) {
      auto src = a.col(j);
      auto dst = out.u.col(k);
      for (std::size_t r = 0; r < rows; ++r) dst[r] = src[r] / sig[j];
    } else {
      out.sigma[k] = 0.0;
      missing.push_back(k);
    }
  }
  // Zero columns sort last, so every earlier column is already set.
  for (std::size_t k : missing) complete_column(out.u, k);
  return out;
}

template <class S>
SvdResultT<S> svd_any(const Matrix<S>& m) {
  if (m.rows() >= m.cols()) return svd_tall(m);
  auto r = svd_tall(adjoint(m));
  return {std::move(r.v), std::move(r.sigma), std::move(r.u)};
}

template <class S>
Matrix<S> null_space_any(const Matrix<S>& m) {
  const std::size_t n = m.cols();
  Matrix<S> sq = m;
  if (m.rows() < n) {
    sq = Matrix<S>(n, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m.rows(); ++i) sq(i, j) = m(i, j);
  }
  const auto r = svd_tall(sq);
  const double scale = r.sigma.empty() ? 0.0 : r.sigma.front();
  const std::size_t rank = numeric_rank(r.sigma, scale, std::max(sq.rows(), n));
  Matrix<S> basis(n, n - rank);
  for (std::size_t k = rank; k < n; ++k) {
    auto src = r.v.col(k);
    std::copy(src.begin(), src.end(), basis.col(k - rank).begin());
  }
  return basis;
}

}  // namespace

EigResult herm_eig(const CMatrix& m) {
  if (!m.is_square()) throw ShapeMismatch("herm_eig needs a square matrix");
  const std::size_t n = m.rows();
  const CMatrix mh = adjoint(m);
  const double fro = frobenius_norm(m);
  if (frobenius_norm(m - mh) > kHermTol * (1.0 + fro)) throw NotHermitian("matrix is not Hermitian within tolerance");

  CMatrix a = 0.5 * (m + mh);
  for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();
  CMatrix q = CMatrix::identity(n);

  const double threshold = static_cast<double>(n * n) * kEps * fro;
  bool converged = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) off += std::norm(a(i, j));
    if (std::sqrt(off) <= threshold) {
      converged = true;
      break;
    }
    if (sweep == kMaxSweeps) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t qi = p + 1; qi < n; ++qi) {
        const Complex apq = a(p, qi);
        const double g = std::abs(apq);
        if (g == 0.0) continue;
        const Complex e = apq / g;
        const Complex ce = std::conj(e);
        const double theta = (a(qi, qi).real() - a(p, p).real()) / (2.0 * g);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(1.0, theta));
        }
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;

        auto cp = a.col(p);
        auto cq = a.col(qi);
        for (std::size_t r = 0; r < n; ++r) {
          const Complex x = cp[r];
          const Complex y = ce * cq[r];
          cp[r] = c * x - s * y;
          cq[r] = s * x + c * y;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const Complex x = a(p, r);
          const Complex y = e * a(qi, r);
          a(p, r) = c * x - s * y;
          a(qi, r) = s * x + c * y;
        }
        a(p, qi) = 0.0;
        a(qi, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(qi, qi) = a(qi, qi).real();

        auto qp = q.col(p);
        auto qq = q.col(qi);
        for (std::size_t r = 0; r < n; ++r) {
          const Complex x = qp[r];
          const Complex y = ce * qq[r];
          qp[r] = c * x - s * y;
          qq[r] = s * x + c * y;
        }
      }
    }
  }
  if (!converged) throw NoConvergence("Jacobi eigensolver exceeded the sweep cap");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
  EigResult out{CMatrix(n, n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.lambda[k] = a(order[k], order[k]).real();
    auto src = q.col(order[k]);
    std::copy(src.begin(), src.end(), out.q.col(k).begin());
  }
  return out;
}

SvdResult svd(const CMatrix& m) { return svd_any(m); }
SvdResultT<double> svd(const RMatrix& m) { return svd_any(m); }

double spectral_norm(const CMatrix& m) {
  if (m.empty()) return 0.0;
  const auto r = svd(m);
  return r.sigma.empty() ? 0.0 : r.sigma.front();
}

CMatrix hermitian_calculus(const CMatrix& h, const std::function<Complex(double)>& f) {
  const auto e = herm_eig(h);
  const std::size_t n = h.rows();
  CMatrix scaled = e.q;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex fk = f(e.lambda[k]);
    for (auto& x : scaled.col(k)) x *= fk;
  }
  return scaled * adjoint(e.q);
}

CMatrix psd_power(const CMatrix& m, PsdPower p) {
  const auto e = herm_eig(m);
  const std::size_t n = m.rows();
  double norm = 0.0;
  for (double l : e.lambda) norm = std::max(norm, std::abs(l));
  if (n > 0 && e.lambda.front() < -kPsdTol * (1.0 + norm))
    throw NotPositive("matrix has an eigenvalue below the PSD tolerance");
  if (p == PsdPower::MinusHalf && n > 0 && e.lambda.front() < kInverseFloor * std::max(1.0, norm))
    throw SingularMatrix("inverse square root of a numerically singular matrix");

  CMatrix scaled = e.q;
  for (std::size_t k = 0; k < n; ++k) {
    const double l = std::max(e.lambda[k], 0.0);
    const double fk = p == PsdPower::Half ? std::sqrt(l) : 1.0 / std::sqrt(l);
    for (auto& x : scaled.col(k)) x *= fk;
  }
  CMatrix r = scaled * adjoint(e.q);
  // Exact Hermitian symmetry of the result.
  return 0.5 * (r + adjoint(r));
}

std::vector<CMatrix> spectral_projections(const CMatrix& h, double cluster_tol) {
  const auto e = herm_eig(h);
  const std::size_t n = h.rows();
  std::vector<CMatrix> out;
  if (n == 0) return out;
  double norm = 0.0;
  for (double l : e.lambda) norm = std::max(norm, std::abs(l));
  const double gap = cluster_tol * (1.0 + norm);

  std::size_t start = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (k == n || e.lambda[k] - e.lambda[k - 1] > gap) {
      CMatrix p(n, n);
      for (std::size_t c = start; c < k; ++c) {
        auto qc = e.q.col(c);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t i = 0; i < n; ++i) p(i, j) += qc[i] * std::conj(qc[j]);
      }
      out.push_back(std::move(p));
      start = k;
    }
  }
  return out;
}

double rank_cutoff(std::size_t dim, double scale) {
  return static_cast<double>(dim) * kEps * scale * kRankSafety;
}

std::size_t numeric_rank(std::span<const double> sigma, double scale) {
  return numeric_rank(sigma, scale, sigma.size());
}

std::size_t numeric_rank(std::span<const double> sigma, double scale, std::size_t dim) {
  const double cut = rank_cutoff(dim, scale);
  std::size_t r = 0;
  for (double s : sigma)
    if (s > cut) ++r;
  return r;
}

CMatrix null_space(const CMatrix& m) { return null_space_any(m); }
RMatrix null_space(const RMatrix& m) { return null_space_any(m); }

}  // namespace modop::numkernel

#include <algorithm>

#include "modop/numkernel.hpp"
#include "support.hpp"

using namespace modop;
using namespace modop::numkernel;

namespace {

CMatrix reconstruct(const SvdResult& r) {
  CMatrix us = r.u;
  for (std::size_t k = 0; k < r.sigma.size(); ++k)
    for (auto& x : us.col(k)) x *= r.sigma[k];
  return us * adjoint(r.v);
}

double orthonormality_defect(const CMatrix& q) {
  return frobenius_norm(adjoint(q) * q - CMatrix::identity(q.cols()));
}

CMatrix random_hermitian(std::size_t n, harness::Rng& rng) {
  const auto g = testing::random_matrix(n, n, rng);
  return 0.5 * (g + adjoint(g));
}

}  // namespace

TEST_SUITE("numkernel") {

TEST_CASE("herm_eig examples") {
  auto e = herm_eig(CMatrix::identity(4));
  for (double l : e.lambda) CHECK(l == doctest::Approx(1.0).epsilon(1e-15));
  e = herm_eig(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
  CHECK(e.lambda[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(e.lambda[1] == doctest::Approx(1.0).epsilon(1e-15));
  const CMatrix d{{5.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 0.0, 2.0}};
  e = herm_eig(d);
  CHECK(e.lambda == std::vector<double>{2.0, 2.0, 5.0});
  CHECK(orthonormality_defect(e.q) < 1e-15);
  CHECK_THROWS_AS(herm_eig(CMatrix{{0.0, 1.0}, {0.0, 0.0}}), NotHermitian);
  CHECK_THROWS_AS(herm_eig(CMatrix(2, 3)), ShapeMismatch);
}

TEST_CASE("svd examples") {
  const auto z = svd(CMatrix(3, 3));
  for (double s : z.sigma) CHECK(s == 0.0);
  CHECK(orthonormality_defect(z.u) < 1e-15);
  const auto shift = svd(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(shift.sigma[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(shift.sigma[1] == 0.0);
  harness::Rng rng(2);
  const auto m = testing::random_matrix(3, 3, rng);
  CHECK(frobenius_norm(m - reconstruct(svd(m))) <= 1e-12 * (1.0 + spectral_norm(m)));
}

TEST_CASE("svd and herm_eig against the Eigen oracle") {
  harness::Rng rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto rows = static_cast<std::size_t>(rng.uniform_int(1, 24));
    const auto cols = trial % 3 == 0 ? rows : static_cast<std::size_t>(rng.uniform_int(1, 24));
    auto m = testing::random_matrix(rows, cols, rng);
    if (trial % 5 == 1 && cols > 1) {
      // Rank deficiency: copy a column.
      std::copy(m.col(0).begin(), m.col(0).end(), m.col(cols - 1).begin());
    }
    const auto r = svd(m);
    const double nm = r.sigma.empty() ? 0.0 : r.sigma.front();
    CHECK(frobenius_norm(m - reconstruct(r)) <= 1e-12 * (1.0 + nm));
    CHECK(std::is_sorted(r.sigma.rbegin(), r.sigma.rend()));
    CHECK(orthonormality_defect(r.u) < 1e-12);
    CHECK(orthonormality_defect(r.v) < 1e-12);
    const Eigen::VectorXd oracle = Eigen::JacobiSVD<Eigen::MatrixXcd>(testing::to_eigen(m)).singularValues();
    for (std::size_t k = 0; k < r.sigma.size(); ++k) CHECK(std::abs(r.sigma[k] - oracle(k)) <= 1e-12 * (1.0 + nm));

    const auto h = random_hermitian(rows, rng);
    const auto e = herm_eig(h);
    CMatrix ql = e.q;
    for (std::size_t k = 0; k < rows; ++k)
      for (auto& x : ql.col(k)) x *= e.lambda[k];
    const double nh = spectral_norm(h);
    CHECK(frobenius_norm(h * e.q - ql) <= 1e-12 * (1.0 + nh));
    CHECK(orthonormality_defect(e.q) < 1e-12);
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(testing::to_eigen(h)).eigenvalues();
    for (std::size_t k = 0; k < rows; ++k) CHECK(std::abs(e.lambda[k] - ev(k)) <= 1e-12 * (1.0 + nh));
  }
}

TEST_CASE("real svd") {
  harness::Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 30));
    RMatrix m(n, n);
    for (auto& x : m.data()) x = rng.normal();
    const auto r = svd(m);
    RMatrix us = r.u;
    for (std::size_t k = 0; k < n; ++k)
      for (auto& x : us.col(k)) x *= r.sigma[k];
    const RMatrix back = us * adjoint(r.v);
    CHECK(frobenius_norm(m - back) <= 1e-12 * (1.0 + r.sigma.front()));
  }
}

TEST_CASE("psd_power examples and properties") {
  CHECK(frobenius_norm(psd_power(CMatrix::identity(3), PsdPower::MinusHalf) - CMatrix::identity(3)) < 1e-15);
  const CMatrix d{{4.0, 0.0}, {0.0, 9.0}};
  CHECK(frobenius_norm(psd_power(d, PsdPower::Half) - CMatrix{{2.0, 0.0}, {0.0, 3.0}}) < 1e-14);

  harness::Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 12));
    const auto t = testing::random_matrix(n, n, rng);
    const CMatrix m = CMatrix::identity(n) + adjoint(t) * t;
    const auto q = psd_power(m, PsdPower::MinusHalf);
    CHECK(frobenius_norm(q * m * q - CMatrix::identity(n)) <= 1e-10);
    const auto r = psd_power(m, PsdPower::Half);
    CHECK(frobenius_norm(r * r - m) <= 1e-12 * (1.0 + spectral_norm(m)) * n);
    CHECK(frobenius_norm(q * r - CMatrix::identity(n)) <= 1e-11);
  }
  CHECK_THROWS_AS(psd_power(CMatrix{{-1.0, 0.0}, {0.0, 1.0}}, PsdPower::Half), NotPositive);
  CHECK_THROWS_AS(psd_power(CMatrix{{0.0, 0.0}, {0.0, 1.0}}, PsdPower::MinusHalf), SingularMatrix);
  // A tiny negative eigenvalue inside the clamp is treated as zero.
  CHECK(frobenius_norm(psd_power(CMatrix{{-1e-14, 0.0}, {0.0, 1.0}}, PsdPower::Half) -
                       CMatrix{{0.0, 0.0}, {0.0, 1.0}}) < 1e-15);
}

TEST_CASE("numeric_rank") {
  const std::vector<double> a{1.0, 0.0};
  CHECK(numeric_rank(a, 1.0) == 1);
  const std::vector<double> z{0.0, 0.0, 0.0};
  CHECK(numeric_rank(z, 0.0) == 0);
  const std::vector<double> tiny{1.0, 1e-20};
  CHECK(numeric_rank(tiny, 1.0) == 1);

  harness::Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(static_cast<std::size_t>(rng.uniform_int(1, 10)));
    for (auto& x : s) x = rng.chance(0.3) ? 1e-18 * rng.uniform(0, 1) : rng.uniform(0.01, 5.0);
    std::sort(s.rbegin(), s.rend());
    const double scale = s.front();
    const auto r = numeric_rank(s, scale);
    for (double c : {1e-6, 3.0, 1e6}) {
      std::vector<double> sc = s;
      for (auto& x : sc) x *= c;
      CHECK(numeric_rank(sc, scale * c) == r);
    }
    // Monotone: raising any singular value cannot lower the rank.
    std::vector<double> up = s;
    up.back() = scale;
    std::sort(up.rbegin(), up.rend());
    CHECK(numeric_rank(up, scale) >= r);
  }
}

TEST_CASE("spectral projections and null space") {
  const CMatrix h{{2.0, 0.0, 0.0}, {0.0, 5.0, 0.0}, {0.0, 0.0, 2.0 + 1e-13}};
  const auto ps = spectral_projections(h);
  REQUIRE(ps.size() == 2);
  CHECK(std::abs(trace(ps[0]) - 2.0) < 1e-12);
  CHECK(std::abs(trace(ps[1]) - 1.0) < 1e-12);
  CHECK(frobenius_norm(ps[0] + ps[1] - CMatrix::identity(3)) < 1e-12);

  const CMatrix m{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}};
  const auto ns = null_space(m);
  REQUIRE(ns.cols() == 2);
  CHECK(frobenius_norm(m * ns) < 1e-14);
  CHECK(orthonormality_defect(ns) < 1e-14);
  CHECK(null_space(CMatrix::identity(4)).cols() == 0);
}

}  // TEST_SUITE

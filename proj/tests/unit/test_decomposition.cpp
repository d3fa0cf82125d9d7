#include "modop/decomposition.hpp"
#include "modop/numkernel.hpp"
#include "support.hpp"

using namespace modop;
using testing::diag_op;
using testing::dist;
using testing::I;
using testing::scalar_op;

TEST_SUITE("decomposition") {

TEST_CASE("abs_op examples") {
  const auto shift = scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(dist(abs_op(shift), diag_op({0.0, 1.0})) < 1e-15);
  const auto p = scalar_op(CMatrix{{2.0, 1.0}, {1.0, 2.0}});
  CHECK(dist(abs_op(p), p) < 1e-14);
  CHECK(dist(abs_op(diag_op({I, 0.0})), diag_op({1.0, 0.0})) < 1e-15);
}

TEST_CASE("polar examples") {
  const auto id = OperatorMatrix::identity(AlgebraShape({2, 1}), 2);
  auto parts = polar(id);
  CHECK(dist(parts.v, id) < 1e-15);
  CHECK(dist(parts.abs, id) < 1e-15);

  const auto shift = scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  parts = polar(shift);
  CHECK(dist(parts.v, shift) < 1e-15);
  CHECK(dist(parts.abs, diag_op({0.0, 1.0})) < 1e-15);
  CHECK(dist(parts.v * parts.abs, shift) < 1e-15);

  parts = polar(diag_op({I, 0.0}));
  CHECK(dist(parts.v, diag_op({I, 0.0})) < 1e-15);
  CHECK(dist(parts.abs, diag_op({1.0, 0.0})) < 1e-15);
}

TEST_CASE("kernel and range projections") {
  const AlgebraShape s({2, 1});
  const auto z = OperatorMatrix::zero(s, 2);
  const auto id = OperatorMatrix::identity(s, 2);
  CHECK(dist(kernel_projection(z), id) == 0.0);
  CHECK(dist(range_projection(z), z) == 0.0);
  const auto t = harness::gen_random_operator(s, 2, 17);
  CHECK(dist(kernel_projection(t), z) < 1e-14);
  CHECK(dist(range_projection(t), id) < 1e-13);
  const auto shift = scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  CHECK(dist(kernel_projection(shift), diag_op({1.0, 0.0})) < 1e-15);
  CHECK(dist(range_projection(shift), diag_op({1.0, 0.0})) < 1e-15);
}

TEST_CASE("polar condition report examples") {
  auto rep = check_polar_conditions(OperatorMatrix::identity(AlgebraShape({3}), 1));
  CHECK(rep.passed());
  for (const auto& r : rep.residuals) CHECK(r.value < 1e-15);
  rep = check_polar_conditions(harness::gen_random_operator(AlgebraShape({1}), 3, 99));
  CHECK(rep.passed());
  // V*T = |T| for diag(i, 0).
  const auto t = diag_op({I, 0.0});
  const auto parts = polar(t);
  CHECK(dist(adjoint(parts.v) * t, diag_op({1.0, 0.0})) < 1e-15);
  CHECK(check_polar_conditions(t).passed());
}

TEST_CASE("polar invariants on random operators") {
  harness::Rng rng(1234);
  for (int trial = 0; trial < 500; ++trial) {
    const auto dims = testing::random_dims(rng);
    OperatorMatrix t = harness::gen_random_operator(dims.shape, dims.rank, rng.next());
    if (trial % 2 == 1) {
      // Force a kernel through a rank-deficient middle factor.
      const auto p = kernel_projection(harness::gen_random_positive(dims.shape, dims.rank, rng.next(), 0.5));
      t = t * (OperatorMatrix::identity(dims.shape, dims.rank) - p);
    }
    const auto parts = polar(t);
    const auto& v = parts.v;
    const double nt = norm(t);
    const auto rep = check_polar_conditions(t);
    CHECK_MESSAGE(rep.passed(), "trial ", trial);

    const auto vsv = adjoint(v) * v;
    const auto vvs = v * adjoint(v);
    CHECK(dist(vsv * vsv, vsv) < 1e-12);
    CHECK(dist(vvs * vvs, vvs) < 1e-12);
    CHECK(dist(vvs, range_projection(t)) < 1e-9);

    // Uniqueness: any partial isometry W with T = W|T| and Ker W = Ker T is V.
    // Build W = V + (something supported on Ker T) and watch it fail the kernel condition.
    const auto pk = kernel_projection(t);
    const auto w = v + pk;
    if (norm(pk) > 0.5) {
      CHECK(dist(w * parts.abs, t) <= 1e-9 * (1 + nt));
      CHECK(dist(kernel_projection(w), pk) > 0.5);
    }

    // |T| and |T*| share the nonzero spectrum.
    const auto sa = singular_system(parts.abs).singular_values();
    const auto sb = singular_system(abs_op(adjoint(t))).singular_values();
    for (std::size_t i = 0; i < sa.size(); ++i) CHECK(std::abs(sa[i] - sb[i]) <= 1e-9 * (1 + nt));
  }
}

TEST_CASE("SVD route for |T| agrees with the functional-calculus route") {
  harness::Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto t = harness::gen_random_operator(dims.shape, dims.rank, rng.next());
    const auto via_power = map_blocks(t, [](const CMatrix& b) {
      return numkernel::psd_power(adjoint(b) * b, numkernel::PsdPower::Half);
    });
    const double nt = norm(t);
    // The T*T route squares the condition number, so it only resolves to about √eps near the kernel.
    CHECK(dist(abs_op(t), via_power) <= 1e-6 * (1 + nt));
    const auto a = abs_op(t);
    CHECK(dist(a * a, adjoint(t) * t) <= 1e-12 * (1 + nt) * (1 + nt));
  }
}

TEST_CASE("projection lemma: trace-orthogonal projections are A-linear") {
  // The kernel projection is computed in the embedding; it must be an operator
  // on the module, i.e. block-diagonal with identical entries under the right A-action.
  harness::Rng rng(91);
  for (int trial = 0; trial < 50; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto t = harness::gen_random_normal(dims.shape, dims.rank, rng.next(), {.kernel_probability = 0.4});
    const auto p = kernel_projection(t);
    CHECK(unembed(embed(p), dims.shape, dims.rank) == p);
    CHECK(dist(p * p, p) < 1e-12);
    CHECK(dist(adjoint(p), p) < 1e-14);
    CHECK(norm(t * p) <= 1e-12 * (1 + norm(t)));
    std::vector<CMatrix> xb, ab;
    for (int n : dims.shape.block_dims()) {
      xb.push_back(testing::random_matrix(dims.rank * n, n, rng));
      ab.push_back(testing::random_matrix(n, n, rng));
    }
    const auto x = ModuleVector::from_blocks(dims.shape, dims.rank, xb);
    const AlgebraElement a(dims.shape, ab);
    const auto lhs = p * x.right_mul(a);
    const auto rhs = (p * x).right_mul(a);
    const auto diff = lhs + Complex(-1.0) * rhs;
    CHECK(norm(diff) <= 1e-12 * (1 + norm(x) * norm(a)));
  }
}

}  // TEST_SUITE

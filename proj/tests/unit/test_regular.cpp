#include <cmath>

#include "modop/decomposition.hpp"
#include "modop/regular.hpp"
#include "support.hpp"

using namespace modop;
using testing::diag_op;
using testing::dist;
using testing::I;
using testing::scalar_op;

TEST_SUITE("regular") {

TEST_CASE("bounded transform examples") {
  const AlgebraShape s({2, 1});
  const auto z = OperatorMatrix::zero(s, 2);
  const auto id = OperatorMatrix::identity(s, 2);
  CHECK(dist(bounded_transform(z).transform(), z) == 0.0);
  CHECK(dist(bounded_transform(id).transform(), (1.0 / std::sqrt(2.0)) * id) < 1e-15);
  CHECK(dist(bounded_transform(diag_op({3.0, 4.0})).transform(), diag_op({3.0 / std::sqrt(10.0), 4.0 / std::sqrt(17.0)})) <
        1e-15);
}

TEST_CASE("inverse transform examples") {
  const AlgebraShape s({2});
  const auto z = OperatorMatrix::zero(s, 2);
  const auto id = OperatorMatrix::identity(s, 2);
  CHECK(dist(inverse_transform(RegularOp(z)), z) == 0.0);
  CHECK(dist(inverse_transform(RegularOp((1.0 / std::sqrt(2.0)) * id)), id) < 1e-15);
  CHECK_THROWS_AS(RegularOp(2.0 * id), TransformSingular);
  CHECK_THROWS_AS(RegularOp{id}, TransformSingular);
  // Admissible as a RegularOp but too close to the boundary to invert.
  const RegularOp edge((1.0 - 1e-10) * id);
  CHECK(edge.margin() > 0.0);
  CHECK_THROWS_AS(inverse_transform(edge), TransformSingular);
}

TEST_CASE("roundtrips") {
  harness::Rng rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dims = testing::random_dims(rng);
    auto t = harness::gen_random_operator(dims.shape, dims.rank, rng.next());
    t = (rng.uniform(0.0, 10.0) / norm(t)) * t;
    const double nt = norm(t);
    const auto f = bounded_transform(t);
    CHECK(norm(f.transform()) < 1.0);
    CHECK(dist(inverse_transform(f), t) <= 1e-6 * std::pow(1 + nt, 3));

    auto g = harness::gen_random_operator(dims.shape, dims.rank, rng.next());
    g = (rng.uniform(0.0, 0.95) / norm(g)) * g;
    const RegularOp r(g);
    const auto back = inverse_transform(r);
    CHECK(dist(bounded_transform(back).transform(), g) <= 1e-10);
    CHECK(dist(transform_q(r), transform_q(back)) <= 1e-10);
  }
}

TEST_CASE("transform norm tends to one") {
  const auto id = OperatorMatrix::identity(AlgebraShape({1}), 1);
  double prev = 0.0;
  for (double c : {1.0, 10.0, 100.0}) {
    const double nf = norm(bounded_transform(c * id).transform());
    CHECK(nf > prev);
    CHECK(nf < 1.0);
    prev = nf;
  }
  CHECK(prev > 0.9999);
}

TEST_CASE("adjoint compatibility examples") {
  const auto h = harness::gen_random_selfadjoint(AlgebraShape({3}), 2, 3);
  auto rep = transform_adjoint_compat(h);
  CHECK(rep.passed());
  CHECK(rep.flag_value("selfadjoint_f"));

  const auto t = diag_op({I, 0.0});
  const auto f = bounded_transform(t).transform();
  CHECK(dist(f, diag_op({I / std::sqrt(2.0), 0.0})) < 1e-15);
  rep = transform_adjoint_compat(t);
  CHECK(rep.passed());
  CHECK(rep.flag_value("normal_f"));
  CHECK(dist(kernel_projection(f), diag_op({0.0, 1.0})) < 1e-15);

  const auto shift = scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  rep = transform_adjoint_compat(shift);
  CHECK(rep.passed());
  CHECK_FALSE(rep.flag_value("normal_f"));
  CHECK(rep.at("kernel_match").value < 1e-15);
}

TEST_CASE("regular normal theorem") {
  const auto t = diag_op({I, 0.0});
  auto w = theorem_regular_normal(t);
  CHECK(dist(w.u, diag_op({-1.0, 1.0})) < 1e-15);
  CHECK(dist(w.u * adjoint(t), t) < 1e-15);
  CHECK(dist(transform_q(t), diag_op({1.0 / std::sqrt(2.0), 1.0})) < 1e-15);
  CHECK(w.report.passed());

  const auto p = harness::gen_random_positive(AlgebraShape({2, 2}), 2, 9);
  w = theorem_regular_normal(p);
  CHECK(dist(w.u, OperatorMatrix::identity(p.shape(), 2)) < 1e-10);

  harness::Rng rng(27);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dims = testing::random_dims(rng);
    auto n = harness::gen_random_normal(dims.shape, dims.rank, rng.next(), {.kernel_probability = 0.3});
    if (norm(n) > 0) n = (rng.uniform(0.1, 10.0) / norm(n)) * n;
    const auto wn = theorem_regular_normal(n);
    CHECK_MESSAGE(wn.report.passed(), "trial ", trial);
    CHECK(wn.residual_factorization <= 1e-8 * std::pow(1 + norm(n), 2));
  }
  CHECK_THROWS_AS(theorem_regular_normal(scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}})), PreconditionFailed);
}

TEST_CASE("closed range specialization") {
  const auto shift = scalar_op(CMatrix{{0.0, 1.0}, {0.0, 0.0}});
  auto rep = check_closed_range_specialization(shift);
  CHECK(rep.flag_value("closed_range"));
  CHECK(rep.flag_value("compact_algebra"));
  CHECK_FALSE(rep.flag_value("normal"));
  CHECK(rep.passed());
  REQUIRE_FALSE(rep.notes.empty());
  CHECK(rep.notes.front().find("not applicable") != std::string::npos);

  const auto n = harness::gen_random_normal(AlgebraShape({2, 1}), 3, 4);
  rep = check_closed_range_specialization(n);
  CHECK(rep.flag_value("normal"));
  CHECK(rep.passed());
  CHECK_NOTHROW(rep.at("inherited.factorization"));
}

}  // TEST_SUITE

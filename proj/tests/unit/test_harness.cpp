#include "modop/decomposition.hpp"
#include "modop/harness.hpp"
#include "modop/normality.hpp"
#include "support.hpp"

using namespace modop;
using namespace modop::harness;
using testing::diag_op;
using testing::dist;

TEST_SUITE("harness") {

TEST_CASE("seed mixing") {
  CHECK(mix(1, 0, 0) == mix(1, 0, 0));
  CHECK(mix(1, 0, 0) != mix(1, 0, 1));
  CHECK(mix(1, 0, 0) != mix(1, 1, 0));
  CHECK(mix(1, 0, 0) != mix(2, 0, 0));
}

TEST_CASE("generators are deterministic") {
  const AlgebraShape s({2, 3});
  CHECK(gen_random_operator(s, 2, 42) == gen_random_operator(s, 2, 42));
  CHECK_FALSE(gen_random_operator(s, 2, 42) == gen_random_operator(s, 2, 43));
  CHECK(gen_random_normal(s, 2, 42) == gen_random_normal(s, 2, 42));
  const auto a = gen_kaplansky_instance(7, KaplanskyBranch::Generic);
  const auto b = gen_kaplansky_instance(7, KaplanskyBranch::Generic);
  CHECK(a.t == b.t);
  CHECK(a.s == b.s);
}

TEST_CASE("random normal operators are normal, random operators are not") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto t = gen_random_normal(dims.shape, dims.rank, rng.next(), {.kernel_probability = 0.2, .repeat_probability = 0.2});
    const double nt = norm(t);
    CHECK(normality_defect(t) <= 1e-12 * (1 + nt * nt));
    CHECK(unitarity_defect(gen_random_unitary(dims.shape, dims.rank, rng.next())) < 1e-12);
  }
  int non_normal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    non_normal += is_normal(gen_random_operator(AlgebraShape({1}), 2, seed)).holds ? 0 : 1;
  CHECK(non_normal >= 95);
}

TEST_CASE("commutant generator") {
  const AlgebraShape c({1});
  // Everything commutes with I.
  const auto s_id = gen_commutant_element(OperatorMatrix::identity(c, 3), 5);
  CHECK_FALSE(is_normal(s_id).holds);
  // The commutant of a diagonal with distinct entries is diagonal.
  const auto s = gen_commutant_element(diag_op({1.0, 2.0}), 5);
  CHECK(std::abs(s.entry(0, 1).block(0)(0, 0)) < 1e-12);
  CHECK(std::abs(s.entry(1, 0).block(0)(0, 0)) < 1e-12);

  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto t = gen_random_normal(dims.shape, dims.rank, rng.next(), {.kernel_probability = 0.3, .repeat_probability = 0.3});
    const auto st = gen_commutant_element(t, rng.next());
    CHECK(commutes(st, t).holds);
    CHECK(commutes(st, adjoint(t)).holds);
    const auto g = gen_random_operator(dims.shape, dims.rank, rng.next());
    const auto sa = gen_commutant_element(g, rng.next(), CommutantMode::AbsOnly);
    CHECK(commutes(sa, abs_op(g)).holds);
  }
}

TEST_CASE("Kaplansky instances") {
  // The archetype sits in the generic family: T = diag(1,2), M = [[0,1],[1,0]].
  const auto t = diag_op({1.0, 2.0});
  const auto m = testing::scalar_op(CMatrix{{0.0, 1.0}, {1.0, 0.0}});
  const auto s = testing::scalar_op(CMatrix{{1.0, 0.0}, {0.0, 0.5}}) * m;
  CHECK(dist(s, testing::scalar_op(CMatrix{{0.0, 1.0}, {0.5, 0.0}})) == 0.0);
  CHECK_FALSE(is_normal(s * t).holds);

  int witnesses = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto branch = seed % 2 == 0 ? KaplanskyBranch::Commuting : KaplanskyBranch::Generic;
    const auto inst = gen_kaplansky_instance(seed, branch);
    const auto k = kaplansky_check(inst.t, inst.s);
    CHECK(k.passed());
    if (branch == KaplanskyBranch::Commuting) {
      CHECK(k.lhs.holds);
      CHECK(k.rhs.holds);
    } else if (!k.lhs.holds && !k.rhs.holds) {
      ++witnesses;
    }
  }
  CHECK(witnesses > 0);
}

TEST_CASE("fixed-point sampler") {
  const AlgebraShape s({2, 1});
  const auto id = OperatorMatrix::identity(s, 2);
  auto fp = sample_fixed_point(id, 3);
  CHECK(is_selfadjoint(fp.t).holds);
  // Selfadjoint elements of M_2(A): real dimension 16 + 4.
  CHECK(fp.solution_dim == 20);
  fp = sample_fixed_point(Complex(-1.0) * id, 3);
  CHECK(dist(fp.t, Complex(-1.0) * adjoint(fp.t)) < 1e-12);
  CHECK(is_normal(fp.t).holds);

  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto u = gen_random_unitary(dims.shape, dims.rank, rng.next());
    const auto f = sample_fixed_point(u, rng.next());
    CHECK(norm(f.t - u * adjoint(f.t)) <= 1e-9 * (1 + norm(f.t)));
    CHECK(is_normal(f.t).holds);
    CHECK(f.solution_dim >= dims.rank * dims.shape.total_dim());
  }
}

TEST_CASE("config validation") {
  SuiteConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.trials = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigInvalid);
  cfg = {};
  cfg.max_block = 0;
  CHECK_THROWS_AS(validate(cfg), ConfigInvalid);
  cfg = {};
  cfg.tol = -1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigInvalid);
  cfg = {};
  cfg.suites = {"nope"};
  CHECK_THROWS_AS(validate(cfg), ConfigInvalid);
  CHECK_THROWS_AS(run_suite(cfg), ConfigInvalid);
}

TEST_CASE("structural contract of a one-trial run") {
  SuiteConfig cfg;
  cfg.trials = 1;
  cfg.seed = 7;
  const auto rep = run_suite(cfg);
  REQUIRE(rep.suites.size() == 9);
  CHECK(rep.all_passed());
  const auto j = to_json(rep);
  CHECK(j.at("suites").size() == 9);
  CHECK(j.contains("wallclock_ms"));
  CHECK(j.at("config").at("seed") == 7);
  for (const auto& s : j.at("suites")) {
    CHECK(s.contains("worst_residuals"));
    CHECK(s.contains("failures"));
  }
}

TEST_CASE("instances round-trip through JSON") {
  SuiteConfig cfg;
  for (std::size_t si = 0; si < suite_names().size(); ++si) {
    const auto inst = generate_instance(suite_names()[si], mix(5, si, 0), 0, cfg);
    const auto back = instance_from_json(Json::parse(instance_to_json(inst).dump()));
    CHECK(back.ops == inst.ops);
    CHECK(back.seed == inst.seed);
    const auto a = check_instance(inst);
    const auto b = check_instance(back);
    CHECK(a.status == b.status);
    REQUIRE(a.report.residuals.size() == b.report.residuals.size());
    for (std::size_t i = 0; i < a.report.residuals.size(); ++i)
      CHECK(a.report.residuals[i].value == b.report.residuals[i].value);
  }
  CHECK_THROWS_AS(instance_from_json(Json::parse(R"({"suite":"kaplansky"})")), FormatError);
}

}  // TEST_SUITE

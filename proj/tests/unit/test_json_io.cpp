#include "modop/json_io.hpp"
#include "support.hpp"

using namespace modop;
using testing::I;

TEST_SUITE("json_io") {

TEST_CASE("algebra element layout") {
  const AlgebraShape m2({2});
  const AlgebraElement a(m2, {CMatrix{{1.0, I}, {0.0, -2.0}}});
  const auto j = to_json(a);
  CHECK(j.at("shape") == Json::array({2}));
  // Row-major rows of [re, im] pairs.
  CHECK(j.at("blocks")[0][0][1] == Json::array({0.0, 1.0}));
  CHECK(element_from_json(j) == a);
}

TEST_CASE("operators round-trip bit-exactly") {
  harness::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto dims = testing::random_dims(rng);
    const auto t = harness::gen_random_operator(dims.shape, dims.rank, rng.next());
    CHECK(operator_from_json(Json::parse(to_json(t).dump())) == t);
  }
}

TEST_CASE("plain numbers are accepted as real entries") {
  const auto j = Json::parse(R"({"shape":[1],"rank":2,"entries":[
      [{"shape":[1],"blocks":[[[1]]]}, {"shape":[1],"blocks":[[[0]]]}],
      [{"shape":[1],"blocks":[[[0]]]}, {"shape":[1],"blocks":[[[2.5]]]}]]})");
  const auto t = operator_from_json(j);
  CHECK(t == testing::diag_op({1.0, 2.5}));
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"shape":[1],"rank":2})")), FormatError);
  CHECK_THROWS_AS(operator_from_json(Json::parse(R"({"shape":[0],"rank":1,"entries":[[{}]]})")), Error);
  CHECK_THROWS_AS(element_from_json(Json::parse(R"({"shape":[2],"blocks":[[[1,2]]]})")), Error);
  CHECK_THROWS_AS(operator_from_json(Json::parse("[1,2,3]")), FormatError);
}

TEST_CASE("bounded transform tagging") {
  const auto t = testing::diag_op({3.0, 4.0});
  const auto j = to_json(bounded_transform(t));
  CHECK(j.at("kind") == "bounded_transform");
  CHECK(is_bounded_transform(j));
  CHECK_FALSE(is_bounded_transform(to_json(t)));
  const auto r = regular_from_json(j);
  CHECK(r.transform() == bounded_transform(t).transform());
  CHECK_THROWS_AS(regular_from_json(to_json(t)), FormatError);
}

TEST_CASE("reports serialize residuals and flags") {
  Report rep{"demo"};
  rep.add("a", 1e-12, 1e-9);
  rep.flag("f", true);
  const auto j = to_json(rep);
  CHECK(j.at("name") == "demo");
  CHECK(j.at("passed") == true);
  CHECK(j.dump().find("\"a\"") != std::string::npos);
}

}  // TEST_SUITE

#include "modop/json_io.hpp"

#include <string>

namespace modop {
namespace {

template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

Json to_json(const AlgebraShape& s) { return Json(s.block_dims()); }

AlgebraShape shape_from_json(const Json& j) {
  return guarded("shape", [&] { return AlgebraShape(j.get<std::vector<int>>()); });
}

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const Json& j) {
  return guarded("matrix", [&] {
    if (!j.is_array()) throw FormatError("matrix must be an array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j[0].size();
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!j[i].is_array() || j[i].size() != cols) throw FormatError("ragged matrix rows");
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& z = j[i][c];
        if (z.is_number()) {
          m(i, c) = z.get<double>();
        } else {
          if (!z.is_array() || z.size() != 2) throw FormatError("complex entries are [re, im] pairs");
          m(i, c) = Complex(z[0].get<double>(), z[1].get<double>());
        }
      }
    }
    return m;
  });
}

Json to_json(const AlgebraElement& a) {
  Json blocks = Json::array();
  for (const auto& b : a.blocks()) blocks.push_back(to_json(b));
  return {{"shape", to_json(a.shape())}, {"blocks", std::move(blocks)}};
}

AlgebraElement element_from_json(const Json& j) {
  return guarded("algebra element", [&] {
    auto shape = shape_from_json(j.at("shape"));
    std::vector<CMatrix> blocks;
    for (const auto& b : j.at("blocks")) blocks.push_back(matrix_from_json(b));
    return AlgebraElement(std::move(shape), std::move(blocks));
  });
}

Json to_json(const OperatorMatrix& t) {
  Json grid = Json::array();
  for (std::size_t r = 0; r < t.rank(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < t.rank(); ++c) row.push_back(to_json(t.entry(r, c)));
    grid.push_back(std::move(row));
  }
  return {{"shape", to_json(t.shape())}, {"rank", t.rank()}, {"entries", std::move(grid)}};
}

OperatorMatrix operator_from_json(const Json& j) {
  return guarded("operator", [&] {
    auto shape = shape_from_json(j.at("shape"));
    const auto k = j.at("rank").get<std::size_t>();
    const auto& grid = j.at("entries");
    if (!grid.is_array() || grid.size() != k) throw FormatError("entries must be a k x k grid");
    std::vector<AlgebraElement> entries;
    for (const auto& row : grid) {
      if (!row.is_array() || row.size() != k) throw FormatError("entries must be a k x k grid");
      for (const auto& e : row) entries.push_back(element_from_json(e));
    }
    return OperatorMatrix(shape, k, entries);
  });
}

bool is_bounded_transform(const Json& j) {
  return j.is_object() && j.contains("kind") && j["kind"] == "bounded_transform";
}

Json to_json(const RegularOp& r) {
  Json j = to_json(r.transform());
  j["kind"] = "bounded_transform";
  return j;
}

RegularOp regular_from_json(const Json& j) {
  if (!is_bounded_transform(j)) throw FormatError("expected an operator tagged kind=bounded_transform");
  return RegularOp(operator_from_json(j));
}

Json to_json(const Residual& r) {
  return {{"name", r.name}, {"value", r.value}, {"bound", r.bound}, {"pass", r.pass()}};
}

Json to_json(const Report& r) {
  Json res = Json::array();
  for (const auto& x : r.residuals) res.push_back(to_json(x));
  Json flags = Json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  return {{"name", r.name}, {"passed", r.passed()}, {"residuals", std::move(res)},
          {"flags", std::move(flags)}, {"values", std::move(values)}, {"notes", r.notes}};
}

Json to_json(const UnitaryWitness& w) {
  Json j = to_json(w.report);
  j["U"] = to_json(w.u);
  j["residual_factorization"] = w.residual_factorization;
  j["residual_unitarity"] = w.residual_unitarity;
  j["residual_commutation_T"] = w.residual_commutation_t;
  j["residual_commutation_Tstar"] = w.residual_commutation_tstar;
  return j;
}

Json to_json(const KaplanskyReport& k) {
  Json j = to_json(k.report);
  j["lhs_st_normal"] = {{"holds", k.lhs.holds}, {"residual", k.lhs.residual}};
  j["rhs_s_commutes_abs"] = {{"holds", k.rhs.holds}, {"residual", k.rhs.residual}};
  j["status"] = to_string(k.status);
  j["passed"] = k.passed();
  if (k.proof_identity) j["proof_identity"] = *k.proof_identity;
  return j;
}

}  // namespace modop

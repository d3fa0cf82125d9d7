#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modop/decomposition.hpp"
#include "modop/harness.hpp"
#include "modop/json_io.hpp"
#include "modop/normality.hpp"
#include "modop/regular.hpp"

namespace py = pybind11;
using namespace modop;

namespace {

using CArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

CMatrix to_matrix(const CArray& a) {
  if (a.ndim() != 2) throw ShapeMismatch("expected a 2-d array");
  const auto r = a.unchecked<2>();
  CMatrix m(static_cast<std::size_t>(r.shape(0)), static_cast<std::size_t>(r.shape(1)));
  for (py::ssize_t i = 0; i < r.shape(0); ++i)
    for (py::ssize_t j = 0; j < r.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

CArray to_array(const CMatrix& m) {
  CArray a({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return a;
}

std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_modop, m) {
  m.doc() = "Operators on finite-rank Hilbert C*-modules over direct sums of matrix algebras";

  py::register_exception<Error>(m, "ModopError");

  py::class_<OperatorMatrix>(m, "Operator")
      .def(py::init([](const std::vector<int>& shape, std::size_t rank, const std::vector<CArray>& blocks) {
             std::vector<CMatrix> mats;
             for (const auto& b : blocks) mats.push_back(to_matrix(b));
             return OperatorMatrix::from_blocks(AlgebraShape(shape), rank, std::move(mats));
           }),
           py::arg("shape"), py::arg("rank"), py::arg("blocks"))
      .def_static("from_matrix",
                  [](const CArray& a) {
                    auto mat = to_matrix(a);
                    const auto k = mat.rows();
                    return OperatorMatrix::from_blocks(AlgebraShape({1}), k, {std::move(mat)});
                  })
      .def_static("identity", [](const std::vector<int>& shape, std::size_t rank) {
        return OperatorMatrix::identity(AlgebraShape(shape), rank);
      })
      .def_static("zero", [](const std::vector<int>& shape, std::size_t rank) {
        return OperatorMatrix::zero(AlgebraShape(shape), rank);
      })
      .def_static("from_json", [](const std::string& s) { return operator_from_json(Json::parse(s)); })
      .def_property_readonly("shape", [](const OperatorMatrix& t) { return t.shape().block_dims(); })
      .def_property_readonly("rank", &OperatorMatrix::rank)
      .def_property_readonly("blocks",
                             [](const OperatorMatrix& t) {
                               std::vector<CArray> out;
                               for (const auto& b : t.blocks()) out.push_back(to_array(b));
                               return out;
                             })
      .def("embed", [](const OperatorMatrix& t) { return to_array(embed(t)); })
      .def("adjoint", [](const OperatorMatrix& t) { return adjoint(t); })
      .def("norm", [](const OperatorMatrix& t) { return norm(t); })
      .def("to_json", [](const OperatorMatrix& t) { return dump(to_json(t)); })
      .def(py::self + py::self)
      .def(py::self - py::self)
      .def(py::self * py::self)
      .def("__rmul__", [](const OperatorMatrix& t, Complex s) { return s * t; })
      .def("__eq__", [](const OperatorMatrix& a, const OperatorMatrix& b) { return a == b; })
      .def("__repr__", [](const OperatorMatrix& t) {
        return "<Operator rank=" + std::to_string(t.rank()) + " embed_dim=" + std::to_string(t.embed_dim()) + ">";
      });

  m.def("polar", [](const OperatorMatrix& t) {
    auto p = polar(t);
    return py::make_tuple(p.v, p.abs);
  });
  m.def("abs_op", &abs_op);
  m.def("kernel_projection", &kernel_projection);
  m.def("range_projection", &range_projection);
  m.def("_check_polar_conditions", [](const OperatorMatrix& t, double tol) { return dump(to_json(check_polar_conditions(t, tol))); });

  auto verdict = [](Verdict v) { return py::make_tuple(v.holds, v.residual); };
  m.def("is_normal", [=](const OperatorMatrix& t, double tol) { return verdict(is_normal(t, tol)); }, py::arg("t"),
        py::arg("tol") = kDefaultTol);
  m.def("is_selfadjoint", [=](const OperatorMatrix& t, double tol) { return verdict(is_selfadjoint(t, tol)); },
        py::arg("t"), py::arg("tol") = kDefaultTol);
  m.def("is_positive", [=](const OperatorMatrix& t, double tol) { return verdict(is_positive(t, tol)); },
        py::arg("t"), py::arg("tol") = kDefaultTol);
  m.def("commutes", [=](const OperatorMatrix& a, const OperatorMatrix& b, double tol) { return verdict(commutes(a, b, tol)); },
        py::arg("a"), py::arg("b"), py::arg("tol") = kDefaultTol);

  m.def("_check_commutant_transfer", [](const OperatorMatrix& t, const OperatorMatrix& s, double tol) {
    return dump(to_json(check_commutant_transfer(t, s, tol)));
  });
  m.def("_check_v_unitary_on_range",
        [](const OperatorMatrix& t, double tol) { return dump(to_json(check_v_unitary_on_range(t, tol))); });
  m.def("_build_unitary_abs", [](const OperatorMatrix& t, double tol) {
    auto w = build_unitary_abs(t, tol);
    return py::make_tuple(w.u, dump(to_json(w)));
  });
  m.def("_build_unitary_star", [](const OperatorMatrix& t, double tol) {
    auto w = build_unitary_star(t, tol);
    return py::make_tuple(w.u, dump(to_json(w)));
  });
  m.def("_verify_converse_star", [](const OperatorMatrix& t, const OperatorMatrix& u, double tol) {
    return dump(to_json(verify_converse_star(t, u, tol)));
  });
  m.def("_fuglede_putnam_check", [](const OperatorMatrix& t, const OperatorMatrix& s, const OperatorMatrix& a, double tol) {
    return dump(to_json(fuglede_putnam_check(t, s, a, tol)));
  });
  m.def("solve_intertwiners", &solve_intertwiners);
  m.def("_kaplansky_check",
        [](const OperatorMatrix& t, const OperatorMatrix& s, double tol) { return dump(to_json(kaplansky_check(t, s, tol))); });

  m.def("bounded_transform", [](const OperatorMatrix& t) { return bounded_transform(t).transform(); });
  m.def("inverse_transform", [](const OperatorMatrix& f) { return inverse_transform(RegularOp(f)); });
  m.def("transform_q", [](const OperatorMatrix& t) { return transform_q(t); });
  m.def("_transform_adjoint_compat",
        [](const OperatorMatrix& t, double tol) { return dump(to_json(transform_adjoint_compat(t, tol))); });
  m.def("_theorem_regular_normal", [](const OperatorMatrix& t, double tol) {
    auto w = theorem_regular_normal(t, tol);
    return py::make_tuple(w.u, dump(to_json(w)));
  });

  m.def("random_operator", [](const std::vector<int>& shape, std::size_t rank, std::uint64_t seed) {
    return harness::gen_random_operator(AlgebraShape(shape), rank, seed);
  }, py::arg("shape"), py::arg("rank"), py::arg("seed"));
  m.def("random_normal", [](const std::vector<int>& shape, std::size_t rank, std::uint64_t seed) {
    return harness::gen_random_normal(AlgebraShape(shape), rank, seed);
  }, py::arg("shape"), py::arg("rank"), py::arg("seed"));
  m.def("_run_suite",
        [](int trials, std::uint64_t seed, int max_block, int max_rank, std::optional<double> tol,
           std::vector<std::string> suites, unsigned threads) {
          harness::SuiteConfig cfg;
          cfg.trials = trials;
          cfg.seed = seed;
          cfg.max_block = max_block;
          cfg.max_rank = max_rank;
          cfg.tol = tol;
          cfg.suites = std::move(suites);
          cfg.threads = threads;
          harness::SuiteReport rep;
          {
            py::gil_scoped_release release;
            rep = harness::run_suite(cfg);
          }
          return dump(harness::to_json(rep));
        });
  m.attr("DEFAULT_TOL") = kDefaultTol;
}

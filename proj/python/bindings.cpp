#include "app.hpp"

#include "qbeckner/constants.hpp"
#include "qbeckner/dirichlet.hpp"
#include "qbeckner/entropy.hpp"
#include "qbeckner/random.hpp"
#include "qbeckner/ricci.hpp"
#include "qbeckner/semigroup.hpp"
#include "qbeckner/transport.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qb;

namespace {

ConstantKind kind_from_name(const std::string& s) {
  if (s == "poincare") return ConstantKind::Poincare;
  if (s == "beckner") return ConstantKind::Beckner;
  if (s == "mlsi") return ConstantKind::Mlsi;
  if (s == "lsi") return ConstantKind::Lsi;
  if (s == "dual_beckner") return ConstantKind::DualBeckner;
  fail(Errc::DomainViolation, "unknown constant kind '" + s + "'");
}

RelKind rel_from_name(const std::string& s) {
  if (s == "umegaki") return RelKind::Umegaki;
  if (s == "sandwiched") return RelKind::Sandwiched;
  if (s == "max") return RelKind::Max;
  fail(Errc::DomainViolation, "unknown relative entropy '" + s + "'");
}

py::object json_to_py(const app::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

app::json py_to_json(const py::object& o) {
  return app::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Beckner constants, transport distances and curvature for detailed-balance Lindbladians";

  // Error subclasses ValueError and carries the error code as .code
  static PyObject* exc_type = py::exception<Error>(m, "Error", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(exc_type)(e.what());
      inst.attr("code") = errc_name(e.code());
      PyErr_SetObject(exc_type, inst.ptr());
    }
  });

  py::class_<JumpTerm>(m, "JumpTerm")
      .def(py::init([](Mat V, double omega) { return JumpTerm{std::move(V), omega}; }), py::arg("V"),
           py::arg("omega") = 0.0)
      .def_readwrite("V", &JumpTerm::V)
      .def_readwrite("omega", &JumpTerm::omega);

  py::class_<DbcLindbladian>(m, "Lindbladian")
      .def_property_readonly("dim", &DbcLindbladian::dim)
      .def_property_readonly("sigma", &DbcLindbladian::sigma)
      .def_property_readonly("sigma_min", &DbcLindbladian::sigma_min)
      .def_property_readonly("jumps", &DbcLindbladian::jumps)
      .def_property_readonly("generator", [](const DbcLindbladian& L) { return L.generator().matrix; },
                             "column-stacked matrix of the Heisenberg generator")
      .def("apply", &DbcLindbladian::apply, py::arg("X"))
      .def("apply_dual", &DbcLindbladian::apply_dual, py::arg("rho"))
      .def("evolve_heisenberg", &DbcLindbladian::evolve_heisenberg, py::arg("t"), py::arg("X"))
      .def("evolve_schrodinger", &DbcLindbladian::evolve_schrodinger, py::arg("t"), py::arg("rho"))
      .def("residual", [](const DbcLindbladian& L) { return L.residuals().worst(); });

  m.def("depolarizing", &depolarizing, py::arg("sigma"), py::arg("gamma") = 1.0);
  m.def("random_dbc", &random_dbc, py::arg("sigma"), py::arg("pairs"), py::arg("diag") = 1, py::arg("seed") = 0);
  m.def("build_from_jumps", &build_from_jumps, py::arg("sigma"), py::arg("jumps"));
  m.def(
      "alicki_decompose",
      [](const Mat& gen, const Mat& sigma) {
        return alicki_decompose(Superoperator{static_cast<int>(sigma.rows()), gen}, sigma);
      },
      py::arg("generator"), py::arg("sigma"));

  m.def("random_density", [](int d, std::uint64_t seed) { Rng r(seed); return random_density(d, r); },
        py::arg("d"), py::arg("seed"));
  m.def("diag_state", &diag_state, py::arg("eigenvalues"));

  m.def("p_divergence", [](const Mat& rho, const Mat& sigma, double p) { return p_divergence(rho, sigma, p).value; },
        py::arg("rho"), py::arg("sigma"), py::arg("p"));
  m.def(
      "relative_entropy",
      [](const Mat& rho, const Mat& sigma, const std::string& kind, double p) {
        return relative_entropy(rho, sigma, rel_from_name(kind), p).value;
      },
      py::arg("rho"), py::arg("sigma"), py::arg("kind") = "umegaki", py::arg("p") = 2.0);
  m.def("dirichlet_form", [](const DbcLindbladian& L, const Mat& X, double p) { return dirichlet_form(L, X, p).value; },
        py::arg("L"), py::arg("X"), py::arg("p"));
  m.def("entropy_production", &entropy_production, py::arg("L"), py::arg("rho"), py::arg("p"));

  m.def(
      "estimate_constant",
      [](const DbcLindbladian& L, const std::string& kind, double param, int num_starts, std::uint64_t seed) {
        EstimateOptions o;
        o.num_starts = num_starts;
        o.seed = seed;
        return estimate_constant(L, kind_from_name(kind), param, o).value;
      },
      py::arg("L"), py::arg("kind"), py::arg("param") = 0.0, py::arg("num_starts") = 32, py::arg("seed") = 0);
  m.def("depol_classical", &depol_classical, py::arg("p"), py::arg("d"));
  m.def("depol_classical_theta", &depol_classical_theta, py::arg("p"), py::arg("theta"));
  m.def("mixing_bound", &mixing_bound, py::arg("p"), py::arg("alpha_p"), py::arg("sigma_min"), py::arg("eps"));

  m.def(
      "w2p_solve",
      [](const DbcLindbladian& L, const Mat& a, const Mat& b, double p, int N) {
        W2pOptions o;
        o.N = N;
        W2pResult r = w2p_solve(L, a, b, p, o);
        py::dict d;
        d["distance"] = r.distance;
        d["states"] = r.path.states;
        d["speed2"] = r.path.speed2;
        return d;
      },
      py::arg("L"), py::arg("rho0"), py::arg("rho1"), py::arg("p"), py::arg("N") = 20);
  m.def("flat_w22", &flat_w22, py::arg("L"), py::arg("rho0"), py::arg("rho1"));

  m.def(
      "ricci_estimate",
      [](const DbcLindbladian& L, double p, int num_states, std::uint64_t seed) {
        RicciOptions o;
        o.num_states = num_states;
        o.seed = seed;
        return ricci_estimate(L, p, o).kappa;
      },
      py::arg("L"), py::arg("p"), py::arg("num_states") = 64, py::arg("seed") = 0);

  m.def("fixture", [](const std::string& name) { return json_to_py(app::config_to_json(app::fixture(name))); },
        py::arg("name"));
  m.def(
      "run",
      [](const py::object& config, bool with_timings) {
        app::ExperimentConfig c = app::parse_config(py_to_json(config));
        app::RunReport r;
        {
          py::gil_scoped_release release;
          r = app::run(c);
        }
        return json_to_py(r.to_json(with_timings));
      },
      py::arg("config"), py::arg("with_timings") = false, "run the configured tasks and return the report as a dict");
}

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ippopt/benchfns.hpp"
#include "ippopt/gibbs.hpp"
#include "ippopt/hj.hpp"
#include "ippopt/io.hpp"
#include "ippopt/ipp.hpp"

namespace py = pybind11;
using namespace ippopt;

namespace {

// Dicts cross the boundary as JSON text.
json to_cpp(const py::object& obj) {
  if (obj.is_none()) return json::object();
  const auto dumps = py::module_::import("json").attr("dumps");
  return json::parse(dumps(obj).cast<std::string>());
}

py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

IPPParams params_for(const std::string& solver, const py::object& overrides) {
  return params_from_json(to_cpp(overrides), solver_defaults(solver));
}

Objective python_objective(py::function fn, const Vector& lo, const Vector& hi, const std::string& name) {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("lo and hi must have equal, nonzero length");
  return Objective(name, Box{lo, hi}, [fn](const Vector& x) { return fn(x).cast<double>(); });
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Inexact proximal point solvers (TT-IPP, MC-IPP) and a Hopf-Lax HJ solver";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);

  py::class_<Objective>(m, "Objective")
      .def(py::init(&python_objective), py::arg("fn"), py::arg("lo"), py::arg("hi"), py::arg("name") = "python")
      .def("__call__", &Objective::operator(), py::arg("x"))
      .def_property_readonly("name", &Objective::name)
      .def_property_readonly("dim", &Objective::dim)
      .def_property_readonly("lo", [](const Objective& f) { return f.domain().lo; })
      .def_property_readonly("hi", [](const Objective& f) { return f.domain().hi; })
      .def_property_readonly("minimizer",
                             [](const Objective& f) -> std::optional<Vector> {
                               if (!f.known_min()) return std::nullopt;
                               return f.known_min()->x;
                             })
      .def_property_readonly("eval_count", &Objective::eval_count)
      .def("reset_count", &Objective::reset_count)
      .def("error_inf", &Objective::error_inf, py::arg("x"));

  m.def("benchmark_names", &benchmark_names);
  m.def(
      "make_objective",
      [](const std::string& name, int dim, std::optional<Vector> shift) {
        return make_objective(name, dim, shift ? *shift : Vector::Zero(dim));
      },
      py::arg("name"), py::arg("dim"), py::arg("shift") = py::none());
  m.def(
      "random_shift",
      [](const std::string& name, int dim, std::uint64_t seed, bool continuous) {
        return random_shift(name, dim, seed, continuous ? ShiftMode::kContinuous : ShiftMode::kLattice);
      },
      py::arg("name"), py::arg("dim"), py::arg("seed"), py::arg("continuous") = false);

  m.def(
      "default_params", [](const std::string& solver) { return to_py(to_json(solver_defaults(solver))); },
      py::arg("solver") = "tt-ipp", "Default parameters of a solver as a dict.");

  m.def(
      "minimize",
      [](const Objective& f, const std::string& solver, std::uint64_t seed, const py::object& params) {
        const RunReport r = run_solver(solver, f, params_for(solver, params), seed);
        return to_py(to_json(r));
      },
      py::arg("f"), py::arg("solver") = "tt-ipp", py::arg("seed") = 1, py::arg("params") = py::none(),
      "Runs tt-ipp, mc-ipp or prs-baseline; returns the run report as a dict.");

  m.def(
      "prox_mc",
      [](const Objective& f, const Vector& x, double t, double delta, int samples, std::uint64_t seed) {
        Rng rng(seed);
        const ProxEstimate e = prox_mc(f, {x, t, delta}, samples, rng);
        return py::make_tuple(e.point, e.effective_sample_size);
      },
      py::arg("f"), py::arg("x"), py::arg("t"), py::arg("delta"), py::arg("samples"), py::arg("seed") = 1,
      "Monte Carlo Gibbs-mean estimate of prox_{tf}(x); returns (point, ess).");

  m.def(
      "hopf_lax",
      [](const std::string& initial_condition, const Vector& x, double t, double p, std::uint64_t seed,
         bool with_residual) {
        const HJProblem prob = HJProblem::make(hj_initial_condition(initial_condition, static_cast<int>(x.size())), p, seed);
        const HJSample s = with_residual ? hopf_lax_with_residual(prob, x, t) : hopf_lax(prob, x, t);
        py::dict d;
        d["u"] = s.u_tilde;
        d["y"] = s.y_tilde;
        d["residual"] = with_residual ? py::cast(s.residual) : py::none();
        d["inner_evals"] = s.inner_evals;
        return d;
      },
      py::arg("initial_condition"), py::arg("x"), py::arg("t"), py::arg("p") = 2.0, py::arg("seed") = 1,
      py::arg("residual") = false, "Hopf-Lax value u(x, t) for \"f1\", \"f2\" or \"quadratic\".");
}

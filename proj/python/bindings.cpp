// Python bindings: meshes, the two discretisations, marking and the
// adaptive driver. Arrays cross the boundary as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "safem/domains.hpp"
#include "safem/driver.hpp"
#include "safem/experiment.hpp"
#include "safem/fem_ls.hpp"
#include "safem/fem_mixed.hpp"
#include "safem/marking.hpp"
#include "safem/mesh_io.hpp"
#include "safem/problem.hpp"

namespace py = pybind11;
using namespace safem;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  // explicit strides: the count-only constructor came out with stride 0 in some builds
  return py::array_t<double>({static_cast<py::ssize_t>(v.size())}, {static_cast<py::ssize_t>(sizeof(double))}, v.data());
}

py::array_t<double> to_array(std::span<const double> v) { return to_array(std::vector<double>(v.begin(), v.end())); }

// (n, 3, 2) array of leaf vertex coordinates in tagged order.
py::array_t<double> triangles(const Triangulation& T) {
  py::array_t<double> a({static_cast<py::ssize_t>(T.size()), py::ssize_t{3}, py::ssize_t{2}});
  auto m = a.mutable_unchecked<3>();
  for (std::size_t k = 0; k < T.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      const Vertex& v = T.forest().vertex(T.triangle(k).v[static_cast<std::size_t>(i)]);
      m(static_cast<py::ssize_t>(k), i, 0) = v.x;
      m(static_cast<py::ssize_t>(k), i, 1) = v.y;
    }
  }
  return a;
}

py::dict record_dict(const LevelRecord& r) {
  py::dict d;
  d["level"] = r.level;
  d["elements"] = r.elements;
  d["N"] = r.N;
  d["case"] = std::string(1, r.case_flag);
  d["eta2"] = r.eta2;
  d["mu2"] = r.mu2;
  d["sigma2"] = r.sigma2;
  d["delta2"] = r.delta2;
  d["marked"] = r.marked;
  d["functional"] = r.functional;
  d["residual"] = r.residual;
  d["constraint_defect"] = r.constraint_defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_safem, m) {
  m.doc() = "Adaptive FEM with separate marking";

  py::class_<Triangulation>(m, "Mesh")
      .def("__len__", &Triangulation::size)
      .def("triangles", &triangles)
      .def("areas",
           [](const Triangulation& T) {
             std::vector<double> a(T.size());
             for (std::size_t k = 0; k < a.size(); ++k) a[k] = T.area(k);
             return to_array(a);
           })
      .def("refine", [](const Triangulation& T, const std::vector<std::size_t>& marked) { return refine(T, marked); },
           py::arg("marked"))
      .def("uniform_refine", &uniform_refine)
      .def("overlay", &overlay, py::arg("other"))
      .def("is_refinement_of", &is_refinement_of, py::arg("coarse"))
      .def("is_conforming", &is_conforming)
      .def("min_angle", &min_angle)
      .def("total_area", &total_area)
      .def("write", [](const Triangulation& T, const std::string& path) { write_mesh(path, T); }, py::arg("path"))
      .def("__eq__", [](const Triangulation& a, const Triangulation& b) { return a == b; });

  m.def("unit_square", &unit_square);
  m.def("l_shape", &l_shape);
  m.def("read_mesh", py::overload_cast<const std::string&>(&read_mesh), py::arg("path"));

  m.def(
      "doerfler_select",
      [](double theta, const std::vector<double>& values) { return doerfler_select(theta, IndicatorField(values)); },
      py::arg("theta"), py::arg("values"));

  m.def(
      "oscillation",
      [](const Triangulation& T, const std::string& field, int degree) {
        return to_array(oscillation(T, parse_field(field), rule_for_degree(degree)).values());
      },
      py::arg("mesh"), py::arg("field"), py::arg("quad_degree") = 5, "Squared oscillation per element.");

  m.def(
      "approx",
      [](double tol, const std::string& field, const Triangulation& T0) { return approx(tol, parse_field(field), T0); },
      py::arg("tol"), py::arg("field"), py::arg("mesh"));

  m.def(
      "solve_mixed",
      [](const Triangulation& T, const std::string& field) {
        const auto sys = assemble_mixed(T, parse_field(field));
        const auto sol = solve_mixed(sys);
        py::dict d;
        d["flux"] = to_array(sol.flux);
        d["u"] = to_array(sol.u);
        d["residual"] = sol.residual;
        d["eta2"] = to_array(eta_mixed(sys.topo, sol).values());
        return d;
      },
      py::arg("mesh"), py::arg("field"));

  m.def(
      "solve_ls",
      [](const Triangulation& T, const std::string& field) {
        const auto sys = assemble_ls(T, parse_field(field));
        const auto sol = solve_ls(sys);
        py::dict d;
        d["flux"] = to_array(sol.flux);
        d["u"] = to_array(sol.u);
        d["residual"] = sol.residual;
        d["ls"] = ls_functional(sys, sol).ls_total;
        d["eta2"] = to_array(eta_ls(sys.topo, sol).values());
        return d;
      },
      py::arg("mesh"), py::arg("field"));

  m.def(
      "run",
      [](const std::string& problem, const std::string& domain, const std::string& field, const std::string& mode,
         double theta_a, double kappa, double rho_b, double sigma_tol, std::size_t max_elements, int quad_degree) {
        ExperimentConfig c;
        c.problem = problem;
        c.domain = domain;
        c.field = field;
        c.mode = mode;
        c.params.theta_a = theta_a;
        c.params.kappa = kappa;
        c.params.rho_b = rho_b;
        c.params.sigma_tol = sigma_tol;
        c.params.max_elements = max_elements;
        c.quad_degree = quad_degree;
        if (mode == "approx-only") throw std::invalid_argument("use approx() for approx-only");
        ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = run_experiment(c);
        }
        py::list recs;
        for (const auto& r : res.run.records) recs.append(record_dict(r));
        py::dict d;
        d["records"] = recs;
        d["stop_reason"] = res.run.stop_reason;
        d["fitted_s"] = res.rate ? res.rate->s : NAN;
        d["final_mesh"] = res.run.final_mesh;
        return d;
      },
      py::arg("problem") = "mixed", py::arg("domain") = "unit-square", py::arg("field") = "one",
      py::arg("mode") = "safem", py::arg("theta_a") = 0.3, py::arg("kappa") = 1.0, py::arg("rho_b") = 0.5,
      py::arg("sigma_tol") = 1e-6, py::arg("max_elements") = 200000, py::arg("quad_degree") = 5);

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<LevelError>(m, "LevelError", PyExc_RuntimeError);
}

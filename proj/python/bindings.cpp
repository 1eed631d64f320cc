#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hybridscat/config_io.hpp"
#include "hybridscat/harness.hpp"
#include "hybridscat/hybrid_solver.hpp"

namespace py = pybind11;
using namespace hybridscat;

namespace
{

// (N, 2) array -> points.
std::vector<Point2> to_points(const py::array_t<double, py::array::c_style | py::array::forcecast> &a)
{
  if (a.ndim() != 2 || a.shape(1) != 2)
  {
    throw std::invalid_argument("points must have shape (N, 2)");
  }
  const auto r = a.unchecked<2>();
  std::vector<Point2> out(static_cast<std::size_t>(r.shape(0)));
  for (py::ssize_t k = 0; k < r.shape(0); ++k)
  {
    out[k] = {r(k, 0), r(k, 1)};
  }
  return out;
}

py::array_t<double> from_points(const std::vector<Point2> &p)
{
  py::array_t<double> a({static_cast<py::ssize_t>(p.size()), py::ssize_t{2}});
  auto w = a.mutable_unchecked<2>();
  for (std::size_t k = 0; k < p.size(); ++k)
  {
    w(k, 0) = p[k].x;
    w(k, 1) = p[k].y;
  }
  return a;
}

Point2 to_point(std::pair<double, double> p) { return {p.first, p.second}; }

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Hybrid volumetric / boundary-integral Helmholtz scattering solver.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<ProblemConfig>(m, "ProblemConfig")
      .def(py::init<>())
      .def_readwrite("kappa", &ProblemConfig::kappa)
      .def_readwrite("alpha", &ProblemConfig::alpha)
      .def_readwrite("beta", &ProblemConfig::beta)
      .def_readwrite("half_width", &ProblemConfig::half_width)
      .def_readwrite("K", &ProblemConfig::K)
      .def_readwrite("L", &ProblemConfig::L)
      .def_readwrite("n1", &ProblemConfig::n1)
      .def_readwrite("n2", &ProblemConfig::n2)
      .def_readwrite("F", &ProblemConfig::F)
      .def_readwrite("cov_order", &ProblemConfig::cov_order)
      .def_readwrite("near_threshold", &ProblemConfig::near_threshold)
      .def_readwrite("gmres_tol", &ProblemConfig::gmres_tol)
      .def_readwrite("gmres_max_iter", &ProblemConfig::gmres_max_iter)
      .def_readwrite("fourier_smoothing", &ProblemConfig::fourier_smoothing)
      .def_readwrite("pad_factor", &ProblemConfig::pad_factor)
      .def_readwrite("interp_degree", &ProblemConfig::interp_degree)
      .def_readwrite("far_oversample", &ProblemConfig::far_oversample)
      .def_readwrite("retain_factorizations", &ProblemConfig::retain_factorizations)
      .def_property_readonly("eta", &ProblemConfig::eta)
      .def_property_readonly("patches_per_side", &ProblemConfig::patches_per_side)
      .def("__repr__", [](const ProblemConfig &c) { return "ProblemConfig(" + canonical(c) + ")"; });

  py::class_<RefractivityModel>(m, "RefractivityModel")
      .def_static("vacuum", &RefractivityModel::vacuum)
      .def_static(
          "constant_disc", [](std::pair<double, double> c, double r, double n2)
          { return RefractivityModel::constant_disc(to_point(c), r, n2); },
          py::arg("center"), py::arg("radius"), py::arg("n2"))
      .def_static(
          "gaussian_disc",
          [](std::pair<double, double> c, double r, double base, double amplitude, double decay)
          { return RefractivityModel::gaussian_disc(to_point(c), r, base, amplitude, decay); },
          py::arg("center"), py::arg("radius"), py::arg("base") = 3.0, py::arg("amplitude") = 2.0,
          py::arg("decay") = 4.0)
      .def_static(
          "square", [](std::pair<double, double> c, double h, double n2)
          { return RefractivityModel::square(to_point(c), h, n2); },
          py::arg("center"), py::arg("half_side"), py::arg("n2"))
      .def_static(
          "four_disc_star", [](std::pair<double, double> c, double s, double n2)
          { return RefractivityModel::four_disc_star(to_point(c), s, n2); },
          py::arg("center"), py::arg("scale"), py::arg("n2"))
      .def("n_squared", [](const RefractivityModel &mdl, double x, double y) { return mdl.n_squared({x, y}); })
      .def_property_readonly("kind", [](const RefractivityModel &mdl) { return to_string(mdl.kind()); })
      .def("canonical", &RefractivityModel::canonical);

  py::class_<special::Incidence>(m, "Incidence")
      .def_static("plane", &special::Incidence::plane, py::arg("angle") = 0.0)
      .def_static(
          "radial", [](std::pair<double, double> o) { return special::Incidence::radial(to_point(o)); },
          py::arg("origin") = std::pair<double, double>{0.0, 0.0})
      .def("value", [](const special::Incidence &inc, double kappa, double x, double y)
           { return inc.value(kappa, {x, y}); });

  py::class_<special::MieReference>(m, "MieReference")
      .def(py::init([](std::pair<double, double> c, double r, double n, double kappa)
                    { return special::MieReference(to_point(c), r, n, kappa); }),
           py::arg("center"), py::arg("radius"), py::arg("n_interior"), py::arg("kappa"))
      .def("total_field",
           [](const special::MieReference &mie, const py::array_t<double> &pts, const special::Incidence &inc)
           {
             const auto p = to_points(pts);
             VectorXc v(p.size());
             for (std::size_t k = 0; k < p.size(); ++k)
             {
               v[k] = mie.total_field(p[k], inc);
             }
             return v;
           });

  py::class_<SolveResult>(m, "SolveResult")
      .def_readonly("converged", &SolveResult::converged)
      .def_readonly("iterations", &SolveResult::iterations)
      .def_readonly("matvecs", &SolveResult::matvecs)
      .def_readonly("residuals", &SolveResult::residuals)
      .def_readonly("phi", &SolveResult::phi)
      .def_readonly("precompute_seconds", &SolveResult::precompute_seconds)
      .def_readonly("solve_seconds", &SolveResult::solve_seconds)
      .def_readonly("seconds_per_iteration", &SolveResult::seconds_per_iteration);

  py::class_<HybridSolver>(m, "HybridSolver")
      .def(py::init<const ProblemConfig &, const RefractivityModel &>(), py::arg("config"), py::arg("model"))
      .def("solve", &HybridSolver::solve, py::arg("incidence"), py::call_guard<py::gil_scoped_release>())
      .def("apply", [](const HybridSolver &s, const VectorXc &phi) { return s.op().apply(phi); })
      .def_property_readonly("size", [](const HybridSolver &s) { return s.op().size(); })
      .def("incident_values", &HybridSolver::incident_values)
      .def("incident_impedance", &HybridSolver::incident_impedance)
      .def("interior_field", &HybridSolver::interior_field)
      .def("interior_nodes", [](const HybridSolver &s) { return from_points(s.interior_nodes()); })
      .def("scattered_field", [](const HybridSolver &s, const VectorXc &phi, const py::array_t<double> &pts)
           { return s.scattered_field(phi, to_points(pts)); })
      .def("field_at", [](const HybridSolver &s, const VectorXc &phi, const py::array_t<double> &pts,
                          const special::Incidence &inc) { return s.field_at(phi, to_points(pts), inc); })
      .def_property_readonly("precompute_seconds", &HybridSolver::precompute_seconds);

  m.def("epsilon_inf", &epsilon_inf, py::arg("exact"), py::arg("approx"));
  m.def(
      "green_identity_error",
      [](double a, int per_side, int order, double kappa)
      {
        bq::QuadratureOptions opt;
        opt.kappa = kappa;
        return bq::green_identity_test(a, per_side, order, opt).max_error;
      },
      py::arg("half_width"), py::arg("patches_per_side"), py::arg("order"), py::arg("kappa"));
  m.def("parse_wavenumber", &parse_wavenumber);
  m.def("validate", [](const ProblemConfig &c, const RefractivityModel &mdl)
        { const auto r = validate(c, mdl); return py::make_tuple(r.ok(), r.summary()); });
  m.def(
      "run",
      [](const std::string &config, const std::string &mode, const std::string &out, std::optional<int> levels)
      {
        harness::RunManifest mf;
        mf.config = config;
        mf.mode = harness::mode_from_string(mode);
        mf.out_dir = out;
        mf.levels = levels;
        py::gil_scoped_release release;
        return harness::run(mf);
      },
      py::arg("config"), py::arg("mode"), py::arg("out"), py::arg("levels") = std::nullopt,
      "Runs the command-line workflow; returns its exit code.");
  m.attr("pi") = pi;
}

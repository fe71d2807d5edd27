#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dewet2d/harness.hpp"

namespace py = pybind11;
using namespace dewet;

namespace {

py::array_t<double> nodes_array(const PolygonalCurve& c) {
  py::array_t<double> out({static_cast<py::ssize_t>(c.nodes.size()),
                           static_cast<py::ssize_t>(2)});
  auto r = out.mutable_unchecked<2>();
  for (py::ssize_t j = 0; j < r.shape(0); ++j) {
    r(j, 0) = c.nodes[j].x();
    r(j, 1) = c.nodes[j].y();
  }
  return out;
}

PolygonalCurve curve_from_array(const py::array_t<double>& arr) {
  const auto r = arr.unchecked<2>();
  if (r.shape(1) != 2) {
    throw py::value_error("node array must have shape (N+1, 2)");
  }
  std::vector<Vec2> pts(r.shape(0));
  for (py::ssize_t j = 0; j < r.shape(0); ++j) {
    pts[j] = Vec2(r(j, 0), r(j, 1));
  }
  PolygonalCurve c(std::move(pts));
  c.validate();
  return c;
}

ShapeSpec shape_from_name(const std::string& name, double a, double b,
                          double theta, double area, const std::string& path) {
  if (name == "semi-ellipse") {
    return ShapeSpec::semi_ellipse(a, b);
  }
  if (name == "flower") {
    return ShapeSpec::flower();
  }
  if (name == "wulff") {
    return ShapeSpec::wulff(theta, area);
  }
  if (name == "file") {
    return ShapeSpec::file(path);
  }
  throw py::value_error("unknown shape '" + name + "'");
}

py::dict report_dict(const ConvergenceReport& rep) {
  py::dict d;
  d["kind"] = rep.kind;
  if (rep.time >= 0.0) {
    d["time"] = rep.time;
  } else {
    d["time"] = py::str("equilibrium");
  }
  py::list rows;
  for (const ConvergenceRow& r : rep.rows) {
    py::dict row;
    row["tau"] = r.tau;
    row["h"] = r.h;
    row["error"] = r.error;
    if (std::isnan(r.order)) {
      row["order"] = py::none();
    } else {
      row["order"] = r.order;
    }
    rows.append(row);
  }
  d["rows"] = rows;
  return d;
}

StudySpec build_study(const std::string& scheme, const std::string& shape,
                      double a, double b, double theta, double eta,
                      double path_c, double path_alpha, double tau0,
                      int levels, std::vector<double> tau_targets,
                      std::vector<double> times, double epsilon,
                      long max_steps, int wulff_reference_n,
                      double target_area, std::vector<int> mesh_levels,
                      double fixed_tau) {
  StudySpec spec;
  spec.scheme = parse_scheme(scheme);
  spec.shape = shape_from_name(shape, a, b, theta, -1.0, "");
  spec.theta = theta;
  spec.eta = eta;
  spec.path_c = path_c;
  spec.path_alpha = path_alpha;
  spec.tau0 = tau0;
  spec.levels = levels;
  spec.tau_targets = std::move(tau_targets);
  spec.times = std::move(times);
  spec.epsilon = epsilon;
  spec.max_steps = max_steps;
  spec.wulff_reference_n = wulff_reference_n;
  spec.target_area = target_area;
  spec.mesh_levels = std::move(mesh_levels);
  spec.fixed_tau = fixed_tau;
  return spec;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Parametric finite element simulation of 2D solid-state "
            "dewetting: backward Euler, predictor-corrector, and BDF "
            "time steppers with geometry diagnostics and convergence "
            "studies.";

  py::register_exception<Error>(m, "DewetError");

  py::class_<PolygonalCurve>(m, "Curve")
      .def(py::init(&curve_from_array), py::arg("nodes"))
      .def_property_readonly("nodes", &nodes_array)
      .def_property_readonly("segments", &PolygonalCurve::segments)
      .def("area", &enclosed_area)
      .def("energy", &discrete_energy, py::arg("sigma"))
      .def("mesh_ratio", &mesh_ratio)
      .def("contact_angles",
           [](const PolygonalCurve& c) { return contact_angles(c); })
      .def("total_length", &total_length)
      .def("__repr__", [](const PolygonalCurve& c) {
        return "<Curve with " + std::to_string(c.segments()) + " segments>";
      });

  m.def(
      "make_shape",
      [](const std::string& name, double a, double b, double theta,
         double area, const std::string& path, int n) {
        return from_shape(shape_from_name(name, a, b, theta, area, path), n);
      },
      py::arg("name"), py::arg("a") = 2.0, py::arg("b") = 1.0,
      py::arg("theta") = 0.0, py::arg("area") = 1.0, py::arg("path") = "",
      py::arg("n") = 128);

  m.def("wulff_shape", &wulff_shape, py::arg("area"), py::arg("theta"),
        py::arg("n"));
  m.def("manifold_distance",
        py::overload_cast<const PolygonalCurve&, const PolygonalCurve&>(
            &manifold_distance),
        py::arg("curve1"), py::arg("curve2"));
  m.def("convergence_orders", &convergence_orders, py::arg("errors"),
        py::arg("scales"));
  m.def("initial_curvature", &initial_curvature, py::arg("curve"));

  py::class_<SchemeParams>(m, "SchemeParams")
      .def_readonly("tau", &SchemeParams::tau)
      .def_readonly("eta", &SchemeParams::eta)
      .def_readonly("sigma", &SchemeParams::sigma)
      .def_readonly("theta_young", &SchemeParams::theta_young);
  m.def("make_params", &make_params, py::arg("tau"), py::arg("eta"),
        py::arg("theta_young"));

  m.def(
      "step",
      [](const PolygonalCurve& curve, const std::string& scheme,
         const SchemeParams& params, py::object kappa) {
        const Scheme s = parse_scheme(scheme);
        StepResult r;
        if (s == Scheme::Zjb) {
          r = zjb_step(curve, params);
        } else if (s == Scheme::Pc) {
          NodalField k = kappa.is_none() ? initial_curvature(curve)
                                         : kappa.cast<NodalField>();
          r = pc_step(curve, k, params);
        } else {
          throw py::value_error(
              "BDF stepping needs history; use evolve() instead");
        }
        return py::make_tuple(r.curve, r.kappa);
      },
      py::arg("curve"), py::arg("scheme"), py::arg("params"),
      py::arg("kappa") = py::none(),
      "One time step; returns (curve, kappa).");

  py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
      .def_readonly("t", &TrajectoryPoint::t)
      .def_readonly("energy", &TrajectoryPoint::energy)
      .def_readonly("area", &TrajectoryPoint::area)
      .def_readonly("area_loss", &TrajectoryPoint::area_loss)
      .def_readonly("mesh_ratio", &TrajectoryPoint::mesh_ratio)
      .def_readonly("theta_left", &TrajectoryPoint::theta_left)
      .def_readonly("theta_right", &TrajectoryPoint::theta_right);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("rows", &TrajectoryRecord::rows)
      .def_readonly("energy_series", &TrajectoryRecord::energy_series)
      .def_readonly("area_series", &TrajectoryRecord::area_series)
      .def_readonly("final_curve", &TrajectoryRecord::final_curve)
      .def_readonly("steps", &TrajectoryRecord::steps)
      .def_readonly("tau", &TrajectoryRecord::tau)
      .def_readonly("reached_equilibrium",
                    &TrajectoryRecord::reached_equilibrium)
      .def_readonly("stationary_residual",
                    &TrajectoryRecord::stationary_residual)
      .def("max_energy_rise", &TrajectoryRecord::max_energy_rise,
           py::arg("skip") = 0);

  m.def(
      "evolve",
      [](const PolygonalCurve& curve, const std::string& scheme,
         const SchemeParams& params, double T, int stride) {
        return evolve(curve, parse_scheme(scheme), params, T, stride);
      },
      py::arg("curve"), py::arg("scheme"), py::arg("params"), py::arg("T"),
      py::arg("stride") = 1);

  m.def(
      "evolve_to_equilibrium",
      [](const PolygonalCurve& curve, const std::string& scheme,
         const SchemeParams& params, double epsilon, long max_steps) {
        return evolve_to_equilibrium(curve, parse_scheme(scheme), params,
                                     epsilon, max_steps, 1 << 20);
      },
      py::arg("curve"), py::arg("scheme"), py::arg("params"),
      py::arg("epsilon") = 1e-12, py::arg("max_steps") = 10'000'000L);

  m.def(
      "cauchy_study",
      [](const std::string& scheme, const std::string& shape, double a,
         double b, double theta, double eta, double path_c, double path_alpha,
         double tau0, int levels, std::vector<double> times) {
        StudySpec spec = build_study(scheme, shape, a, b, theta, eta, path_c,
                                     path_alpha, tau0, levels, {},
                                     std::move(times), 1e-12, 10'000'000L,
                                     8192, -1.0, {}, 0.01);
        py::list out;
        for (const ConvergenceReport& rep : cauchy_study(spec)) {
          out.append(report_dict(rep));
        }
        return out;
      },
      py::arg("scheme"), py::arg("shape"), py::arg("a"), py::arg("b"),
      py::arg("theta"), py::arg("eta"), py::arg("path_c"),
      py::arg("path_alpha"), py::arg("tau0"), py::arg("levels"),
      py::arg("times"));

  m.def(
      "wulff_study",
      [](const std::string& scheme, const std::string& shape, double a,
         double b, double theta, double eta, double path_c, double path_alpha,
         std::vector<double> tau_targets, double epsilon, int reference_n) {
        StudySpec spec = build_study(scheme, shape, a, b, theta, eta, path_c,
                                     path_alpha, 1.0 / 400, 0,
                                     std::move(tau_targets), {}, epsilon,
                                     10'000'000L, reference_n, -1.0, {}, 0.01);
        return report_dict(wulff_study(spec));
      },
      py::arg("scheme"), py::arg("shape"), py::arg("a"), py::arg("b"),
      py::arg("theta"), py::arg("eta"), py::arg("path_c"),
      py::arg("path_alpha"), py::arg("tau_targets"),
      py::arg("epsilon") = 1e-12, py::arg("reference_n") = 8192);

  m.def(
      "angle_study",
      [](const std::string& scheme, const std::string& shape, double a,
         double b, double theta, double eta, std::vector<int> mesh_levels,
         double fixed_tau, double epsilon) {
        StudySpec spec = build_study(scheme, shape, a, b, theta, eta, 0.05,
                                     1.0, 1.0 / 400, 0, {}, {}, epsilon,
                                     10'000'000L, 8192, -1.0,
                                     std::move(mesh_levels), fixed_tau);
        return report_dict(angle_convergence_study(spec));
      },
      py::arg("scheme"), py::arg("shape"), py::arg("a"), py::arg("b"),
      py::arg("theta"), py::arg("eta"), py::arg("mesh_levels"),
      py::arg("fixed_tau") = 0.01, py::arg("epsilon") = 1e-12);
}

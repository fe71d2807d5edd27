#include "dewet2d/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace dewet {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

TrajectoryPoint make_point(double t, const PolygonalCurve& curve,
                           double sigma, double area0) {
  const Diagnostics d = diagnostics(curve, sigma);
  TrajectoryPoint p;
  p.t = t;
  p.energy = d.energy;
  p.area = d.area;
  p.area_loss = (d.area - area0) / area0;
  p.mesh_ratio = d.mesh_ratio;
  p.theta_left = d.theta_left;
  p.theta_right = d.theta_right;
  return p;
}

/// Shared stepping loop.  `stop` sees (step index m, W^{m-1}, W^m) after each
/// step has been accepted and returns true to finish the run.
TrajectoryRecord run_trajectory(
    const PolygonalCurve& curve0, Scheme scheme, const SchemeParams& params,
    long max_steps, int stride, const SnapshotSink& sink,
    const std::function<bool(long, double, double)>& stop) {
  curve0.validate(3);
  if (stride < 1) {
    throw ConfigError("snapshot stride must be >= 1");
  }
  TrajectoryRecord rec;
  rec.tau = params.tau;
  rec.stride = stride;

  const double area0 = enclosed_area(curve0);
  rec.energy_series.push_back(discrete_energy(curve0, params.sigma));
  rec.area_series.push_back(area0);
  rec.rows.push_back(make_point(0.0, curve0, params.sigma, area0));
  if (sink) {
    sink(0, curve0);
  }

  const int k = scheme_order(scheme);
  PolygonalCurve current = curve0;
  NodalField kappa;
  CurveHistory hist(std::max(2, k));
  bool done = false;
  long m = 0;

  auto accept_step = [&](long step, const PolygonalCurve& c) {
    rec.energy_series.push_back(discrete_energy(c, params.sigma));
    rec.area_series.push_back(enclosed_area(c));
    rec.steps = step;
    if (stop(step, rec.energy_series[step - 1], rec.energy_series[step]) ||
        step == max_steps) {
      done = true;
    }
    if (step % stride == 0 || done) {
      rec.rows.push_back(make_point(step * params.tau, c, params.sigma, area0));
      if (sink) {
        sink(step, c);
      }
    }
  };

  try {
    if (scheme == Scheme::Pc && max_steps >= 1) {
      kappa = initial_curvature(current);
    } else if (k >= 2 && scheme != Scheme::Pc && max_steps >= 1) {
      // Multistep start-up; the levels count as ordinary steps.
      const int k_eff =
          static_cast<int>(std::min<long>(k, std::max<long>(2, max_steps + 1)));
      hist = bootstrap(current, k_eff, params);
      for (int p = hist.depth() - 2; p >= 0 && !done; --p) {
        ++m;
        current = hist.curve(p);
        kappa = hist.kappa(p);
        accept_step(m, current);
      }
    }

    while (!done && m < max_steps) {
      StepResult r;
      switch (scheme) {
      case Scheme::Zjb:
        r = zjb_step(current, params);
        break;
      case Scheme::Pc:
        r = pc_step(current, kappa, params);
        break;
      default:
        r = bdf_step(hist, k, params);
        break;
      }
      current = std::move(r.curve);
      kappa = std::move(r.kappa);
      if (k >= 2 && scheme != Scheme::Pc) {
        hist.push(current, kappa);
      }
      ++m;
      accept_step(m, current);
    }
  } catch (const Error& e) {
    throw StepError("step " + std::to_string(m + 1) + " (" +
                    scheme_name(scheme) + ", t=" +
                    std::to_string((m + 1) * params.tau) + "): " + e.what());
  }

  rec.final_curve = std::move(current);
  if (kappa.size() == 0 && well_posedness_check(rec.final_curve)) {
    kappa = initial_curvature(rec.final_curve);
  }
  rec.final_kappa = std::move(kappa);
  return rec;
}

} // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "zjb") {
    return Scheme::Zjb;
  }
  if (name == "pc") {
    return Scheme::Pc;
  }
  if (name == "bdf2") {
    return Scheme::Bdf2;
  }
  if (name == "bdf3") {
    return Scheme::Bdf3;
  }
  if (name == "bdf4") {
    return Scheme::Bdf4;
  }
  throw ConfigError("unknown scheme '" + name +
                    "' (expected zjb, pc, bdf2, bdf3, or bdf4)");
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
  case Scheme::Zjb:
    return "zjb";
  case Scheme::Pc:
    return "pc";
  case Scheme::Bdf2:
    return "bdf2";
  case Scheme::Bdf3:
    return "bdf3";
  case Scheme::Bdf4:
    return "bdf4";
  }
  return "?";
}

int scheme_order(Scheme scheme) {
  switch (scheme) {
  case Scheme::Zjb:
    return 1;
  case Scheme::Pc:
    return 2;
  case Scheme::Bdf2:
    return 2;
  case Scheme::Bdf3:
    return 3;
  case Scheme::Bdf4:
    return 4;
  }
  return 1;
}

double TrajectoryRecord::max_energy_rise(long skip) const {
  double rise = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < energy_series.size(); ++i) {
    if (static_cast<long>(i) <= skip) {
      continue;
    }
    rise = std::max(rise, energy_series[i] - energy_series[i - 1]);
  }
  return rise;
}

void TrajectoryRecord::write_diagnostics_csv(std::ostream& out) const {
  out << "t,W,A,dA_rel,Psi,theta_l,theta_r\n";
  char buf[200];
  for (const TrajectoryPoint& p : rows) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", p.t, p.energy,
                  p.area, p.area_loss, p.mesh_ratio, p.theta_left,
                  p.theta_right);
    out << buf;
  }
}

void TrajectoryRecord::write_diagnostics_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_diagnostics_csv(out);
}

TrajectoryRecord evolve(const PolygonalCurve& curve0, Scheme scheme,
                        const SchemeParams& params, double T, int stride,
                        const SnapshotSink& sink) {
  if (T < 0.0) {
    throw ConfigError("final time must be nonnegative");
  }
  const long steps = std::llround(T / params.tau);
  auto never = [](long, double, double) { return false; };
  return run_trajectory(curve0, scheme, params, steps, stride, sink, never);
}

TrajectoryRecord evolve_to_equilibrium(const PolygonalCurve& curve0,
                                       Scheme scheme,
                                       const SchemeParams& params,
                                       double epsilon, long max_steps,
                                       int stride, const SnapshotSink& sink) {
  if (!(epsilon > 0.0)) {
    throw ConfigError("equilibrium tolerance must be positive");
  }
  bool reached = false;
  auto stop = [&](long, double w_prev, double w_next) {
    if ((w_prev - w_next) / params.tau <= epsilon) {
      reached = true;
      return true;
    }
    return false;
  };
  TrajectoryRecord rec = run_trajectory(curve0, scheme, params, max_steps,
                                        stride, sink, stop);
  if (!reached) {
    throw StepError("equilibrium not reached within " +
                    std::to_string(max_steps) + " steps");
  }
  rec.reached_equilibrium = true;
  // Measure stationarity with the implicit curvature of the final curve; the
  // trapezoidal scheme's own kappa iterate keeps a bounded parasitic zigzag
  // that never represents the equilibrium curvature.
  const NodalField kappa_implicit = zjb_step(rec.final_curve, params).kappa;
  rec.stationary_residual =
      equilibrium_residual(rec.final_curve, kappa_implicit, params.sigma);
  return rec;
}

std::vector<StudyLevel> resolve_levels(const StudySpec& spec) {
  std::vector<double> targets = spec.tau_targets;
  if (targets.empty()) {
    if (spec.levels < 1) {
      throw ConfigError("study needs at least one level");
    }
    targets.resize(spec.levels);
    for (int i = 0; i < spec.levels; ++i) {
      targets[i] = spec.tau0 / std::pow(2.0, i);
    }
  }
  if (!(spec.path_c > 0.0) || !(spec.path_alpha > 0.0)) {
    throw ConfigError("path constants must be positive");
  }
  std::vector<StudyLevel> levels;
  levels.reserve(targets.size());
  for (double tau_t : targets) {
    if (!(tau_t > 0.0)) {
      throw ConfigError("path time steps must be positive");
    }
    const double h_raw = std::pow(tau_t / spec.path_c, 1.0 / spec.path_alpha);
    const int n = std::max<long>(3, std::llround(1.0 / h_raw));
    const double h = 1.0 / n;
    const double tau = spec.path_c * std::pow(h, spec.path_alpha);
    levels.push_back({n, h, tau});
  }
  return levels;
}

std::vector<ConvergenceReport> cauchy_study(const StudySpec& spec) {
  if (spec.times.empty()) {
    throw ConfigError("Cauchy study needs at least one sampling time");
  }
  std::vector<StudyLevel> levels = resolve_levels(spec);
  if (levels.size() < 2) {
    throw ConfigError("Cauchy study needs at least two levels");
  }
  const double t_base = *std::min_element(spec.times.begin(), spec.times.end());
  const double t_max = *std::max_element(spec.times.begin(), spec.times.end());
  for (double t : spec.times) {
    if (std::abs(t / t_base - std::llround(t / t_base)) > 1e-9) {
      throw ConfigError("Cauchy sampling times must be multiples of the "
                        "smallest one");
    }
  }
  // Snap each level's time step to an exact divisor of the base time so all
  // levels sample the very same instants; the path is preserved to O(tau/m).
  for (StudyLevel& lv : levels) {
    const long m = std::max<long>(1, std::llround(t_base / lv.tau));
    lv.tau = t_base / m;
  }

  const SchemeParams base = make_params(1.0, spec.eta, spec.theta);
  // curves[level][time index]
  std::vector<std::vector<PolygonalCurve>> curves(levels.size());
  for (std::size_t ell = 0; ell < levels.size(); ++ell) {
    const StudyLevel& lv = levels[ell];
    const SchemeParams params = base.with_tau(lv.tau);
    std::vector<long> want;
    want.reserve(spec.times.size());
    for (double t : spec.times) {
      want.push_back(std::llround(t / lv.tau));
    }
    curves[ell].resize(spec.times.size());
    auto sink = [&](long step, const PolygonalCurve& c) {
      for (std::size_t q = 0; q < want.size(); ++q) {
        if (step == want[q]) {
          curves[ell][q] = c;
        }
      }
    };
    evolve(from_shape(spec.shape, lv.n), spec.scheme, params, t_max,
           /*stride=*/1, sink);
  }

  std::vector<ConvergenceReport> reports;
  for (std::size_t q = 0; q < spec.times.size(); ++q) {
    ConvergenceReport rep;
    rep.kind = "cauchy";
    rep.time = spec.times[q];
    std::vector<double> errors;
    std::vector<double> taus;
    for (std::size_t ell = 0; ell + 1 < levels.size(); ++ell) {
      errors.push_back(manifold_distance(curves[ell][q], curves[ell + 1][q]));
      taus.push_back(levels[ell].tau);
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
      ConvergenceRow row;
      row.tau = levels[i].tau;
      row.h = levels[i].h;
      row.error = errors[i];
      row.order = kNan;
      if (i > 0 && errors[i] > 0.0 && errors[i - 1] > 0.0) {
        row.order = std::log(errors[i - 1] / errors[i]) /
                    std::log(levels[i - 1].tau / levels[i].tau);
      }
      rep.rows.push_back(row);
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

ConvergenceReport wulff_study(const StudySpec& spec) {
  std::vector<StudyLevel> levels = resolve_levels(spec);
  double area = spec.target_area;
  if (area <= 0.0) {
    area = spec.shape.analytic_area();
  }
  if (area <= 0.0) {
    area = enclosed_area(from_shape(spec.shape, levels.back().n));
  }
  const PolygonalCurve target =
      wulff_shape(area, spec.theta, std::max(spec.wulff_reference_n, 3));
  const Region target_region = region_of(target);

  const SchemeParams base = make_params(1.0, spec.eta, spec.theta);
  ConvergenceReport rep;
  rep.kind = "wulff";
  rep.time = -1.0;
  std::vector<double> errors;
  for (const StudyLevel& lv : levels) {
    TrajectoryRecord rec = evolve_to_equilibrium(
        from_shape(spec.shape, lv.n), spec.scheme, base.with_tau(lv.tau),
        spec.epsilon, spec.max_steps, /*stride=*/1 << 20);
    errors.push_back(
        manifold_distance(region_of(rec.final_curve), target_region));
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    ConvergenceRow row;
    row.tau = levels[i].tau;
    row.h = levels[i].h;
    row.error = errors[i];
    row.order = kNan;
    if (i > 0 && errors[i] > 0.0 && errors[i - 1] > 0.0) {
      row.order = std::log(errors[i - 1] / errors[i]) /
                  std::log(levels[i - 1].tau / levels[i].tau);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

ConvergenceReport angle_convergence_study(const StudySpec& spec) {
  if (spec.mesh_levels.size() < 2) {
    throw ConfigError("angle study needs at least two mesh levels");
  }
  const SchemeParams params =
      make_params(spec.fixed_tau, spec.eta, spec.theta);
  ConvergenceReport rep;
  rep.kind = "angles";
  rep.time = -1.0;
  std::vector<double> errors;
  std::vector<double> hs;
  for (int n : spec.mesh_levels) {
    TrajectoryRecord rec = evolve_to_equilibrium(
        from_shape(spec.shape, n), spec.scheme, params, spec.epsilon,
        spec.max_steps, /*stride=*/1 << 20);
    const auto [theta_l, theta_r] = contact_angles(rec.final_curve);
    (void)theta_r;
    errors.push_back(std::abs(std::cos(theta_l) - params.sigma));
    hs.push_back(1.0 / n);
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    ConvergenceRow row;
    row.tau = spec.fixed_tau;
    row.h = hs[i];
    row.error = errors[i];
    row.order = kNan;
    if (i > 0 && errors[i] > 0.0 && errors[i - 1] > 0.0) {
      row.order = std::log(errors[i - 1] / errors[i]) /
                  std::log(hs[i - 1] / hs[i]);
    }
    rep.rows.push_back(row);
  }
  return rep;
}

} // namespace dewet

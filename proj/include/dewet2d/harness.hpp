#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dewet2d/metrics.hpp"
#include "dewet2d/schemes.hpp"

namespace dewet {

enum class Scheme { Zjb, Pc, Bdf2, Bdf3, Bdf4 };

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);
/// 1 for the backward Euler scheme, 2 for PC, k for BDFk.
int scheme_order(Scheme scheme);

/// One sampled diagnostics row of a trajectory.
struct TrajectoryPoint {
  double t;
  double energy;      // W^m
  double area;        // A^m
  double area_loss;   // (A^m - A^0) / A^0
  double mesh_ratio;  // Psi^m
  double theta_left;  // radians
  double theta_right; // radians
};

/// Full result of one trajectory.  `rows` follows the snapshot stride (plus
/// the first and final step); the per-step energy/area series are always
/// dense so stability checks never depend on the stride.
struct TrajectoryRecord {
  std::vector<TrajectoryPoint> rows;
  std::vector<double> energy_series; // W^0 .. W^M, every step
  std::vector<double> area_series;   // A^0 .. A^M
  PolygonalCurve final_curve;
  NodalField final_kappa;
  long steps = 0;
  double tau = 0.0;
  int stride = 1;
  bool reached_equilibrium = false;
  double stationary_residual = -1.0; // filled for equilibrium runs

  /// Largest single-step energy increase over steps with index > skip.
  double max_energy_rise(long skip = 0) const;
  void write_diagnostics_csv(std::ostream& out) const;
  void write_diagnostics_csv(const std::string& path) const;
};

/// Called after every recorded step (stride cadence plus first/final) so
/// callers can write curve snapshots without retaining every curve.
using SnapshotSink = std::function<void(long step, const PolygonalCurve&)>;

/// Runs exactly round(T/tau) steps of `scheme` from `curve0` (T is snapped to
/// the nearest step multiple; BDF start-up levels count as steps).
TrajectoryRecord evolve(const PolygonalCurve& curve0, Scheme scheme,
                        const SchemeParams& params, double T, int stride = 1,
                        const SnapshotSink& sink = nullptr);

/// Steps until the energy decrease rate satisfies
/// (W^m - W^{m+1}) / tau <= epsilon, then reports the equilibrium curve, the
/// full record, and the stationary-system residual.
TrajectoryRecord evolve_to_equilibrium(const PolygonalCurve& curve0,
                                       Scheme scheme,
                                       const SchemeParams& params,
                                       double epsilon = 1e-12,
                                       long max_steps = 10'000'000,
                                       int stride = 1,
                                       const SnapshotSink& sink = nullptr);

/// Configuration of a refinement study.
struct StudySpec {
  Scheme scheme = Scheme::Pc;
  ShapeSpec shape = ShapeSpec::semi_ellipse(2.0, 1.0);
  double theta = 0.0;      // Young angle, radians
  double eta = 100.0;
  double path_c = 0.05;    // tau = path_c * h^path_alpha
  double path_alpha = 1.0;
  double tau0 = 1.0 / 400; // coarsest target time step
  int levels = 4;          // used when tau_targets is empty
  std::vector<double> tau_targets; // explicit per-level time steps (optional)
  std::vector<double> times;       // Cauchy sampling times
  double epsilon = 1e-12;          // equilibrium stopping tolerance
  long max_steps = 10'000'000;
  int wulff_reference_n = 8192;    // target polygon resolution
  double target_area = -1.0;       // < 0: analytic shape area
  std::vector<int> mesh_levels;    // angle study: N list
  double fixed_tau = 0.01;         // angle study time step
};

/// One refinement level resolved against the study path: integer N, its mesh
/// size, and the (possibly snapped) time step actually used.
struct StudyLevel {
  int n;
  double h;
  double tau;
};
std::vector<StudyLevel> resolve_levels(const StudySpec& spec);

/// Temporal Cauchy test: consecutive refinement levels are compared in
/// manifold distance at every requested time.  Returns one report per time.
std::vector<ConvergenceReport> cauchy_study(const StudySpec& spec);

/// Equilibrium-versus-analytic-shape study along the path.
ConvergenceReport wulff_study(const StudySpec& spec);

/// Equilibrium contact-angle error |cos(theta_e^l) - sigma| under mesh
/// refinement at fixed time step.
ConvergenceReport angle_convergence_study(const StudySpec& spec);

} // namespace dewet

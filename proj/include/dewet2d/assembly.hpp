#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <vector>

#include "dewet2d/curve.hpp"

namespace dewet {

/// Physical / numerical constants of a run.  sigma is always cos(theta_young);
/// use `make_params` so the two stay consistent.
struct SchemeParams {
  double tau;         // time step, > 0
  double eta;         // contact-line mobility, > 0
  double sigma;       // cos(theta_young), in [-1, 1]
  double theta_young; // Young angle, radians in (0, pi)

  SchemeParams with_tau(double new_tau) const {
    SchemeParams p = *this;
    p.tau = new_tau;
    return p;
  }
};

SchemeParams make_params(double tau, double eta, double theta_young);

/// How the curvature unknown enters the one-step system: fully implicit
/// (backward Euler / BDF correctors) or trapezoidal with the known kappa^m
/// contribution moved to the right-hand side (predictor-corrector).
enum class KappaMode { Implicit, Trapezoidal };

/// Everything `assemble` needs for one semi-implicit solve.
///
/// `reference` is the curve carrying normals and inner products (Gamma^m for
/// the backward Euler scheme, the predicted half-step curve for PC, the
/// predicted next curve for BDFk).  `xhat` holds the extrapolated node data
/// whose endpoints double as the contact extrapolants.  In trapezoidal mode
/// `prev_curve`/`prev_kappa` carry X^m and kappa^m for the averaged terms.
struct StepDescriptor {
  PolygonalCurve reference;
  double a_coeff = 1.0;
  std::vector<Vec2> xhat;
  KappaMode kappa_mode = KappaMode::Implicit;
  std::optional<PolygonalCurve> prev_curve;
  std::optional<NodalField> prev_kappa;
  SchemeParams params;
};

/// One assembled sparse system of dimension 3N+1.  Unknown ordering:
/// kappa_0..kappa_N, x_0..x_N, y_1..y_{N-1} (endpoint y eliminated).
struct StepSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  int n_segments = 0;
};

/// Solution of a step system reshaped into domain types.
struct StepSolution {
  NodalField kappa;
  PolygonalCurve curve;
};

/// <d_s f, d_s g> over the reference polygon:
/// sum_j (f_j - f_{j-1}) (g_j - g_{j-1}) / |h_j|.
double stiffness_apply(const PolygonalCurve& reference, const NodalField& f,
                       const NodalField& g);

/// Mass-lumped inner product of two continuous nodal scalar fields:
/// 1/2 sum_j |h_j| (u_j v_j + u_{j-1} v_{j-1}).
double lumped_inner(const PolygonalCurve& reference, const NodalField& u,
                    const NodalField& v);

/// Mass-lumped inner product of the per-segment unit normal against a nodal
/// vector field; the segment value is used at both segment ends.
double lumped_normal_inner(const PolygonalCurve& reference,
                           const std::vector<Vec2>& v);

/// Lumped nodal normal weights nu_i = (|h_i| n_i + |h_{i+1}| n_{i+1}) / 2
/// (one-sided at the contacts).  These are the coefficients the lumped terms
/// reduce to when tested with the hat basis.
std::vector<Vec2> lumped_normals(const PolygonalCurve& reference);

/// Theorem conditions for unique solvability on this reference curve: the
/// end-segment normals are not both substrate-parallel, and no segment is
/// degenerate (both with strict tolerance 1e-14).
bool well_posedness_check(const PolygonalCurve& reference);

StepSystem assemble(const StepDescriptor& desc);

/// Direct sparse LU solve; verifies ||Ax - b||_inf <= 1e-10 (1 + ||b||_inf)
/// and re-pins the contact y-values of the returned curve to exactly 0.
StepSolution solve(const StepSystem& system);

/// Debug dump: Matrix Market coordinate file plus plain-text rhs vector,
/// written to `<path_prefix>.mtx` and `<path_prefix>.rhs.txt`.
void dump_system(const StepSystem& system, const std::string& path_prefix);

} // namespace dewet

#include "dewet2d/assembly.hpp"

#include <Eigen/SparseLU>
#include <map>
#include <memory>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dewet {

namespace {

constexpr double kWellPosedTol = 1e-14;

std::vector<double> segment_lengths(const PolygonalCurve& c) {
  std::vector<double> len(c.segments());
  for (int j = 1; j <= c.segments(); ++j) {
    len[j - 1] = (c.nodes[j] - c.nodes[j - 1]).norm();
    if (len[j - 1] <= 0.0) {
      throw DegenerateMeshError("segment " + std::to_string(j) +
                                " of the reference curve is degenerate");
    }
  }
  return len;
}

} // namespace

SchemeParams make_params(double tau, double eta, double theta_young) {
  if (!(tau > 0.0)) {
    throw ConfigError("time step must be positive");
  }
  if (!(eta > 0.0)) {
    throw ConfigError("contact-line mobility must be positive");
  }
  if (!(theta_young > 0.0 && theta_young < 3.14159265358979323846)) {
    throw ConfigError("Young angle must lie in (0, pi)");
  }
  SchemeParams p;
  p.tau = tau;
  p.eta = eta;
  p.theta_young = theta_young;
  p.sigma = std::cos(theta_young);
  return p;
}

double stiffness_apply(const PolygonalCurve& reference, const NodalField& f,
                       const NodalField& g) {
  const int n = reference.segments();
  if (f.size() != n + 1 || g.size() != n + 1) {
    throw InvalidCurveError("nodal field size does not match curve");
  }
  const std::vector<double> len = segment_lengths(reference);
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    acc += (f[j] - f[j - 1]) * (g[j] - g[j - 1]) / len[j - 1];
  }
  return acc;
}

double lumped_inner(const PolygonalCurve& reference, const NodalField& u,
                    const NodalField& v) {
  const int n = reference.segments();
  if (u.size() != n + 1 || v.size() != n + 1) {
    throw InvalidCurveError("nodal field size does not match curve");
  }
  const std::vector<double> len = segment_lengths(reference);
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    acc += 0.5 * len[j - 1] * (u[j] * v[j] + u[j - 1] * v[j - 1]);
  }
  return acc;
}

double lumped_normal_inner(const PolygonalCurve& reference,
                           const std::vector<Vec2>& v) {
  const int n = reference.segments();
  if (static_cast<int>(v.size()) != n + 1) {
    throw InvalidCurveError("nodal field size does not match curve");
  }
  const std::vector<SegmentData> seg = segment_data(reference);
  double acc = 0.0;
  for (int j = 1; j <= n; ++j) {
    // The normal is piecewise constant, so the one-sided limits at both ends
    // of segment j use the same n_j.
    acc += 0.5 * seg[j - 1].length *
           (seg[j - 1].normal.dot(v[j]) + seg[j - 1].normal.dot(v[j - 1]));
  }
  return acc;
}

std::vector<Vec2> lumped_normals(const PolygonalCurve& reference) {
  const int n = reference.segments();
  std::vector<Vec2> nu(n + 1);
  // |h_j| n_j is the rotated segment (-dy, dx), so the weights reduce to
  // half the rotated chord through the node's neighbours.
  for (int i = 0; i <= n; ++i) {
    Vec2 acc = Vec2::Zero();
    if (i >= 1) {
      const Vec2 h = reference.nodes[i] - reference.nodes[i - 1];
      acc += Vec2(-h.y(), h.x());
    }
    if (i < n) {
      const Vec2 h = reference.nodes[i + 1] - reference.nodes[i];
      acc += Vec2(-h.y(), h.x());
    }
    nu[i] = 0.5 * acc;
  }
  return nu;
}

bool well_posedness_check(const PolygonalCurve& reference) {
  const int n = reference.segments();
  if (n < 3) {
    return false;
  }
  double lmin = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= n; ++j) {
    lmin = std::min(lmin, (reference.nodes[j] - reference.nodes[j - 1]).norm());
  }
  if (!(lmin > kWellPosedTol)) {
    return false;
  }
  const Vec2 h1 = reference.nodes[1] - reference.nodes[0];
  const Vec2 hn = reference.nodes[n] - reference.nodes[n - 1];
  const double n1x = -h1.y() / h1.norm();
  const double nnx = -hn.y() / hn.norm();
  return n1x * n1x + nnx * nnx > kWellPosedTol;
}

StepSystem assemble(const StepDescriptor& desc) {
  const PolygonalCurve& ref = desc.reference;
  ref.validate(3);
  const int n = ref.segments();
  if (!well_posedness_check(ref)) {
    throw WellPosednessError(
        "reference curve fails the well-posedness conditions; refusing to "
        "assemble");
  }
  if (static_cast<int>(desc.xhat.size()) != n + 1) {
    throw InvalidCurveError("extrapolated data size does not match curve");
  }
  const bool trap = desc.kappa_mode == KappaMode::Trapezoidal;
  if (trap && (!desc.prev_curve || !desc.prev_kappa)) {
    throw ConfigError("trapezoidal mode needs prev_curve and prev_kappa");
  }
  if (trap && (desc.prev_curve->segments() != n ||
               desc.prev_kappa->size() != n + 1)) {
    throw InvalidCurveError("previous-step data size does not match curve");
  }

  const double tau = desc.params.tau;
  const double eta = desc.params.eta;
  const double sigma = desc.params.sigma;
  const double a = desc.a_coeff;
  const double ck = trap ? 0.5 : 1.0; // weight of implicit kappa terms
  const double cx = trap ? 0.5 : 1.0; // weight of implicit X stiffness

  const std::vector<double> len = segment_lengths(ref);
  const std::vector<Vec2> nu = lumped_normals(ref);

  // Unknown layout: kappa_i -> i, x_i -> (N+1) + i, y_i -> 2(N+1) + (i-1).
  const int kap0 = 0;
  const int x0 = n + 1;
  const int y0 = 2 * (n + 1);
  const int dim = 3 * n + 1;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(12 * n));
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);

  // Tridiagonal stiffness union: w_i = 1/|h_i|.
  auto w = [&](int j) { return 1.0 / len[j - 1]; };

  // Rows 0..N: motion law tested with psi = phi_i.
  //   (a/tau) nu_i . X_i^{m+1} + ck (S kappa)_i
  //     = (1/tau) nu_i . xhat_i  [- (1-ck) (S kappa^m)_i in trapezoidal mode]
  for (int i = 0; i <= n; ++i) {
    const int row = i;
    double diag = 0.0;
    if (i >= 1) {
      trip.emplace_back(row, kap0 + i - 1, -ck * w(i));
      diag += w(i);
    }
    if (i < n) {
      trip.emplace_back(row, kap0 + i + 1, -ck * w(i + 1));
      diag += w(i + 1);
    }
    trip.emplace_back(row, kap0 + i, ck * diag);
    trip.emplace_back(row, x0 + i, (a / tau) * nu[i].x());
    if (i >= 1 && i <= n - 1) {
      trip.emplace_back(row, y0 + i - 1, (a / tau) * nu[i].y());
    }
    rhs[row] = nu[i].dot(desc.xhat[i]) / tau;
    if (trap) {
      const NodalField& km = *desc.prev_kappa;
      double skm = 0.0;
      if (i >= 1) {
        skm += (km[i] - km[i - 1]) * w(i);
      }
      if (i < n) {
        skm += (km[i] - km[i + 1]) * w(i + 1);
      }
      rhs[row] -= 0.5 * skm;
    }
  }

  // Rows N+1..2N+1: curvature/position equation tested with (phi_i, 0).
  //   ck nu_i,x kappa_i - cx (S x)_i - (a/(eta tau)) x_i [contacts only]
  //     = -sigma (delta_iN - delta_i0) - xhat contact term [+ trap knowns]
  for (int i = 0; i <= n; ++i) {
    const int row = (n + 1) + i;
    trip.emplace_back(row, kap0 + i, ck * nu[i].x());
    double diag = 0.0;
    if (i >= 1) {
      trip.emplace_back(row, x0 + i - 1, cx * w(i));
      diag += w(i);
    }
    if (i < n) {
      trip.emplace_back(row, x0 + i + 1, cx * w(i + 1));
      diag += w(i + 1);
    }
    double self = -cx * diag;
    if (i == 0 || i == n) {
      self -= a / (eta * tau);
    }
    trip.emplace_back(row, x0 + i, self);
    if (i == 0) {
      rhs[row] = sigma - desc.xhat.front().x() / (eta * tau);
    } else if (i == n) {
      rhs[row] = -sigma - desc.xhat.back().x() / (eta * tau);
    }
    if (trap) {
      const PolygonalCurve& pc = *desc.prev_curve;
      double sxm = 0.0;
      if (i >= 1) {
        sxm += (pc.nodes[i].x() - pc.nodes[i - 1].x()) * w(i);
      }
      if (i < n) {
        sxm += (pc.nodes[i].x() - pc.nodes[i + 1].x()) * w(i + 1);
      }
      rhs[row] += 0.5 * sxm - 0.5 * nu[i].x() * (*desc.prev_kappa)[i];
    }
  }

  // Rows 2N+2..3N: curvature/position equation tested with (0, phi_i),
  // interior nodes only; the endpoint y unknowns are eliminated (y = 0).
  for (int i = 1; i <= n - 1; ++i) {
    const int row = 2 * (n + 1) + (i - 1);
    trip.emplace_back(row, kap0 + i, ck * nu[i].y());
    double diag = w(i) + w(i + 1);
    if (i >= 2) {
      trip.emplace_back(row, y0 + i - 2, cx * w(i));
    }
    if (i <= n - 2) {
      trip.emplace_back(row, y0 + i, cx * w(i + 1));
    }
    trip.emplace_back(row, y0 + i - 1, -cx * diag);
    if (trap) {
      const PolygonalCurve& pc = *desc.prev_curve;
      double sym = 0.0;
      sym += (pc.nodes[i].y() - pc.nodes[i - 1].y()) * w(i);
      sym += (pc.nodes[i].y() - pc.nodes[i + 1].y()) * w(i + 1);
      rhs[row] = 0.5 * sym - 0.5 * nu[i].y() * (*desc.prev_kappa)[i];
    }
  }

  StepSystem sys;
  sys.n_segments = n;
  sys.matrix.resize(dim, dim);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  sys.rhs = std::move(rhs);
  return sys;
}

StepSolution solve(const StepSystem& system) {
  const int n = system.n_segments;
  const int dim = 3 * n + 1;
  if (system.matrix.rows() != dim || system.rhs.size() != dim) {
    throw SolveError("step system dimensions are inconsistent");
  }
  // The assembler always emits the same sparsity pattern for a given N, so
  // the symbolic analysis can be shared across the many solves of a run.
  using SparseLu = Eigen::SparseLU<Eigen::SparseMatrix<double>>;
  thread_local std::map<int, std::unique_ptr<SparseLu>> analyzed;
  std::unique_ptr<SparseLu>& slot = analyzed[dim];
  if (!slot) {
    slot = std::make_unique<SparseLu>();
    slot->analyzePattern(system.matrix);
  }
  SparseLu& lu = *slot;
  lu.factorize(system.matrix);
  if (lu.info() != Eigen::Success) {
    throw SolveError("sparse LU factorization failed (dim " +
                     std::to_string(dim) + "): " + lu.lastErrorMessage());
  }
  Eigen::VectorXd u = lu.solve(system.rhs);
  if (lu.info() != Eigen::Success) {
    throw SolveError("sparse LU back-substitution failed");
  }
  const double bnorm = system.rhs.lpNorm<Eigen::Infinity>();
  const double resid =
      (system.matrix * u - system.rhs).lpNorm<Eigen::Infinity>();
  if (!(resid <= 1e-10 * (1.0 + bnorm))) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "solve residual %.3e exceeds tolerance (dim %d, |b|=%.3e); "
                  "system is likely ill-conditioned",
                  resid, dim, bnorm);
    throw SolveError(msg);
  }

  StepSolution sol;
  sol.kappa = u.head(n + 1);
  sol.curve.nodes.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    sol.curve.nodes[i].x() = u[(n + 1) + i];
    sol.curve.nodes[i].y() =
        (i >= 1 && i <= n - 1) ? u[2 * (n + 1) + (i - 1)] : 0.0;
  }
  return sol;
}

void dump_system(const StepSystem& system, const std::string& path_prefix) {
  {
    std::ofstream out(path_prefix + ".mtx");
    if (!out) {
      throw IoError("cannot open '" + path_prefix + ".mtx'");
    }
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << system.matrix.rows() << " " << system.matrix.cols() << " "
        << system.matrix.nonZeros() << "\n";
    char buf[96];
    for (int k = 0; k < system.matrix.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(system.matrix, k); it;
           ++it) {
        std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                      static_cast<long>(it.row() + 1),
                      static_cast<long>(it.col() + 1), it.value());
        out << buf;
      }
    }
  }
  std::ofstream out(path_prefix + ".rhs.txt");
  if (!out) {
    throw IoError("cannot open '" + path_prefix + ".rhs.txt'");
  }
  char buf[48];
  for (Eigen::Index i = 0; i < system.rhs.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", system.rhs[i]);
    out << buf;
  }
}

} // namespace dewet

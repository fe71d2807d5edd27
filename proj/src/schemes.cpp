#include "dewet2d/schemes.hpp"

#include <cmath>
#include <string>

namespace dewet {

namespace {

/// Tridiagonal stiffness action (S f)_i on the given curve's mesh.
double stiffness_row(const PolygonalCurve& ref, const std::vector<double>& len,
                     const NodalField& f, int i) {
  const int n = ref.segments();
  double acc = 0.0;
  if (i >= 1) {
    acc += (f[i] - f[i - 1]) / len[i - 1];
  }
  if (i < n) {
    acc += (f[i] - f[i + 1]) / len[i];
  }
  return acc;
}

std::vector<double> lengths_of(const PolygonalCurve& c) {
  std::vector<double> len(c.segments());
  for (int j = 1; j <= c.segments(); ++j) {
    len[j - 1] = (c.nodes[j] - c.nodes[j - 1]).norm();
  }
  return len;
}

NodalField component(const PolygonalCurve& c, int axis) {
  NodalField f(c.segments() + 1);
  for (int i = 0; i <= c.segments(); ++i) {
    f[i] = c.nodes[i][axis];
  }
  return f;
}

StepResult finish_step(StepSolution sol, const char* phase) {
  sol.curve.enforce_contacts();
  try {
    sol.curve.validate(3);
  } catch (const Error& e) {
    throw StepError(std::string(phase) +
                    " produced an invalid curve: " + e.what());
  }
  return StepResult{std::move(sol.curve), std::move(sol.kappa)};
}

StepResult run_descriptor(StepDescriptor desc, const char* phase) {
  try {
    return finish_step(solve(assemble(std::move(desc))), phase);
  } catch (const StepError&) {
    throw;
  } catch (const Error& e) {
    throw StepError(std::string(phase) + " failed: " + e.what());
  }
}

} // namespace

void CurveHistory::push(PolygonalCurve curve, NodalField kappa) {
  if (!curves_.empty() && curve.segments() != curves_.back().segments()) {
    throw InvalidCurveError("history curves must share the segment count");
  }
  curves_.push_back(std::move(curve));
  kappas_.push_back(std::move(kappa));
  if (depth() > order_) {
    curves_.erase(curves_.begin());
    kappas_.erase(kappas_.begin());
  }
}

const PolygonalCurve& CurveHistory::curve(int age) const {
  const int d = depth();
  if (age < 0 || age >= d) {
    throw StepError("history access out of range (age " + std::to_string(age) +
                    ", depth " + std::to_string(d) + ")");
  }
  return curves_[d - 1 - age];
}

const NodalField& CurveHistory::kappa(int age) const {
  const int d = depth();
  if (age < 0 || age >= d) {
    throw StepError("history access out of range");
  }
  return kappas_[d - 1 - age];
}

BdfCoefficients bdf_coefficients(int k) {
  switch (k) {
  case 2:
    return {1.5, {2.0, -0.5}};
  case 3:
    return {11.0 / 6.0, {3.0, -1.5, 1.0 / 3.0}};
  case 4:
    return {25.0 / 12.0, {4.0, -3.0, 4.0 / 3.0, -0.25}};
  default:
    throw ConfigError("BDF order must be 2, 3, or 4");
  }
}

StepResult zjb_step(const PolygonalCurve& curve, const SchemeParams& params) {
  StepDescriptor desc;
  desc.reference = curve;
  desc.a_coeff = 1.0;
  desc.xhat = curve.nodes;
  desc.kappa_mode = KappaMode::Implicit;
  desc.params = params;
  return run_descriptor(std::move(desc), "backward Euler step");
}

NodalField initial_curvature(const PolygonalCurve& curve) {
  if (!well_posedness_check(curve)) {
    throw WellPosednessError(
        "initial curvature needs a well-posed reference curve");
  }
  const int n = curve.segments();
  const std::vector<double> len = lengths_of(curve);
  const std::vector<Vec2> nu = lumped_normals(curve);
  const NodalField x = component(curve, 0);
  const NodalField y = component(curve, 1);

  double hmax = 0.0;
  for (double l : len) {
    hmax = std::max(hmax, l);
  }
  const double tiny = 1e-24 * hmax * hmax;

  NodalField kappa(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double bx = stiffness_row(curve, len, x, i);
    double num = nu[i].x() * bx;
    double den = nu[i].x() * nu[i].x();
    if (i >= 1 && i <= n - 1) {
      const double by = stiffness_row(curve, len, y, i);
      num += nu[i].y() * by;
      den += nu[i].y() * nu[i].y();
    }
    kappa[i] = den > tiny ? num / den : 0.0;
  }
  return kappa;
}

StepResult pc_step(const PolygonalCurve& curve, const NodalField& kappa,
                   const SchemeParams& params) {
  if (kappa.size() != curve.segments() + 1) {
    throw InvalidCurveError("kappa size does not match curve");
  }
  StepResult half;
  try {
    half = zjb_step(curve, params.with_tau(0.5 * params.tau));
  } catch (const Error& e) {
    throw StepError(std::string("predictor: ") + e.what());
  }

  StepDescriptor desc;
  desc.reference = std::move(half.curve);
  desc.a_coeff = 1.0;
  desc.xhat = curve.nodes;
  desc.kappa_mode = KappaMode::Trapezoidal;
  desc.prev_curve = curve;
  desc.prev_kappa = kappa;
  desc.params = params;
  try {
    return run_descriptor(std::move(desc), "corrector");
  } catch (const Error& e) {
    throw StepError(std::string("corrector: ") + e.what());
  }
}

StepResult bdf_step(const CurveHistory& history, int k,
                    const SchemeParams& params) {
  if (k < 2 || k > 4) {
    throw ConfigError("BDF order must be 2, 3, or 4");
  }
  if (history.depth() < k) {
    throw StepError("BDF" + std::to_string(k) + " needs " + std::to_string(k) +
                    " history levels, have " + std::to_string(history.depth()));
  }
  const int n = history.curve(0).segments();

  // Predictor cascade: the BDF(j-1) solution is the reference curve for the
  // BDFj corrector, starting from one backward Euler step.
  StepResult stage;
  try {
    stage = zjb_step(history.curve(0), params);
  } catch (const Error& e) {
    throw StepError("BDF" + std::to_string(k) +
                    " predictor (order 1): " + e.what());
  }
  for (int j = 2; j <= k; ++j) {
    const BdfCoefficients coeff = bdf_coefficients(j);
    StepDescriptor desc;
    desc.reference = std::move(stage.curve);
    desc.a_coeff = coeff.a;
    desc.xhat.assign(n + 1, Vec2::Zero());
    for (int p = 0; p < j; ++p) {
      const PolygonalCurve& past = history.curve(p);
      for (int i = 0; i <= n; ++i) {
        desc.xhat[i] += coeff.weights[p] * past.nodes[i];
      }
    }
    desc.kappa_mode = KappaMode::Implicit;
    desc.params = params;
    const char* phase = j == k ? "corrector" : "predictor";
    try {
      stage = run_descriptor(std::move(desc), phase);
    } catch (const Error& e) {
      throw StepError("BDF" + std::to_string(k) + " " + phase + " (order " +
                      std::to_string(j) + "): " + e.what());
    }
  }
  return stage;
}

namespace {

/// Advances `hist` (depth >= 1) to fill start-up levels 1..k-1 of a BDFk run
/// on step size tau; each level may be internally substepped.
void bootstrap_levels(CurveHistory& hist, int k, const SchemeParams& params) {
  const double tau = params.tau;
  for (int p = 1; p <= k - 1; ++p) {
    const int scheme_order = p == 1 ? 2 : p; // PC first, then BDFp
    const double tau_sub =
        std::min(tau, std::pow(tau, static_cast<double>(k) /
                                        (scheme_order + 1)));
    const int nsub = static_cast<int>(std::ceil(tau / tau_sub - 1e-12));
    const double ts = tau / nsub;
    const SchemeParams sub = params.with_tau(ts);

    if (p == 1) {
      PolygonalCurve c = hist.curve(0);
      NodalField kap = hist.kappa(0);
      for (int s = 0; s < nsub; ++s) {
        StepResult r = pc_step(c, kap, sub);
        c = std::move(r.curve);
        kap = std::move(r.kappa);
      }
      hist.push(std::move(c), std::move(kap));
      continue;
    }

    if (nsub == 1) {
      StepResult r = bdf_step(hist, p, params);
      hist.push(std::move(r.curve), std::move(r.kappa));
      continue;
    }

    // Substepped BDFp window: restart a substep-spaced history from the top
    // level, fill it with its own (recursive) start-up, then walk the rest of
    // the window with BDFp.
    CurveHistory subhist(p);
    subhist.push(hist.curve(0), hist.kappa(0));
    bootstrap_levels(subhist, p, sub);
    for (int s = p - 1; s < nsub; ++s) {
      StepResult r = bdf_step(subhist, p, sub);
      subhist.push(std::move(r.curve), std::move(r.kappa));
    }
    hist.push(subhist.curve(0), subhist.kappa(0));
  }
}

} // namespace

CurveHistory bootstrap(const PolygonalCurve& curve0, int k,
                       const SchemeParams& params) {
  if (k < 2 || k > 4) {
    throw ConfigError("bootstrap order must be 2, 3, or 4");
  }
  if (!well_posedness_check(curve0)) {
    throw WellPosednessError("bootstrap needs a well-posed initial curve");
  }
  CurveHistory hist(k);
  hist.push(curve0, initial_curvature(curve0));
  bootstrap_levels(hist, k, params);
  return hist;
}

double equilibrium_residual(const PolygonalCurve& curve,
                            const NodalField& kappa, double sigma) {
  const int n = curve.segments();
  if (kappa.size() != n + 1) {
    throw InvalidCurveError("kappa size does not match curve");
  }
  const std::vector<double> len = lengths_of(curve);
  const std::vector<Vec2> nu = lumped_normals(curve);
  const NodalField x = component(curve, 0);
  const NodalField y = component(curve, 1);

  double res = 0.0;
  for (int i = 0; i <= n; ++i) {
    res = std::max(res, std::abs(stiffness_row(curve, len, kappa, i)));
    double bx = nu[i].x() * kappa[i] - stiffness_row(curve, len, x, i);
    if (i == 0) {
      bx -= sigma;
    }
    if (i == n) {
      bx += sigma;
    }
    res = std::max(res, std::abs(bx));
    if (i >= 1 && i <= n - 1) {
      const double by = nu[i].y() * kappa[i] - stiffness_row(curve, len, y, i);
      res = std::max(res, std::abs(by));
    }
  }
  return res;
}

} // namespace dewet

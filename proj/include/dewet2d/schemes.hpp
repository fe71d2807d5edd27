#pragma once

#include <vector>

#include "dewet2d/assembly.hpp"
#include "dewet2d/curve.hpp"

namespace dewet {

/// Output of one time step: the new curve and its solved nodal curvature.
struct StepResult {
  PolygonalCurve curve;
  NodalField kappa;
};

/// Ring buffer of the most recent curves (and curvatures) feeding the
/// multistep extrapolation.  Entries are addressed by age: age 0 is the
/// current level X^m, age p is X^{m-p}.
class CurveHistory {
public:
  explicit CurveHistory(int order) : order_(order) {}

  int order() const { return order_; }
  int depth() const { return static_cast<int>(curves_.size()); }
  bool full() const { return depth() >= order_; }

  void push(PolygonalCurve curve, NodalField kappa);

  const PolygonalCurve& curve(int age) const;
  const NodalField& kappa(int age) const;

private:
  int order_;
  std::vector<PolygonalCurve> curves_; // oldest first, newest last
  std::vector<NodalField> kappas_;
};

/// Multistep coefficients: a X^{m+1} - sum_p weight[p] X^{m-p} over tau
/// approximates the time derivative at t_{m+1}; k in {2, 3, 4}.
struct BdfCoefficients {
  double a;
  std::vector<double> weights;
};
BdfCoefficients bdf_coefficients(int k);

/// One backward Euler step on reference Gamma^m (first order in time,
/// unconditionally energy stable).
StepResult zjb_step(const PolygonalCurve& curve, const SchemeParams& params);

/// Least-squares nodal curvature of a curve, from the weak curvature
/// identity tested with the full hat basis (x-tests at every node, y-tests at
/// interior nodes).  The per-node normal equations decouple; nodes whose
/// lumped normal weight vanishes get the minimum-norm value 0.
NodalField initial_curvature(const PolygonalCurve& curve);

/// One predictor-corrector step: a half-step backward Euler prediction
/// followed by the trapezoidal correction on the predicted curve (second
/// order in time).  `kappa` is the current nodal curvature kappa^m.
StepResult pc_step(const PolygonalCurve& curve, const NodalField& kappa,
                   const SchemeParams& params);

/// One BDFk step (k in {2, 3, 4}); the reference curve is predicted by a full
/// BDF(k-1) step from the same history (BDF1 being the backward Euler
/// scheme), so one call performs k linear solves.
StepResult bdf_step(const CurveHistory& history, int k,
                    const SchemeParams& params);

/// Builds the k-level starting history for the BDFk scheme from a single
/// initial curve, keeping the one-step errors at O(tau^k): each start-up
/// level is advanced by the highest-order scheme the accumulated history
/// allows (predictor-corrector first, then BDF2, then BDF3), substepped with
/// tau_sub = tau^(k/(q+1)) (capped at tau) where q is that scheme's order.
CurveHistory bootstrap(const PolygonalCurve& curve0, int k,
                       const SchemeParams& params);

/// Max-norm residual of the stationary system (constant-curvature flux,
/// curvature/position balance with the sigma boundary terms) at a candidate
/// equilibrium state.
double equilibrium_residual(const PolygonalCurve& curve,
                            const NodalField& kappa, double sigma);

} // namespace dewet

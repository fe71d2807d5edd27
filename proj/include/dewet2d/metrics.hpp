#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dewet2d/curve.hpp"

namespace dewet {

/// Simple closed polygon bounded by a curve and its substrate closure,
/// oriented counterclockwise.
struct Region {
  std::vector<Vec2> boundary;
};

/// Signed shoelace area (positive for counterclockwise boundaries).
double polygon_area(const std::vector<Vec2>& polygon);

/// Closes `curve` with the substrate segment from its right contact back to
/// its left contact and checks the result is simple with positive area.
Region region_of(const PolygonalCurve& curve);

/// Area of the overlap of two simple regions, computed by classifying the
/// boundary fragments of each polygon against the other and integrating
/// x dy over the fragments bounding the overlap.  Exactly zero-sensitive to
/// the shared substrate edges (their dy vanishes).
double intersection_area(const Region& a, const Region& b);

/// Symmetric-difference area of the substrate-closed regions:
///   M = |O1| + |O2| - 2 |O1 n O2| = 2 |O1 u O2| - |O1| - |O2| >= 0.
double manifold_distance(const PolygonalCurve& c1, const PolygonalCurve& c2);
double manifold_distance(const Region& r1, const Region& r2);

/// Circular-arc equilibrium shape meeting the substrate at `theta_i` with
/// enclosed area `area0`, sampled at N+1 equally spaced parameter values:
///   x(u) = -r sin(theta_i (1 - 2u)),
///   y(u) = -r cos(theta_i) + r cos(theta_i (1 - 2u)),
///   r = sqrt(area0 / (theta_i - sin(theta_i) cos(theta_i))).
PolygonalCurve wulff_shape(double area0, double theta_i, int N);

/// order_i = log(E_i / E_{i+1}) / log(s_i / s_{i+1}) for a refinement
/// parameter list `scales` (time steps or mesh sizes, strictly decreasing).
std::vector<double> convergence_orders(const std::vector<double>& errors,
                                       const std::vector<double>& scales);

struct ConvergenceRow {
  double tau;
  double h;
  double error;
  double order; // NaN when undefined (first row)
};

/// Result table of a refinement study.
struct ConvergenceReport {
  std::string kind;   // "cauchy", "wulff", or "angles"
  double time = -1.0; // sampling time; < 0 means "equilibrium"
  std::vector<ConvergenceRow> rows;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;
  std::string to_json() const;
  void write_json(const std::string& path) const;
};

} // namespace dewet

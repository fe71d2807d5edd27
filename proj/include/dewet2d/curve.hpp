#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "dewet2d/errors.hpp"

namespace dewet {

using Vec2 = Eigen::Vector2d;

/// Nodal values of a piecewise-linear scalar field on the reference grid
/// rho_j = j/N, j = 0..N.
using NodalField = Eigen::VectorXd;

/// Open polygonal film/vapor interface with both endpoints on the substrate
/// (the x-axis).  Nodes are ordered from the left contact to the right one.
///
/// Invariants: y_0 = y_N = 0 exactly, x_0 <= x_N, and every segment has
/// positive length.  Geometric diagnostics work for N >= 2 segments; the
/// finite element solver additionally requires N >= 3.  `validate()` throws
/// when the invariants fail; `enforce_contacts()` re-pins the endpoint
/// y-values, which are never unknowns of any solve.
struct PolygonalCurve {
  std::vector<Vec2> nodes;

  PolygonalCurve() = default;
  explicit PolygonalCurve(std::vector<Vec2> pts) : nodes(std::move(pts)) {}

  int segments() const { return static_cast<int>(nodes.size()) - 1; }

  double contact_left() const { return nodes.front().x(); }
  double contact_right() const { return nodes.back().x(); }

  void enforce_contacts() {
    nodes.front().y() = 0.0;
    nodes.back().y() = 0.0;
  }

  void validate(int min_segments = 2) const;
};

/// Per-segment geometry: length |h_j|, unit tangent, and the unit normal
/// n_j = (-dy, dx)/|h_j| (outward for a film lying above the substrate).
struct SegmentData {
  double length;
  Vec2 tangent;
  Vec2 normal;
};

/// Scalar diagnostics of one curve snapshot.
struct Diagnostics {
  double area;         // A^m, substrate-closed trapezoid sum
  double energy;       // W^m = total length - sigma * contact span
  double mesh_ratio;   // max |h_j| / min |h_j| >= 1
  double theta_left;   // left contact angle, radians in (0, pi)
  double theta_right;  // right contact angle
  double total_length; // sum of |h_j|
};

/// Initial-shape menu for building curves.
struct ShapeSpec {
  enum class Kind { SemiEllipse, Flower, Wulff, File };

  Kind kind = Kind::SemiEllipse;
  double a = 2.0;          // semi-ellipse semi-major axis
  double b = 1.0;          // semi-ellipse semi-minor axis
  double area = 0.0;       // Wulff enclosed area
  double theta = 0.0;      // Wulff Young angle, radians in (0, pi)
  std::string path;        // node file for Kind::File

  static ShapeSpec semi_ellipse(double a, double b);
  static ShapeSpec flower();
  static ShapeSpec wulff(double theta, double area);
  static ShapeSpec file(std::string path);

  /// Area enclosed by the continuous shape and the substrate, when the shape
  /// has a closed form (semi-ellipse pi*a*b/2, flower 9*pi/4, Wulff its own
  /// area parameter).  Returns a negative value for file shapes.
  double analytic_area() const;
};

/// Samples `shape` with N segments at equal parameter / polar-angle
/// increments, endpoints pinned to the substrate, left contact first.
PolygonalCurve from_shape(const ShapeSpec& shape, int N);

std::vector<SegmentData> segment_data(const PolygonalCurve& curve);

/// A^m = 1/2 sum_j (x_j - x_{j-1})(y_j + y_{j-1}); equals the shoelace area
/// of the substrate-closed polygon because the contact y-values vanish.
double enclosed_area(const PolygonalCurve& curve);

/// W^m = sum_j |h_j| - sigma * (x_N - x_0).
double discrete_energy(const PolygonalCurve& curve, double sigma);

double total_length(const PolygonalCurve& curve);

double mesh_ratio(const PolygonalCurve& curve);

/// Contact angles against the substrate: theta_l = arccos(dx_1/|h_1|),
/// theta_r = arccos(dx_N/|h_N|); arccos arguments clamped to [-1, 1].
std::pair<double, double> contact_angles(const PolygonalCurve& curve);

Diagnostics diagnostics(const PolygonalCurve& curve, double sigma);

/// Snapshot I/O: CSV with header `j,x,y`, 17 significant digits, lossless
/// double round-trip.
void write_curve_csv(const PolygonalCurve& curve, std::ostream& out);
void write_curve_csv(const PolygonalCurve& curve, const std::string& path);
PolygonalCurve read_curve_csv(std::istream& in);
PolygonalCurve read_curve_csv(const std::string& path);

} // namespace dewet

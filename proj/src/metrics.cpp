#include "dewet2d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace dewet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double cross(const Vec2& u, const Vec2& v) {
  return u.x() * v.y() - u.y() * v.x();
}

struct BoundingBox {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void include(const Vec2& p) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  double diag() const { return std::hypot(xmax - xmin, ymax - ymin); }
};

BoundingBox bbox_of(const std::vector<Vec2>& pts) {
  BoundingBox bb;
  for (const Vec2& p : pts) {
    bb.include(p);
  }
  return bb;
}

enum class Side { Outside, Inside, Boundary };

/// Crossing-number point location with an explicit on-boundary band.
Side classify_point(const Vec2& p, const std::vector<Vec2>& poly, double tol) {
  const std::size_t n = poly.size();
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[j];
    const Vec2& b = poly[i];
    const Vec2 d = b - a;
    const double len2 = d.squaredNorm();
    // Distance from p to segment [a,b].
    double t = len2 > 0.0 ? (p - a).dot(d) / len2 : 0.0;
    t = std::min(1.0, std::max(0.0, t));
    if ((p - (a + t * d)).squaredNorm() <= tol * tol) {
      return Side::Boundary;
    }
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_int = a.x() + (p.y() - a.y()) * d.x() / d.y();
      if (x_int > p.x()) {
        inside = !inside;
      }
    }
  }
  return inside ? Side::Inside : Side::Outside;
}

/// Collects the parameters along segment [p,q] at which it meets segment
/// [r,s], including the projected endpoints of collinear overlaps.
void intersection_params(const Vec2& p, const Vec2& q, const Vec2& r,
                         const Vec2& s, std::vector<double>& out) {
  const Vec2 d1 = q - p;
  const Vec2 d2 = s - r;
  const double denom = cross(d1, d2);
  const double scale = d1.norm() * d2.norm();
  if (std::abs(denom) > 1e-14 * scale) {
    const Vec2 rp = r - p;
    const double t = cross(rp, d2) / denom;
    const double u = cross(rp, d1) / denom;
    if (t >= -1e-12 && t <= 1.0 + 1e-12 && u >= -1e-12 && u <= 1.0 + 1e-12) {
      out.push_back(std::min(1.0, std::max(0.0, t)));
    }
    return;
  }
  // Parallel; keep only collinear overlaps.
  const double len2 = d1.squaredNorm();
  if (len2 <= 0.0 || std::abs(cross(r - p, d1)) > 1e-12 * scale) {
    return;
  }
  for (const Vec2& e : {r, s}) {
    const double t = (e - p).dot(d1) / len2;
    if (t > 1e-12 && t < 1.0 - 1e-12) {
      out.push_back(t);
    }
  }
}

/// Integral of x dy over the fragments of `walk` that lie inside `other`.
/// `count_boundary` breaks the tie for fragments lying on the other boundary
/// so shared arcs are counted exactly once across the two passes.
double pass_area(const std::vector<Vec2>& walk, const std::vector<Vec2>& other,
                 bool count_boundary, double tol) {
  const std::size_t n = walk.size();
  const std::size_t m = other.size();
  double acc = 0.0;
  std::vector<double> params;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& p = walk[j];
    const Vec2& q = walk[i];
    if (p.y() == q.y() && p.y() == 0.0) {
      continue; // substrate edge: dy = 0, contributes nothing
    }
    params.clear();
    params.push_back(0.0);
    params.push_back(1.0);
    for (std::size_t a = 0, b = m - 1; a < m; b = a++) {
      intersection_params(p, q, other[b], other[a], params);
    }
    std::sort(params.begin(), params.end());
    for (std::size_t k = 0; k + 1 < params.size(); ++k) {
      const double t0 = params[k];
      const double t1 = params[k + 1];
      if (t1 - t0 < 1e-14) {
        continue;
      }
      const Vec2 mid = p + 0.5 * (t0 + t1) * (q - p);
      const Side side = classify_point(mid, other, tol);
      if (side == Side::Inside || (side == Side::Boundary && count_boundary)) {
        const Vec2 a0 = p + t0 * (q - p);
        const Vec2 a1 = p + t1 * (q - p);
        acc += (a1.y() - a0.y()) * 0.5 * (a0.x() + a1.x());
      }
    }
  }
  return acc;
}

/// True when c (known collinear with [a,b]) lies within the segment's box.
bool on_segment(const Vec2& a, const Vec2& b, const Vec2& c) {
  return c.x() >= std::min(a.x(), b.x()) && c.x() <= std::max(a.x(), b.x()) &&
         c.y() >= std::min(a.y(), b.y()) && c.y() <= std::max(a.y(), b.y());
}

/// Non-adjacent edge pairs of a simple polygon may not cross or overlap.
void check_simple(const std::vector<Vec2>& poly) {
  const int n = static_cast<int>(poly.size());
  struct Edge {
    Vec2 a, b;
    double xmin, xmax;
    int idx;
  };
  std::vector<Edge> edges(n);
  for (int i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    edges[i] = {a, b, std::min(a.x(), b.x()), std::max(a.x(), b.x()), i};
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& l, const Edge& r) { return l.xmin < r.xmin; });
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edges[j].xmin > edges[i].xmax) {
        break;
      }
      const int d = std::abs(edges[i].idx - edges[j].idx);
      if (d == 1 || d == n - 1) {
        continue; // adjacent edges share exactly one vertex
      }
      const Vec2& p = edges[i].a;
      const Vec2& q = edges[i].b;
      const Vec2& r = edges[j].a;
      const Vec2& s = edges[j].b;
      const double d1 = cross(q - p, r - p);
      const double d2 = cross(q - p, s - p);
      const double d3 = cross(s - r, p - r);
      const double d4 = cross(s - r, q - r);
      if (((d1 > 0.0) != (d2 > 0.0)) && ((d3 > 0.0) != (d4 > 0.0))) {
        throw NonSimpleRegionError("region boundary self-intersects (edges " +
                                   std::to_string(edges[i].idx) + " and " +
                                   std::to_string(edges[j].idx) + ")");
      }
      const bool deg =
          (d1 == 0.0 && on_segment(p, q, r)) || (d2 == 0.0 && on_segment(p, q, s)) ||
          (d3 == 0.0 && on_segment(r, s, p)) || (d4 == 0.0 && on_segment(r, s, q));
      if (deg) {
        throw NonSimpleRegionError(
            "region boundary touches itself (edges " +
            std::to_string(edges[i].idx) + " and " + std::to_string(edges[j].idx) +
            ")");
      }
    }
  }
}

} // namespace

double polygon_area(const std::vector<Vec2>& polygon) {
  const std::size_t n = polygon.size();
  double acc = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    acc += cross(polygon[j], polygon[i]);
  }
  return 0.5 * acc;
}

Region region_of(const PolygonalCurve& curve) {
  curve.validate();
  Region region;
  // The curve runs left-to-right above the substrate; reversing it makes the
  // implicit closing edge (left contact -> right contact) counterclockwise.
  region.boundary.assign(curve.nodes.rbegin(), curve.nodes.rend());
  check_simple(region.boundary);
  const double area = polygon_area(region.boundary);
  if (!(area > 0.0)) {
    throw NonSimpleRegionError("region area is not positive");
  }
  return region;
}

double intersection_area(const Region& a, const Region& b) {
  BoundingBox bb = bbox_of(a.boundary);
  for (const Vec2& p : b.boundary) {
    bb.include(p);
  }
  const double tol = 1e-13 * std::max(bb.diag(), 1e-300);
  return pass_area(a.boundary, b.boundary, true, tol) +
         pass_area(b.boundary, a.boundary, false, tol);
}

double manifold_distance(const Region& r1, const Region& r2) {
  const double a1 = polygon_area(r1.boundary);
  const double a2 = polygon_area(r2.boundary);
  const double overlap = intersection_area(r1, r2);
  return std::max(0.0, a1 + a2 - 2.0 * overlap);
}

double manifold_distance(const PolygonalCurve& c1, const PolygonalCurve& c2) {
  return manifold_distance(region_of(c1), region_of(c2));
}

PolygonalCurve wulff_shape(double area0, double theta_i, int N) {
  if (!(area0 > 0.0)) {
    throw InvalidCurveError("Wulff area must be positive");
  }
  if (!(theta_i > 0.0 && theta_i < kPi)) {
    throw InvalidCurveError("Wulff Young angle must lie in (0, pi)");
  }
  if (N < 3) {
    throw InvalidCurveError("Wulff shape needs at least 3 segments");
  }
  PolygonalCurve curve = from_shape(ShapeSpec::wulff(theta_i, area0), N);
  return curve;
}

std::vector<double> convergence_orders(const std::vector<double>& errors,
                                       const std::vector<double>& scales) {
  if (errors.size() != scales.size() || errors.size() < 2) {
    throw ConfigError("order computation needs matching lists of length >= 2");
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0)) {
      throw ConfigError("order computation needs positive errors");
    }
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw ConfigError("refinement scales must be strictly decreasing");
    }
  }
  std::vector<double> orders(errors.size() - 1);
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    orders[i] =
        std::log(errors[i] / errors[i + 1]) / std::log(scales[i] / scales[i + 1]);
  }
  return orders;
}

void ConvergenceReport::write_csv(std::ostream& out) const {
  out << "tau,h,error,order\n";
  char buf[120];
  for (const ConvergenceRow& row : rows) {
    if (std::isnan(row.order)) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,\n", row.tau, row.h,
                    row.error);
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", row.tau,
                    row.h, row.error, row.order);
    }
    out << buf;
  }
}

void ConvergenceReport::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_csv(out);
}

std::string ConvergenceReport::to_json() const {
  std::ostringstream out;
  char buf[64];
  out << "{\n  \"kind\": \"" << kind << "\",\n";
  if (time >= 0.0) {
    std::snprintf(buf, sizeof(buf), "%.17g", time);
    out << "  \"time\": " << buf << ",\n";
  } else {
    out << "  \"time\": \"equilibrium\",\n";
  }
  out << "  \"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ConvergenceRow& r = rows[i];
    out << "    {";
    std::snprintf(buf, sizeof(buf), "%.17g", r.tau);
    out << "\"tau\": " << buf << ", ";
    std::snprintf(buf, sizeof(buf), "%.17g", r.h);
    out << "\"h\": " << buf << ", ";
    std::snprintf(buf, sizeof(buf), "%.17g", r.error);
    out << "\"error\": " << buf << ", \"order\": ";
    if (std::isnan(r.order)) {
      out << "null";
    } else {
      std::snprintf(buf, sizeof(buf), "%.17g", r.order);
      out << buf;
    }
    out << "}" << (i + 1 < rows.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  return out.str();
}

void ConvergenceReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << to_json();
}

} // namespace dewet

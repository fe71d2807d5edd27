#include "dewet2d/curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace dewet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }

/// Neumaier compensated summation; keeps energy/area differences meaningful
/// down to ~1 ulp of the total even for long node lists.
class CompensatedSum {
public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

} // namespace

void PolygonalCurve::validate(int min_segments) const {
  const int n = segments();
  if (n < min_segments) {
    throw InvalidCurveError("curve has " + std::to_string(n) +
                            " segments, need at least " +
                            std::to_string(min_segments));
  }
  for (const Vec2& p : nodes) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
      throw InvalidCurveError("curve has non-finite node coordinates");
    }
  }
  if (nodes.front().y() != 0.0 || nodes.back().y() != 0.0) {
    throw InvalidCurveError("contact points must lie exactly on the substrate");
  }
  if (nodes.front().x() > nodes.back().x()) {
    throw InvalidCurveError("left contact lies right of the right contact");
  }
  for (int j = 1; j <= n; ++j) {
    if ((nodes[j] - nodes[j - 1]).norm() <= 0.0) {
      throw DegenerateMeshError("segment " + std::to_string(j) +
                                " has zero length");
    }
  }
}

ShapeSpec ShapeSpec::semi_ellipse(double a, double b) {
  ShapeSpec s;
  s.kind = Kind::SemiEllipse;
  s.a = a;
  s.b = b;
  return s;
}

ShapeSpec ShapeSpec::flower() {
  ShapeSpec s;
  s.kind = Kind::Flower;
  return s;
}

ShapeSpec ShapeSpec::wulff(double theta, double area) {
  ShapeSpec s;
  s.kind = Kind::Wulff;
  s.theta = theta;
  s.area = area;
  return s;
}

ShapeSpec ShapeSpec::file(std::string path) {
  ShapeSpec s;
  s.kind = Kind::File;
  s.path = std::move(path);
  return s;
}

double ShapeSpec::analytic_area() const {
  switch (kind) {
  case Kind::SemiEllipse:
    return 0.5 * kPi * a * b;
  case Kind::Flower:
    // r(t) = 2 + cos(6t) on [0, pi]: 1/2 int r^2 dt = (4*pi + pi/2)/2.
    return 2.25 * kPi;
  case Kind::Wulff:
    return area;
  case Kind::File:
    return -1.0;
  }
  return -1.0;
}

namespace {

PolygonalCurve sample_semi_ellipse(double a, double b, int N) {
  if (a <= 0.0 || b <= 0.0) {
    throw InvalidCurveError("semi-ellipse axes must be positive");
  }
  std::vector<Vec2> pts(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double theta = kPi * (1.0 - static_cast<double>(j) / N);
    pts[j] = Vec2(a * std::cos(theta), b * std::sin(theta));
  }
  return PolygonalCurve(std::move(pts));
}

PolygonalCurve sample_flower(int N) {
  // x = (2 + cos(6t)) cos(t), y = (2 + cos(6t)) sin(t), t in [0, pi],
  // traversed from t = pi (left contact) to t = 0 (right contact).
  std::vector<Vec2> pts(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double t = kPi * (1.0 - static_cast<double>(j) / N);
    const double r = 2.0 + std::cos(6.0 * t);
    pts[j] = Vec2(r * std::cos(t), r * std::sin(t));
  }
  return PolygonalCurve(std::move(pts));
}

PolygonalCurve sample_wulff(double theta_i, double area0, int N) {
  if (!(theta_i > 0.0 && theta_i < kPi)) {
    throw InvalidCurveError("Wulff Young angle must lie in (0, pi)");
  }
  if (area0 <= 0.0) {
    throw InvalidCurveError("Wulff area must be positive");
  }
  const double r =
      std::sqrt(area0 / (theta_i - std::sin(theta_i) * std::cos(theta_i)));
  std::vector<Vec2> pts(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double u = static_cast<double>(j) / N;
    const double phi = theta_i * (1.0 - 2.0 * u);
    pts[j] = Vec2(-r * std::sin(phi), -r * std::cos(theta_i) + r * std::cos(phi));
  }
  return PolygonalCurve(std::move(pts));
}

} // namespace

PolygonalCurve from_shape(const ShapeSpec& shape, int N) {
  if (shape.kind != ShapeSpec::Kind::File && N < 2) {
    throw InvalidCurveError("need at least 2 segments, got " +
                            std::to_string(N));
  }
  PolygonalCurve curve;
  switch (shape.kind) {
  case ShapeSpec::Kind::SemiEllipse:
    curve = sample_semi_ellipse(shape.a, shape.b, N);
    break;
  case ShapeSpec::Kind::Flower:
    curve = sample_flower(N);
    break;
  case ShapeSpec::Kind::Wulff:
    curve = sample_wulff(shape.theta, shape.area, N);
    break;
  case ShapeSpec::Kind::File:
    curve = read_curve_csv(shape.path);
    break;
  }
  curve.enforce_contacts();
  curve.validate();
  return curve;
}

std::vector<SegmentData> segment_data(const PolygonalCurve& curve) {
  const int n = curve.segments();
  std::vector<SegmentData> out(n);
  for (int j = 1; j <= n; ++j) {
    const Vec2 h = curve.nodes[j] - curve.nodes[j - 1];
    const double len = h.norm();
    if (len <= 0.0) {
      throw DegenerateMeshError("segment " + std::to_string(j) +
                                " has zero length");
    }
    out[j - 1].length = len;
    out[j - 1].tangent = h / len;
    out[j - 1].normal = Vec2(-h.y(), h.x()) / len;
  }
  return out;
}

double enclosed_area(const PolygonalCurve& curve) {
  CompensatedSum s;
  for (int j = 1; j <= curve.segments(); ++j) {
    const Vec2& p = curve.nodes[j - 1];
    const Vec2& q = curve.nodes[j];
    s.add((q.x() - p.x()) * (q.y() + p.y()));
  }
  return 0.5 * s.value();
}

double total_length(const PolygonalCurve& curve) {
  CompensatedSum s;
  for (int j = 1; j <= curve.segments(); ++j) {
    s.add((curve.nodes[j] - curve.nodes[j - 1]).norm());
  }
  return s.value();
}

double discrete_energy(const PolygonalCurve& curve, double sigma) {
  return total_length(curve) -
         sigma * (curve.contact_right() - curve.contact_left());
}

double mesh_ratio(const PolygonalCurve& curve) {
  double lmin = std::numeric_limits<double>::infinity();
  double lmax = 0.0;
  for (int j = 1; j <= curve.segments(); ++j) {
    const double len = (curve.nodes[j] - curve.nodes[j - 1]).norm();
    lmin = std::min(lmin, len);
    lmax = std::max(lmax, len);
  }
  if (lmin <= 0.0) {
    throw DegenerateMeshError("mesh ratio undefined for degenerate segment");
  }
  return lmax / lmin;
}

std::pair<double, double> contact_angles(const PolygonalCurve& curve) {
  const int n = curve.segments();
  const Vec2 h1 = curve.nodes[1] - curve.nodes[0];
  const Vec2 hn = curve.nodes[n] - curve.nodes[n - 1];
  const double l1 = h1.norm();
  const double ln = hn.norm();
  if (l1 <= 0.0 || ln <= 0.0) {
    throw DegenerateMeshError("contact angle undefined for degenerate end segment");
  }
  // Both angles are arccos of the tangential x-derivative at the contact, so
  // that at equilibrium cos(theta) matches the material constant sigma.
  const double theta_l = std::acos(clamp_unit(h1.x() / l1));
  const double theta_r = std::acos(clamp_unit(hn.x() / ln));
  return {theta_l, theta_r};
}

Diagnostics diagnostics(const PolygonalCurve& curve, double sigma) {
  Diagnostics d;
  d.area = enclosed_area(curve);
  d.total_length = total_length(curve);
  d.energy = d.total_length -
             sigma * (curve.contact_right() - curve.contact_left());
  d.mesh_ratio = mesh_ratio(curve);
  std::tie(d.theta_left, d.theta_right) = contact_angles(curve);
  return d;
}

void write_curve_csv(const PolygonalCurve& curve, std::ostream& out) {
  out << "j,x,y\n";
  char buf[80];
  for (std::size_t j = 0; j < curve.nodes.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", j,
                  curve.nodes[j].x(), curve.nodes[j].y());
    out << buf;
  }
}

void write_curve_csv(const PolygonalCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  write_curve_csv(curve, out);
  if (!out.good()) {
    throw IoError("failed while writing '" + path + "'");
  }
}

PolygonalCurve read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty curve file");
  }
  // Tolerate an optional UTF-8 BOM before the header.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
    line.erase(0, 3);
  }
  if (line != "j,x,y" && line.rfind("j,x,y", 0) != 0) {
    throw IoError("curve file must start with header 'j,x,y'");
  }
  std::vector<Vec2> pts;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::size_t idx = 0;
    double x = 0.0;
    double y = 0.0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%lf", &idx, &x, &y) != 3) {
      throw IoError("malformed curve row: '" + line + "'");
    }
    if (idx != expected) {
      throw IoError("curve rows must be consecutively indexed from 0");
    }
    ++expected;
    pts.emplace_back(x, y);
  }
  PolygonalCurve curve(std::move(pts));
  curve.validate();
  return curve;
}

PolygonalCurve read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open curve file '" + path + "'");
  }
  return read_curve_csv(in);
}

} // namespace dewet

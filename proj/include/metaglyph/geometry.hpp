#pragma once

// Core vector types for glyph outlines. Everything is cubic: straight
// segments are degree-elevated so that every contour has a uniform node
// structure, which is what master interpolation relies on.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace metaglyph {

/// Equality tolerance (font units) used by structural checks.
inline constexpr double kGeomEpsilon = 1e-9;

struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr Point operator+(Point o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(Point o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator-() const { return {-x, -y}; }
  constexpr Point operator*(double s) const { return {x * s, y * s}; }
  constexpr Point operator/(double s) const { return {x / s, y / s}; }
  constexpr Point& operator+=(Point o) { x += o.x; y += o.y; return *this; }
  constexpr Point& operator-=(Point o) { x -= o.x; y -= o.y; return *this; }
  constexpr bool operator==(const Point&) const = default;

  double length() const { return std::hypot(x, y); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

constexpr Point operator*(double s, Point p) { return p * s; }
constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double distance(Point a, Point b) { return (b - a).length(); }
constexpr Point lerp(Point a, Point b, double t) { return a + (b - a) * t; }

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Unit vector at `degrees` from the x-axis.
inline Point dir(double degrees) {
  double r = deg_to_rad(degrees);
  return {std::cos(r), std::sin(r)};
}

/// Angle of `v` in degrees, in (-180, 180]. The zero vector yields 0.
inline double angle_of(Point v) {
  if (v.x == 0.0 && v.y == 0.0) return 0.0;
  return rad_to_deg(std::atan2(v.y, v.x));
}

/// Wraps an angle in degrees into (-180, 180].
double normalize_degrees(double a);

struct CubicSegment {
  Point p0, c0, c1, p1;

  static CubicSegment line(Point a, Point b) {
    return {a, lerp(a, b, 1.0 / 3.0), lerp(a, b, 2.0 / 3.0), b};
  }

  /// True when both controls sit on the chord (within `tol`), so the
  /// segment can be emitted as a straight line.
  bool is_line(double tol = 1e-7) const;
  bool finite() const { return p0.finite() && c0.finite() && c1.finite() && p1.finite(); }
  CubicSegment reversed() const { return {p1, c1, c0, p0}; }

  bool operator==(const CubicSegment&) const = default;
};

struct Contour {
  std::vector<CubicSegment> segments;
  bool closed = false;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }

  /// Number of on-curve nodes: segments + 1 for open contours.
  std::size_t node_count() const {
    if (segments.empty()) return 0;
    return closed ? segments.size() : segments.size() + 1;
  }
  Point node(std::size_t i) const;

  Contour reversed() const;

  /// Checks that consecutive segments share endpoints exactly.
  bool well_formed() const;

  bool operator==(const Contour&) const = default;
};

using Outline = std::vector<Contour>;

/// Maps (x, y) to (a*x + c*y + tx, b*x + d*y + ty).
struct Affine {
  double a = 1, b = 0, c = 0, d = 1, tx = 0, ty = 0;

  static Affine identity() { return {}; }
  static Affine translation(double dx, double dy) { return {1, 0, 0, 1, dx, dy}; }
  static Affine scaling(double sx, double sy) { return {sx, 0, 0, sy, 0, 0}; }
  static Affine rotation(double degrees);
  /// Horizontal shear used for oblique styles: x' = x + y * tan(degrees).
  static Affine slant(double degrees);

  Point apply(Point p) const { return {a * p.x + c * p.y + tx, b * p.x + d * p.y + ty}; }
  Point apply_linear(Point p) const { return {a * p.x + c * p.y, b * p.x + d * p.y}; }

  /// Composition: (this * m)(p) == this(m(p)).
  Affine operator*(const Affine& m) const;
  bool operator==(const Affine&) const = default;
};

struct BBox {
  double xmin, ymin, xmax, ymax;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool operator==(const BBox&) const = default;
};

class EmptyOutlineError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Point bezier_eval(const CubicSegment& seg, double t);
/// First derivative dp/dt.
Point bezier_derivative(const CubicSegment& seg, double t);
/// de Casteljau split at t.
std::pair<CubicSegment, CubicSegment> split(const CubicSegment& seg, double t);

/// Unit tangent at t. Falls back to higher-order differences when the
/// first derivative vanishes (coincident control and knot).
Point tangent_at(const CubicSegment& seg, double t);

double arc_length(const CubicSegment& seg, double tol = 1e-6);
double arc_length(const Contour& contour, double tol = 1e-6);

Contour transform(const Contour& contour, const Affine& m);
Outline transform(const Outline& outline, const Affine& m);

BBox bbox(const CubicSegment& seg);
BBox bbox(std::span<const Contour> outline);

/// Polyline approximation; closed contours do not repeat the first point.
std::vector<Point> flatten(const Contour& contour, int steps_per_segment = 16);

/// Nonzero-winding point-in-polygon test on a flattened polygon.
bool point_in_polygon(std::span<const Point> poly, Point p);

/// Round half away from zero, the export rounding policy.
inline double round_half_away(double v) { return std::round(v); }

}  // namespace metaglyph

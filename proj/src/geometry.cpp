#include "metaglyph/geometry.hpp"

#include <algorithm>
#include <limits>

namespace metaglyph {

double normalize_degrees(double a) {
  a = std::fmod(a, 360.0);
  if (a <= -180.0) a += 360.0;
  if (a > 180.0) a -= 360.0;
  return a;
}

bool CubicSegment::is_line(double tol) const {
  Point chord = p1 - p0;
  double len = chord.length();
  if (len <= tol) return distance(p0, c0) <= tol && distance(p0, c1) <= tol;
  auto on_chord = [&](Point c) {
    Point v = c - p0;
    double along = dot(v, chord) / (len * len);
    return std::abs(cross(chord, v)) / len <= tol && along >= -tol && along <= 1.0 + tol;
  };
  return on_chord(c0) && on_chord(c1);
}

Point Contour::node(std::size_t i) const {
  if (i >= node_count()) throw std::out_of_range("contour node index out of range");
  if (i < segments.size()) return segments[i].p0;
  return segments.back().p1;
}

Contour Contour::reversed() const {
  Contour out;
  out.closed = closed;
  out.segments.reserve(segments.size());
  for (auto it = segments.rbegin(); it != segments.rend(); ++it) out.segments.push_back(it->reversed());
  return out;
}

bool Contour::well_formed() const {
  for (std::size_t i = 0; i + 1 < segments.size(); ++i)
    if (!(segments[i].p1 == segments[i + 1].p0)) return false;
  if (closed && !segments.empty() && !(segments.back().p1 == segments.front().p0)) return false;
  return true;
}

Affine Affine::rotation(double degrees) {
  double r = deg_to_rad(degrees);
  double cs = std::cos(r), sn = std::sin(r);
  return {cs, sn, -sn, cs, 0, 0};
}

Affine Affine::slant(double degrees) { return {1, 0, std::tan(deg_to_rad(degrees)), 1, 0, 0}; }

Affine Affine::operator*(const Affine& m) const {
  return {a * m.a + c * m.b,       b * m.a + d * m.b,       a * m.c + c * m.d,
          b * m.c + d * m.d,       a * m.tx + c * m.ty + tx, b * m.tx + d * m.ty + ty};
}

Point bezier_eval(const CubicSegment& s, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("bezier_eval: t outside [0, 1]");
  double mt = 1.0 - t;
  double b0 = mt * mt * mt, b1 = 3 * mt * mt * t, b2 = 3 * mt * t * t, b3 = t * t * t;
  return {b0 * s.p0.x + b1 * s.c0.x + b2 * s.c1.x + b3 * s.p1.x,
          b0 * s.p0.y + b1 * s.c0.y + b2 * s.c1.y + b3 * s.p1.y};
}

Point bezier_derivative(const CubicSegment& s, double t) {
  double mt = 1.0 - t;
  return 3 * mt * mt * (s.c0 - s.p0) + 6 * mt * t * (s.c1 - s.c0) + 3 * t * t * (s.p1 - s.c1);
}

std::pair<CubicSegment, CubicSegment> split(const CubicSegment& s, double t) {
  Point a = lerp(s.p0, s.c0, t), b = lerp(s.c0, s.c1, t), c = lerp(s.c1, s.p1, t);
  Point ab = lerp(a, b, t), bc = lerp(b, c, t);
  Point m = lerp(ab, bc, t);
  return {{s.p0, a, ab, m}, {m, bc, c, s.p1}};
}

Point tangent_at(const CubicSegment& s, double t) {
  Point d = bezier_derivative(s, t);
  double len = d.length();
  double scale = std::max({distance(s.p0, s.c0), distance(s.c0, s.c1), distance(s.c1, s.p1), 1.0});
  if (len > 1e-12 * scale) return d / len;
  // Vanishing derivative at an end: use the next control point that differs.
  Point alt;
  if (t < 0.5) {
    alt = (s.c1 != s.p0) ? s.c1 - s.p0 : s.p1 - s.p0;
  } else {
    alt = (s.c0 != s.p1) ? s.p1 - s.c0 : s.p1 - s.p0;
  }
  len = alt.length();
  return len > 0 ? alt / len : Point{1, 0};
}

namespace {

double adaptive_length(const CubicSegment& s, double tol, int depth) {
  double chord = distance(s.p0, s.p1);
  double poly = distance(s.p0, s.c0) + distance(s.c0, s.c1) + distance(s.c1, s.p1);
  if (poly <= 1e-300) return 0.0;
  if (poly - chord < tol * chord || depth >= 48) return 0.5 * (poly + chord);
  auto [l, r] = split(s, 0.5);
  return adaptive_length(l, tol, depth + 1) + adaptive_length(r, tol, depth + 1);
}

}  // namespace

double arc_length(const CubicSegment& seg, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("arc_length: tolerance must be positive");
  return adaptive_length(seg, tol, 0);
}

double arc_length(const Contour& contour, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("arc_length: tolerance must be positive");
  double total = 0;
  for (const auto& s : contour.segments) total += adaptive_length(s, tol, 0);
  return total;
}

Contour transform(const Contour& contour, const Affine& m) {
  Contour out;
  out.closed = contour.closed;
  out.segments.reserve(contour.segments.size());
  for (const auto& s : contour.segments)
    out.segments.push_back({m.apply(s.p0), m.apply(s.c0), m.apply(s.c1), m.apply(s.p1)});
  return out;
}

Outline transform(const Outline& outline, const Affine& m) {
  Outline out;
  out.reserve(outline.size());
  for (const auto& c : outline) out.push_back(transform(c, m));
  return out;
}

namespace {

// Parameters in (0,1) where the derivative of one coordinate vanishes.
void axis_extrema(double p0, double c0, double c1, double p1, std::vector<double>& ts) {
  // Derivative / 3 = a t^2 + b t + c
  double a = -p0 + 3 * c0 - 3 * c1 + p1;
  double b = 2 * (p0 - 2 * c0 + c1);
  double c = c0 - p0;
  double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0) return;
  auto push = [&](double t) {
    if (t > 0 && t < 1) ts.push_back(t);
  };
  if (std::abs(a) <= 1e-12 * scale) {
    if (std::abs(b) > 1e-12 * scale) push(-c / b);
    return;
  }
  double disc = b * b - 4 * a * c;
  if (disc < 0) return;
  double sq = std::sqrt(disc);
  double q = -0.5 * (b + std::copysign(sq, b));
  push(q / a);
  if (q != 0) push(c / q);
}

}  // namespace

BBox bbox(const CubicSegment& s) {
  BBox box{std::min(s.p0.x, s.p1.x), std::min(s.p0.y, s.p1.y), std::max(s.p0.x, s.p1.x),
           std::max(s.p0.y, s.p1.y)};
  std::vector<double> ts;
  axis_extrema(s.p0.x, s.c0.x, s.c1.x, s.p1.x, ts);
  axis_extrema(s.p0.y, s.c0.y, s.c1.y, s.p1.y, ts);
  for (double t : ts) {
    Point p = bezier_eval(s, t);
    box.xmin = std::min(box.xmin, p.x);
    box.xmax = std::max(box.xmax, p.x);
    box.ymin = std::min(box.ymin, p.y);
    box.ymax = std::max(box.ymax, p.y);
  }
  return box;
}

BBox bbox(std::span<const Contour> outline) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  BBox box{inf, inf, -inf, -inf};
  bool any = false;
  for (const auto& c : outline) {
    for (const auto& s : c.segments) {
      BBox b = bbox(s);
      box = {std::min(box.xmin, b.xmin), std::min(box.ymin, b.ymin), std::max(box.xmax, b.xmax),
             std::max(box.ymax, b.ymax)};
      any = true;
    }
  }
  if (!any) throw EmptyOutlineError("bbox of an empty outline");
  return box;
}

std::vector<Point> flatten(const Contour& contour, int steps) {
  std::vector<Point> pts;
  if (contour.empty()) return pts;
  pts.reserve(contour.size() * steps + 1);
  for (const auto& s : contour.segments) {
    for (int i = 0; i < steps; ++i) pts.push_back(bezier_eval(s, double(i) / steps));
  }
  if (!contour.closed) pts.push_back(contour.segments.back().p1);
  return pts;
}

bool point_in_polygon(std::span<const Point> poly, Point p) {
  int winding = 0;
  std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point a = poly[i], b = poly[(i + 1) % n];
    double side = cross(b - a, p - a);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++winding;
    } else if (b.y <= p.y && side < 0) {
      --winding;
    }
  }
  return winding != 0;
}

}  // namespace metaglyph

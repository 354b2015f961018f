#include "metaglyph/hobby.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace metaglyph::hobby {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCurl = 1.0;

double wrap_rad(double a) {
  a = std::remainder(a, 2 * kPi);
  if (a <= -kPi) a += 2 * kPi;
  return a;
}

Point rotate(Point v, double rad) {
  double c = std::cos(rad), s = std::sin(rad);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

// Boundary condition at one end of a run.
struct End {
  bool given = false;
  double angle = 0;  // radians, absolute direction
};

// Solves a x_{i-1} + b x_i + c x_{i+1} = r in place (Thomas).
std::vector<double> thomas(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                           std::vector<double> r) {
  std::size_t n = b.size();
  for (std::size_t i = 1; i < n; ++i) {
    double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    r[i] -= w * r[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = r[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (r[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

// Cyclic tridiagonal system via Sherman-Morrison; a[0] couples to
// x[n-1] and c[n-1] couples to x[0].
std::vector<double> cyclic_thomas(const std::vector<double>& a, const std::vector<double>& b,
                                  const std::vector<double>& c, const std::vector<double>& r) {
  std::size_t n = b.size();
  if (n == 2) {
    // [b0, a0 + c0; a1 + c1, b1]
    double m00 = b[0], m01 = a[0] + c[0], m10 = a[1] + c[1], m11 = b[1];
    double det = m00 * m11 - m01 * m10;
    return {(r[0] * m11 - m01 * r[1]) / det, (m00 * r[1] - m10 * r[0]) / det};
  }
  double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - c[n - 1] * a[0] / gamma;
  std::vector<double> aa(a), cc(c);
  aa[0] = 0;
  cc[n - 1] = 0;
  std::vector<double> x = thomas(aa, bb, cc, r);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = c[n - 1];
  std::vector<double> z = thomas(aa, bb, cc, u);
  double fact = (x[0] + a[0] * x[n - 1] / gamma) / (1.0 + z[0] + a[0] * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

CubicSegment make_segment(Point p0, Point p1, double theta, double phi) {
  Point d = p1 - p0;
  double rho = velocity(theta, phi) / 3.0;
  double sigma = velocity(phi, theta) / 3.0;
  return {p0, p0 + rotate(d, theta) * rho, p1 - rotate(d, -phi) * sigma, p1};
}

// Solves an open run of knots q[0..N] with the given end conditions.
std::vector<CubicSegment> solve_open_run(const std::vector<Point>& q, End start, End end) {
  std::size_t n = q.size() - 1;  // segment count
  if (n == 1 && !start.given && !end.given) return {make_segment(q[0], q[1], 0, 0)};
  std::vector<double> len(n), ang(n), psi(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Point d = q[i + 1] - q[i];
    len[i] = d.length();
    ang[i] = std::atan2(d.y, d.x);
  }
  for (std::size_t i = 1; i < n; ++i) psi[i] = wrap_rad(ang[i] - ang[i - 1]);

  std::vector<double> a(n + 1, 0.0), b(n + 1, 0.0), c(n + 1, 0.0), r(n + 1, 0.0);
  if (start.given) {
    b[0] = 1;
    r[0] = wrap_rad(start.angle - ang[0]);
  } else {
    b[0] = 2 + kCurl;
    c[0] = 1 + 2 * kCurl;
    r[0] = -(1 + 2 * kCurl) * psi[1];
  }
  for (std::size_t i = 1; i < n; ++i) {
    a[i] = 1 / len[i - 1];
    b[i] = 2 / len[i - 1] + 2 / len[i];
    c[i] = 1 / len[i];
    r[i] = -2 * psi[i] / len[i - 1] - psi[i + 1] / len[i];
  }
  if (end.given) {
    b[n] = 1;
    r[n] = -wrap_rad(ang[n - 1] - end.angle);
  } else {
    a[n] = -(1 + 2 * kCurl);
    b[n] = -(2 + kCurl);
  }
  std::vector<double> x = thomas(a, b, c, r);

  std::vector<CubicSegment> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double theta = x[i];
    double phi = -psi[i + 1] - x[i + 1];
    out.push_back(make_segment(q[i], q[i + 1], theta, phi));
  }
  return out;
}

std::vector<CubicSegment> solve_cyclic_run(const std::vector<Point>& q) {
  std::size_t n = q.size();
  std::vector<double> len(n), ang(n), psi(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point d = q[(i + 1) % n] - q[i];
    len[i] = d.length();
    ang[i] = std::atan2(d.y, d.x);
  }
  for (std::size_t i = 0; i < n; ++i) psi[i] = wrap_rad(ang[i] - ang[(i + n - 1) % n]);
  std::vector<double> a(n), b(n), c(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lp = len[(i + n - 1) % n], ln = len[i];
    a[i] = 1 / lp;
    b[i] = 2 / lp + 2 / ln;
    c[i] = 1 / ln;
    r[i] = -2 * psi[i] / lp - psi[(i + 1) % n] / ln;
  }
  std::vector<double> x = cyclic_thomas(a, b, c, r);
  std::vector<CubicSegment> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    out.push_back(make_segment(q[i], q[j], x[i], -psi[j] - x[j]));
  }
  return out;
}

enum class Fixed { None, Line, SmoothLine, Explicit, Degenerate };

}  // namespace

double velocity(double theta, double phi) {
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sf = std::sin(phi), cf = std::cos(phi);
  const double num = 2 + std::numbers::sqrt2 * (st - sf / 16) * (sf - st / 16) * (ct - cf);
  const double den = 1 + 0.5 * (std::sqrt(5.0) - 1) * ct + 0.5 * (3 - std::sqrt(5.0)) * cf;
  // Same cap as METAPOST: control distance never exceeds four chord lengths.
  if (den <= 0 || num >= 12 * den) return 12.0;
  return num / den;
}

CubicSegment segment_with_directions(Point a, double dir_a, Point b, double dir_b) {
  Point d = b - a;
  if (d.length() == 0) return {a, a, b, b};
  double chord = std::atan2(d.y, d.x);
  double theta = wrap_rad(deg_to_rad(dir_a) - chord);
  double phi = wrap_rad(chord - deg_to_rad(dir_b));
  return make_segment(a, b, theta, phi);
}

Contour solve(const PathSpec& spec, std::vector<std::string>* warnings) {
  const auto& knots = spec.knots;
  const std::size_t n = knots.size();
  if (n < 2) throw PathError("a path needs at least 2 knots");
  const std::size_t m = spec.cyclic ? n : n - 1;
  if (spec.joints.size() != m)
    throw PathError("path has " + std::to_string(spec.joints.size()) + " joints for " +
                    std::to_string(n) + " knots");
  for (std::size_t i = 0; i < n; ++i)
    if (!knots[i].point.finite()) throw PathError("knot " + std::to_string(i) + " is not finite");

  auto next = [&](std::size_t k) { return (k + 1) % n; };

  std::vector<Fixed> fixed(m, Fixed::None);
  std::vector<CubicSegment> segs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const Knot& a = knots[k];
    const Knot& b = knots[next(k)];
    if (a.controls_after) {
      if (spec.joints[k] != JointKind::Curve)
        throw PathError("explicit controls on a straight joint after knot " + std::to_string(k));
      if (a.dir_out)
        throw PathError("knot " + std::to_string(k) + " has both a direction and explicit controls");
      if (b.dir_in)
        throw PathError("knot " + std::to_string(next(k)) +
                        " has both a direction and explicit controls");
      fixed[k] = Fixed::Explicit;
      segs[k] = {a.point, a.controls_after->first, a.controls_after->second, b.point};
    } else if (spec.joints[k] != JointKind::Curve) {
      fixed[k] = spec.joints[k] == JointKind::Line ? Fixed::Line : Fixed::SmoothLine;
      segs[k] = CubicSegment::line(a.point, b.point);
    } else if (distance(a.point, b.point) <= kGeomEpsilon) {
      fixed[k] = Fixed::Degenerate;
      segs[k] = {a.point, a.point, b.point, b.point};
      if (warnings)
        warnings->push_back("coincident knots " + std::to_string(k) + " and " +
                            std::to_string(next(k)) + " give a degenerate segment");
    }
  }

  // Per-knot given directions, propagated across the knot when only one side
  // is specified.
  std::vector<std::optional<double>> out_dir(n), in_dir(n);
  for (std::size_t k = 0; k < n; ++k) {
    out_dir[k] = knots[k].dir_out ? knots[k].dir_out : knots[k].dir_in;
    in_dir[k] = knots[k].dir_in ? knots[k].dir_in : knots[k].dir_out;
  }

  auto has_seg = [&](std::size_t s) { return s < m; };
  auto prev_seg = [&](std::size_t k) -> std::size_t {
    if (k > 0) return k - 1;
    return spec.cyclic ? m - 1 : m;  // m means none
  };

  // Condition for a curve leaving knot k, given the joint arriving at k.
  auto start_condition = [&](std::size_t k, bool& open) -> End {
    open = false;
    if (out_dir[k]) return {true, deg_to_rad(*out_dir[k])};
    std::size_t ps = prev_seg(k);
    if (!has_seg(ps)) return {};
    switch (fixed[ps]) {
      case Fixed::None: open = true; return {};
      case Fixed::SmoothLine: {
        Point d = segs[ps].p1 - segs[ps].p0;
        if (d.length() > 0) return {true, std::atan2(d.y, d.x)};
        return {};
      }
      case Fixed::Explicit: {
        const auto& s = segs[ps];
        Point d = s.p1 - s.c1;
        if (d.length() == 0) d = s.p1 - s.c0;
        if (d.length() == 0) return {};
        return {true, std::atan2(d.y, d.x)};
      }
      default: return {};
    }
  };
  auto end_condition = [&](std::size_t k) -> End {
    if (in_dir[k]) return {true, deg_to_rad(*in_dir[k])};
    std::size_t ns = (k < m) ? k : m;  // segment leaving knot k
    if (!spec.cyclic && k == n - 1) ns = m;
    if (!has_seg(ns)) return {};
    switch (fixed[ns]) {
      case Fixed::SmoothLine: {
        Point d = segs[ns].p1 - segs[ns].p0;
        if (d.length() > 0) return {true, std::atan2(d.y, d.x)};
        return {};
      }
      case Fixed::Explicit: {
        const auto& s = segs[ns];
        Point d = s.c0 - s.p0;
        if (d.length() == 0) d = s.c1 - s.p0;
        if (d.length() == 0) return {};
        return {true, std::atan2(d.y, d.x)};
      }
      default: return {};
    }
  };

  std::vector<bool> knot_open(n, false);
  for (std::size_t k = 0; k < n; ++k) {
    bool open = false;
    if (has_seg(k) && fixed[k] == Fixed::None) start_condition(k, open);
    knot_open[k] = open;
  }

  std::vector<bool> done(m, false);
  bool all_open_cycle = spec.cyclic && std::all_of(knot_open.begin(), knot_open.end(), [](bool b) { return b; });
  if (all_open_cycle) {
    std::vector<Point> q;
    for (const auto& kn : knots) q.push_back(kn.point);
    auto solved = solve_cyclic_run(q);
    for (std::size_t k = 0; k < m; ++k) segs[k] = solved[k];
  } else {
    for (std::size_t s = 0; s < m; ++s) {
      if (fixed[s] != Fixed::None || done[s] || knot_open[s]) continue;
      bool open_flag = false;
      End start = start_condition(s, open_flag);
      std::vector<Point> q{knots[s].point};
      std::vector<std::size_t> run;
      std::size_t cur = s;
      while (true) {
        run.push_back(cur);
        std::size_t k = next(cur);
        q.push_back(knots[k].point);
        if (!knot_open[k]) break;
        cur = k;
      }
      End end = end_condition(next(run.back()));
      auto solved = solve_open_run(q, start, end);
      for (std::size_t i = 0; i < run.size(); ++i) {
        segs[run[i]] = solved[i];
        done[run[i]] = true;
      }
    }
  }

  Contour out;
  out.closed = spec.cyclic;
  out.segments = std::move(segs);
  // Knot points are copied exactly so that shared endpoints match bit-for-bit.
  for (std::size_t k = 0; k < m; ++k) {
    out.segments[k].p0 = knots[k].point;
    out.segments[k].p1 = knots[next(k)].point;
  }
  return out;
}

double direction_at(const Contour& contour, std::size_t index) {
  if (index >= contour.node_count()) throw std::out_of_range("direction_at: node index out of range");
  if (index < contour.segments.size()) return angle_of(tangent_at(contour.segments[index], 0.0));
  return angle_of(tangent_at(contour.segments.back(), 1.0));
}

double direction_in_at(const Contour& contour, std::size_t index) {
  if (index >= contour.node_count()) throw std::out_of_range("direction_in_at: node index out of range");
  const auto& segs = contour.segments;
  if (index == 0) {
    if (contour.closed) return angle_of(tangent_at(segs.back(), 1.0));
    return angle_of(tangent_at(segs.front(), 0.0));
  }
  return angle_of(tangent_at(segs[index - 1], 1.0));
}

}  // namespace metaglyph::hobby

#include "metaglyph/pen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metaglyph/hobby.hpp"

namespace metaglyph::pen {

namespace {

// Circle quadrant approximation constant.
constexpr double kKappa = 0.5522847498307936;

Point rotate_deg(Point v, double deg) {
  double r = deg_to_rad(deg);
  double c = std::cos(r), s = std::sin(r);
  return {v.x * c - v.y * s, v.x * s + v.y * c};
}

Point left_normal(Point d) { return {-d.y, d.x}; }

}  // namespace

Nib Nib::fixed(double width, double height, double angle) {
  if (!(width >= 0) || !(height >= 0) || !std::isfinite(width) || !std::isfinite(height) ||
      !std::isfinite(angle))
    throw StrokeError("nib extents must be finite and non-negative");
  return {height == 0.0 ? NibKind::Razor : NibKind::Ellipse, width, height, angle};
}

Nib Nib::transformed(const Affine& t) const {
  // Shape = T * R(angle) * diag(width, height) applied to the circle of
  // radius 1/2; re-diagonalise with a closed-form 2x2 SVD.
  Affine shape = Affine{t.a, t.b, t.c, t.d, 0, 0} * Affine::rotation(angle) *
                 Affine::scaling(width, height);
  double e = (shape.a + shape.d) / 2, f = (shape.a - shape.d) / 2;
  double g = (shape.b + shape.c) / 2, h = (shape.b - shape.c) / 2;
  double q = std::hypot(e, h), r = std::hypot(f, g);
  double a1 = std::atan2(g, f), a2 = std::atan2(h, e);
  Nib out;
  out.width = q + r;
  out.height = std::abs(q - r);
  out.angle = rad_to_deg((a2 + a1) / 2);
  if (kind == NibKind::Razor || out.height <= 1e-12 * std::max(out.width, 1.0)) {
    out.kind = NibKind::Razor;
    out.height = 0.0;
  } else {
    out.kind = NibKind::Ellipse;
  }
  return out;
}

Point Nib::extremal_offset(Point normal) const {
  Point v = rotate_deg(normal, -angle);
  double hw = width / 2, hh = height / 2;
  double g = std::hypot(hw * v.x, hh * v.y);
  if (g == 0.0) return {0, 0};
  return rotate_deg(Point{hw * hw * v.x / g, hh * hh * v.y / g}, angle);
}

namespace {

// Half of the nib boundary from offset `from` to `-from`, passing through the
// side that points along `bulge`. Two quarter arcs, always.
std::vector<CubicSegment> nib_arc(const Nib& nib, Point centre, Point from_offset, Point bulge) {
  // Work in the nib's unit-circle preimage: shape = R(angle) diag(w/2, h/2).
  double hw = nib.width / 2, hh = nib.height / 2;
  auto to_shape = [&](Point u) { return rotate_deg(Point{hw * u.x, hh * u.y}, nib.angle); };
  Point f = rotate_deg(from_offset, -nib.angle);
  Point u{hw > 0 ? f.x / hw : 0.0, hh > 0 ? f.y / hh : 0.0};
  double ul = u.length();
  if (ul == 0) u = {1, 0};
  else u = u / ul;
  Point w{-u.y, u.x};
  if (dot(to_shape(w), bulge) < 0) w = -w;
  auto quarter = [&](Point a, Point b) {
    return CubicSegment{centre + to_shape(a), centre + to_shape(a + b * kKappa),
                        centre + to_shape(b + a * kKappa), centre + to_shape(b)};
  };
  std::vector<CubicSegment> arc{quarter(u, w), quarter(w, -u)};
  arc.front().p0 = centre + from_offset;
  arc.back().p1 = centre - from_offset;
  return arc;
}

bool segments_cross(Point a, Point b, Point c, Point d) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

std::vector<Point> polyline(const Contour& c) {
  auto p = flatten(c, 8);
  if (c.closed && !p.empty()) p.push_back(p.front());
  return p;
}

bool edges_cross(const Contour& l, const Contour& r) {
  auto pl = polyline(l), pr = polyline(r);
  for (std::size_t i = 0; i + 1 < pl.size(); ++i)
    for (std::size_t j = 0; j + 1 < pr.size(); ++j)
      if (segments_cross(pl[i], pl[i + 1], pr[j], pr[j + 1])) return true;
  return false;
}

bool edge_folds(const Contour& e) {
  auto p = polyline(e);
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    for (std::size_t j = i + 2; j + 1 < p.size(); ++j)
      if (segments_cross(p[i], p[i + 1], p[j], p[j + 1])) return true;
  return false;
}

}  // namespace

Envelope pen_stroke(const Contour& path, const Nib& default_nib, const std::vector<NodeStyle>& styles) {
  const std::size_t n = path.node_count();
  if (n < 2) throw StrokeError("pen_stroke needs a path with at least 2 nodes");
  if (!path.well_formed()) throw StrokeError("pen_stroke: path segments are not connected");
  {
    bool all_same = true;
    for (std::size_t k = 1; k < n; ++k)
      if (distance(path.node(k), path.node(0)) > kGeomEpsilon) all_same = false;
    bool flat = true;
    for (const auto& s : path.segments)
      if (!(s.c0 == s.p0 && s.c1 == s.p0)) flat = false;
    if (all_same && flat) throw StrokeError("pen_stroke: all path nodes coincide");
  }

  const bool cyclic = path.closed;
  std::vector<Nib> nibs(n, default_nib);
  std::vector<const CutOverride*> cuts(n, nullptr);
  std::vector<bool> nib_override(n, false), styled(n, false);
  for (const auto& st : styles) {
    if (st.node_index >= n)
      throw StrokeError("node " + std::to_string(st.node_index) + " is outside the path (" +
                        std::to_string(n) + " nodes)");
    if (styled[st.node_index])
      throw StrokeError("node " + std::to_string(st.node_index) + " has more than one nib/cut");
    styled[st.node_index] = true;
    if (auto* o = std::get_if<NibOverride>(&st.style)) {
      nibs[st.node_index] = o->nib;
      nib_override[st.node_index] = true;
    } else {
      const auto& c = std::get<CutOverride>(st.style);
      if (cyclic || (st.node_index != 0 && st.node_index != n - 1))
        throw StrokeError("cut is only allowed at the end nodes of an open path (node " +
                          std::to_string(st.node_index) + ")");
      nibs[st.node_index] = c.nib;
      cuts[st.node_index] = &c;
    }
  }

  Envelope env;
  env.cyclic = cyclic;
  std::vector<double> dir_out(n), dir_in(n);
  std::vector<Point> left(n), right(n);
  env.left_offsets.resize(n);
  env.right_offsets.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    dir_out[k] = hobby::direction_at(path, k);
    dir_in[k] = hobby::direction_in_at(path, k);
    Point node = path.node(k);
    Point d = dir(dir_out[k]);
    Point off = nibs[k].extremal_offset(left_normal(d));
    env.left_offsets[k] = off;
    env.right_offsets[k] = -off;
    left[k] = node + off;
    right[k] = node - off;
  }

  for (std::size_t k = 0; k < n; ++k) {
    if (!cuts[k]) continue;
    const CutOverride& c = *cuts[k];
    Point node = path.node(k);
    double tangent = dir_out[k];
    double a = c.mode == CutMode::Absolute ? c.angle : tangent + c.angle;
    Point u = dir(a), d = dir(tangent);
    double den = cross(d, u);
    if (std::abs(den) < 1e-9)
      throw StrokeError("cut at node " + std::to_string(k) + " runs parallel to the stroke");
    double clip = std::max(c.nib.width, c.nib.height);
    auto cut_point = [&](Point edge) {
      double t = cross(d, edge - node) / den;
      t = std::clamp(t, -clip, clip);
      return node + u * t;
    };
    left[k] = cut_point(left[k]);
    right[k] = cut_point(right[k]);
    env.left_offsets[k] = left[k] - node;
    env.right_offsets[k] = right[k] - node;
  }

  const std::size_t segs = path.segments.size();
  auto edge = [&](const std::vector<Point>& pts) {
    Contour c;
    c.closed = cyclic;
    for (std::size_t k = 0; k < segs; ++k) {
      std::size_t j = (k + 1) % n;
      CubicSegment s = hobby::segment_with_directions(pts[k], dir_out[k], pts[j], dir_in[j]);
      s.p0 = pts[k];
      s.p1 = pts[j];
      c.segments.push_back(s);
    }
    return c;
  };
  env.left = edge(left);
  env.right = edge(right);

  if (!cyclic) {
    auto cap = [&](std::size_t k, Point from, Point to, Point bulge) {
      Contour c;
      if (nib_override[k]) {
        Point node = path.node(k);
        auto arc = nib_arc(nibs[k], node, from - node, bulge);
        arc.front().p0 = from;
        arc.back().p1 = to;
        c.segments = std::move(arc);
      } else {
        c.segments.push_back(CubicSegment::line(from, to));
      }
      return c;
    };
    env.begin_cap = cap(0, left[0], right[0], -dir(dir_out[0]));
    env.end_cap = cap(n - 1, right[n - 1], left[n - 1], dir(dir_in[n - 1]));

    Contour& res = env.result;
    res.closed = true;
    auto append = [&](const Contour& c) {
      res.segments.insert(res.segments.end(), c.segments.begin(), c.segments.end());
    };
    append(env.right);
    append(env.end_cap);
    append(env.left.reversed());
    append(env.begin_cap);
  }

  if (edges_cross(env.left, env.right))
    env.warnings.push_back("stroke edges cross each other (nib too large for the curvature?)");
  else if (edge_folds(env.left) || edge_folds(env.right))
    env.warnings.push_back("a stroke edge crosses itself (nib too large for the curvature?)");
  return env;
}

ArcLengthIndex::ArcLengthIndex(const Contour& path, double rel_tol) : path_(&path), tol_(rel_tol) {
  double acc = 0;
  for (const auto& s : path.segments) {
    acc += arc_length(s, tol_ * 1e-2);
    cumulative_.push_back(acc);
  }
}

std::pair<std::size_t, double> ArcLengthIndex::locate(double s) const {
  if (cumulative_.empty()) throw std::invalid_argument("empty path");
  s = std::clamp(s, 0.0, total());
  std::size_t i = std::lower_bound(cumulative_.begin(), cumulative_.end(), s) - cumulative_.begin();
  if (i >= cumulative_.size()) i = cumulative_.size() - 1;
  double start = i == 0 ? 0.0 : cumulative_[i - 1];
  double seg_len = cumulative_[i] - start;
  double target = s - start;
  if (seg_len <= 0 || target <= 0) return {i, 0.0};
  if (target >= seg_len) return {i, 1.0};
  const CubicSegment& seg = path_->segments[i];
  auto length_to = [&](double t) { return arc_length(split(seg, t).first, tol_ * 1e-2); };
  double lo = 0, hi = 1, t = 0.5, err = 0;
  const double abs_tol = 1e-10 * std::max(total(), 1e-12);
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    t = 0.5 * (lo + hi);
    err = length_to(t) - target;
    if (std::abs(err) <= abs_tol) break;
    if (err < 0) lo = t;
    else hi = t;
  }
  // Newton polish: exact in one step where the speed is constant.
  for (int it = 0; it < 3 && err != 0; ++it) {
    const double speed = bezier_derivative(seg, t).length();
    if (!(speed > 0)) break;
    const double next = std::clamp(t - err / speed, 0.0, 1.0);
    const double next_err = length_to(next) - target;
    if (std::abs(next_err) >= std::abs(err)) break;
    t = next;
    err = next_err;
  }
  return {i, t};
}

Point ArcLengthIndex::point_at(double s) const {
  auto [i, t] = locate(s);
  return bezier_eval(path_->segments[i], t);
}

double ArcLengthIndex::angle_at(double s) const {
  auto [i, t] = locate(s);
  return angle_of(tangent_at(path_->segments[i], t));
}

namespace {

std::vector<double> dot_positions(const Contour& path, double spacing, double total) {
  if (!(spacing > 0) || !std::isfinite(spacing))
    throw std::invalid_argument("dot spacing must be positive");
  std::vector<double> pos;
  const double eps = 1e-6 * std::max(total, spacing);
  for (std::size_t k = 0;; ++k) {
    double s = double(k) * spacing;
    if (path.closed ? s >= total - eps : s > total + eps) break;
    pos.push_back(std::min(s, total));
  }
  return pos;
}

}  // namespace

std::vector<Point> place_dots(const Contour& path, double spacing) {
  if (path.empty()) throw std::invalid_argument("place_dots: empty path");
  ArcLengthIndex idx(path);
  std::vector<Point> out;
  for (double s : dot_positions(path, spacing, idx.total())) out.push_back(idx.point_at(s));
  return out;
}

std::vector<Arrow> place_arrows(const Contour& path, double spacing) {
  if (path.empty()) throw std::invalid_argument("place_arrows: empty path");
  ArcLengthIndex idx(path);
  std::vector<Arrow> out;
  for (double s : dot_positions(path, spacing, idx.total())) out.push_back({idx.point_at(s), idx.angle_at(s)});
  return out;
}

}  // namespace metaglyph::pen

#include <random>

#include "doctest.h"
#include "metaglyph/hobby.hpp"
#include "metaglyph/pen.hpp"
#include "oracles/sampling.hpp"

using namespace metaglyph;
using namespace metaglyph::pen;

namespace {

Contour line_path(Point a, Point b) { return Contour{{CubicSegment::line(a, b)}, false}; }

Contour solve_through(const std::vector<Point>& pts, bool cyclic = false) {
  hobby::PathSpec spec;
  spec.cyclic = cyclic;
  for (Point p : pts) spec.knots.push_back({p});
  spec.joints.assign(cyclic ? pts.size() : pts.size() - 1, hobby::JointKind::Curve);
  return hobby::solve(spec);
}

// The Ra arc at width = height = 200.
Contour ra_arc() { return solve_through({{50, 0}, {0, 100}, {100, 200}, {200, 100}, {150, 0}}); }

bool near(Point a, Point b, double tol) { return distance(a, b) <= tol; }

// Brute force: the boundary sample of the transformed unit circle that is
// furthest along `normal`.
Point sampled_extremal(const Nib& nib, Point normal) {
  Affine shape = Affine::rotation(nib.angle) * Affine::scaling(nib.width / 2, nib.height / 2);
  Point best{0, 0};
  double best_v = -1e300;
  for (int i = 0; i < 200000; ++i) {
    double a = 2 * std::numbers::pi * i / 200000;
    Point p = shape.apply({std::cos(a), std::sin(a)});
    if (dot(p, normal) > best_v) {
      best_v = dot(p, normal);
      best = p;
    }
  }
  return best;
}

// Random smooth open path with 2-10 nodes and gentle turns.
Contour random_path(std::mt19937& rng, int nodes) {
  std::uniform_real_distribution<double> step(80, 200), turn(-50, 50), unit(0, 1);
  std::vector<Point> pts{{unit(rng) * 100, unit(rng) * 100}};
  double heading = unit(rng) * 360;
  for (int i = 1; i < nodes; ++i) {
    heading += turn(rng);
    pts.push_back(pts.back() + dir(heading) * step(rng));
  }
  return solve_through(pts);
}

}  // namespace

TEST_CASE("razor along a horizontal line gives a rectangle") {
  Envelope env = pen_stroke(line_path({0, 0}, {100, 0}), Nib::fixed(20, 0, 90));
  REQUIRE(env.result.closed);
  REQUIRE(env.result.segments.size() == 4);
  std::vector<Point> corners{{0, -10}, {100, -10}, {100, 10}, {0, 10}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(near(env.result.segments[i].p0, corners[i], 1e-12));
    CHECK(env.result.segments[i].is_line());
  }
  CHECK(env.result.well_formed());
}

TEST_CASE("result is right edge, end cap, reversed left edge, begin cap") {
  Envelope env = pen_stroke(ra_arc(), Nib::fixed(30, 0, 30));
  std::vector<CubicSegment> expect;
  for (const Contour* c : {&env.right, &env.end_cap}) expect.insert(expect.end(), c->segments.begin(), c->segments.end());
  Contour rl = env.left.reversed();
  expect.insert(expect.end(), rl.segments.begin(), rl.segments.end());
  expect.insert(expect.end(), env.begin_cap.segments.begin(), env.begin_cap.segments.end());
  CHECK(env.result.segments == expect);
  CHECK(env.result.well_formed());
}

TEST_CASE("cyclic paths have closed edges and no caps") {
  Contour tri = solve_through({{0, 0}, {200, 0}, {100, 170}}, true);
  Envelope env = pen_stroke(tri, Nib::circle(12));
  CHECK(env.cyclic);
  CHECK(env.result.empty());
  CHECK(env.begin_cap.empty());
  CHECK(env.end_cap.empty());
  CHECK(env.left.closed);
  CHECK(env.right.closed);
  CHECK(env.left.node_count() == 3);
  CHECK(env.right.node_count() == 3);
  CHECK(env.left.well_formed());
}

TEST_CASE("stroke with per-node nibs and cuts") {
  const double thick = 40, thin = thick * 2 / 3;
  Nib thinnib = Nib::fixed(thin, 0, 0), thicknib = Nib::fixed(thick, 0, 0);
  Contour p = ra_arc();
  std::vector<NodeStyle> styles{
      {0, CutOverride{thinnib, 45, CutMode::Absolute}},
      {1, NibOverride{thinnib.scaled(1.2).rotated(-10)}},
      {2, NibOverride{thicknib.rotated(80)}},
      {3, NibOverride{thicknib.rotated(10)}},
      {4, CutOverride{thinnib.scaled(1.25), 90, CutMode::Relative}},
  };
  Envelope env = pen_stroke(p, thinnib, styles);
  CHECK(env.left.node_count() == 5);
  CHECK(env.right.node_count() == 5);
  CHECK(env.result.closed);
  CHECK(env.result.well_formed());
  CHECK(env.result.segments.size() == 4 + 1 + 4 + 1);

  // Both cut points lie on the cut lines.
  Point n0 = p.node(0), n4 = p.node(4);
  CHECK(std::abs(cross(dir(45), env.left.node(0) - n0)) < 1e-9);
  CHECK(std::abs(cross(dir(45), env.right.node(0) - n0)) < 1e-9);
  Point rel = dir(hobby::direction_at(p, 4) + 90);
  CHECK(std::abs(cross(rel, env.left.node(4) - n4)) < 1e-9);
  CHECK(std::abs(cross(rel, env.right.node(4) - n4)) < 1e-9);
}

TEST_CASE("cut lines are clipped to the cut nib") {
  Nib razor = Nib::fixed(20, 0, 90);
  // 2 degrees off the stroke direction: the edge intersections are far away.
  Envelope env = pen_stroke(line_path({0, 0}, {100, 0}), razor, {{0, CutOverride{razor, 2, CutMode::Absolute}}});
  CHECK(distance(env.left.node(0), {0, 0}) <= 20 + 1e-12);
  CHECK(distance(env.right.node(0), {0, 0}) <= 20 + 1e-12);
  CHECK_THROWS_AS(
      pen_stroke(line_path({0, 0}, {100, 0}), razor, {{0, CutOverride{razor, 180, CutMode::Absolute}}}),
      StrokeError);
}

TEST_CASE("nib override at a terminal gives a nib arc cap") {
  Nib round = Nib::circle(20);
  Envelope env = pen_stroke(line_path({0, 0}, {100, 0}), Nib::fixed(20, 0, 90), {{0, NibOverride{round}}});
  REQUIRE(env.begin_cap.segments.size() == 2);
  CHECK(env.begin_cap.segments.front().p0 == env.left.node(0));
  CHECK(env.begin_cap.segments.back().p1 == env.right.node(0));
  CHECK(near(env.begin_cap.segments.front().p1, {-10, 0}, 1e-12));
  // Quarter arcs of a radius 10 circle.
  for (double t : {0.25, 0.5, 0.75})
    for (const auto& s : env.begin_cap.segments) CHECK(bezier_eval(s, t).length() == doctest::Approx(10).epsilon(3e-4));
  CHECK(env.end_cap.segments.size() == 1);
}

TEST_CASE("pen_stroke errors") {
  Nib nib = Nib::circle(10);
  CHECK_THROWS_AS(pen_stroke(Contour{}, nib), StrokeError);
  Contour p = line_path({0, 0}, {100, 0});
  CHECK_THROWS_AS(pen_stroke(p, nib, {{2, NibOverride{nib}}}), StrokeError);
  CHECK_THROWS_AS(pen_stroke(p, nib, {{1, NibOverride{nib}}, {1, NibOverride{nib}}}), StrokeError);
  CHECK_THROWS_AS(pen_stroke(ra_arc(), nib, {{2, CutOverride{nib, 0, CutMode::Absolute}}}), StrokeError);
  Contour tri = solve_through({{0, 0}, {200, 0}, {100, 170}}, true);
  CHECK_THROWS_AS(pen_stroke(tri, nib, {{0, CutOverride{nib, 0, CutMode::Absolute}}}), StrokeError);
  Contour dot{{{{5, 5}, {5, 5}, {5, 5}, {5, 5}}}, false};
  CHECK_THROWS_AS(pen_stroke(dot, nib), StrokeError);
  CHECK_THROWS_AS(Nib::fixed(-1, 0, 0), StrokeError);
}

TEST_CASE("zero-extent nib at one node is allowed") {
  Envelope env = pen_stroke(ra_arc(), Nib::circle(20), {{2, NibOverride{Nib::fixed(0, 0, 0)}}});
  CHECK(env.left.node(2) == env.right.node(2));
  CHECK(env.result.well_formed());
}

TEST_CASE("tight curvature with a large nib warns") {
  Contour hairpin = solve_through({{0, 0}, {30, 20}, {0, 40}});
  Envelope env = pen_stroke(hairpin, Nib::circle(80));
  CHECK_FALSE(env.warnings.empty());
  CHECK(pen_stroke(ra_arc(), Nib::circle(10)).warnings.empty());
}

TEST_CASE("Nib transforms match a sampled boundary") {
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> ang(-180, 180), size(1, 50), k(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Nib base = Nib::fixed(size(rng), trial % 3 == 0 ? 0.0 : size(rng), ang(rng));
    Affine m{k(rng), k(rng), k(rng), k(rng), 0, 0};
    Nib t = base.transformed(m);
    Point normal = dir(ang(rng));
    // Oracle: transform the sampled boundary of the original nib.
    Affine shape = m * Affine::rotation(base.angle) * Affine::scaling(base.width / 2, base.height / 2);
    double best = -1e300;
    for (int i = 0; i < 100000; ++i) {
      double a = 2 * std::numbers::pi * i / 100000;
      best = std::max(best, dot(shape.apply({std::cos(a), std::sin(a)}), normal));
    }
    CHECK(dot(t.extremal_offset(normal), normal) == doctest::Approx(best).epsilon(1e-6));
  }
  Nib ellipse = Nib::circle(1).transformed(Affine::scaling(10, 5)).rotated(45);
  CHECK(ellipse.width == doctest::Approx(10));
  CHECK(ellipse.height == doctest::Approx(5));
  CHECK(normalize_degrees(ellipse.angle) == doctest::Approx(45));
  CHECK(Nib::fixed(10, 0, 0).rotated(30).kind == NibKind::Razor);
}

TEST_CASE("extremal offsets against brute force") {
  for (Nib nib : {Nib::fixed(30, 10, 25), Nib::fixed(20, 0, -40), Nib::circle(12)}) {
    for (double a : {0.0, 33.0, 90.0, 200.0}) {
      Point n = dir(a);
      Point want = sampled_extremal(nib, n);
      CHECK(dot(nib.extremal_offset(n), n) == doctest::Approx(dot(want, n)).epsilon(1e-8));
      CHECK(near(nib.extremal_offset(n), want, 1e-3 * std::max(nib.width, 1.0)));
    }
  }
}

TEST_CASE("property: node count and containment on random strokes") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> nodes(2, 10);
  std::uniform_real_distribution<double> size(4, 40), aspect(0.25, 1), ang(-180, 180);
  for (int trial = 0; trial < 200; ++trial) {
    Contour p = random_path(rng, nodes(rng));
    Nib nib = Nib::fixed(size(rng), 0, ang(rng));
    nib.height = nib.width * aspect(rng);
    nib.kind = NibKind::Ellipse;
    std::vector<NodeStyle> styles;
    for (std::size_t k = 0; k < p.node_count(); ++k)
      if (rng() % 3 == 0) styles.push_back({k, NibOverride{Nib::fixed(size(rng), size(rng) * 0.5, ang(rng))}});
    Envelope env = pen_stroke(p, nib, styles);
    CHECK(env.left.node_count() == p.node_count());
    CHECK(env.right.node_count() == p.node_count());
    REQUIRE(env.result.closed);

    auto poly = flatten(env.result, 64);
    for (const auto& seg : p.segments)
      for (double t = 0.05; t < 1.0; t += 0.05) CHECK(point_in_polygon(poly, bezier_eval(seg, t)));
  }
}

TEST_CASE("property: equivariance under rotation") {
  std::mt19937 rng(12);
  std::uniform_real_distribution<double> ang(-180, 180);
  for (int trial = 0; trial < 40; ++trial) {
    Contour p = random_path(rng, 2 + trial % 7);
    Nib nib = Nib::fixed(25, trial % 2 ? 0.0 : 9.0, ang(rng));
    double alpha = ang(rng);
    Affine r = Affine::rotation(alpha);
    Envelope a = pen_stroke(p, nib, {{0, CutOverride{nib, 70, CutMode::Relative}}});
    Nib rn = nib;
    rn.angle += alpha;
    Envelope b = pen_stroke(transform(p, r), rn, {{0, CutOverride{rn, 70, CutMode::Relative}}});
    Contour want = transform(a.result, r);
    REQUIRE(want.segments.size() == b.result.segments.size());
    for (std::size_t i = 0; i < want.segments.size(); ++i) {
      const auto &x = want.segments[i], &y = b.result.segments[i];
      CHECK(near(x.p0, y.p0, 1e-6));
      CHECK(near(x.c0, y.c0, 1e-6));
      CHECK(near(x.c1, y.c1, 1e-6));
    }
  }
}

TEST_CASE("property: doubling a razor doubles every offset exactly") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> ang(-180, 180), w(1, 60);
  for (int trial = 0; trial < 50; ++trial) {
    Contour p = random_path(rng, 2 + trial % 9);
    double width = w(rng), angle = ang(rng);
    Envelope a = pen_stroke(p, Nib::fixed(width, 0, angle));
    Envelope b = pen_stroke(p, Nib::fixed(2 * width, 0, angle));
    for (std::size_t k = 0; k < p.node_count(); ++k) {
      CHECK(b.left_offsets[k] == a.left_offsets[k] * 2.0);
      CHECK(b.right_offsets[k] == a.right_offsets[k] * 2.0);
    }
    // Same structure, ready for interpolation.
    REQUIRE(a.result.segments.size() == b.result.segments.size());
    for (std::size_t i = 0; i < a.result.segments.size(); ++i)
      CHECK(a.result.segments[i].is_line() == b.result.segments[i].is_line());
  }
}

TEST_CASE("dots on a straight line") {
  auto dots = place_dots(line_path({0, 0}, {100, 0}), 20);
  REQUIRE(dots.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(dots[i].x == doctest::Approx(20.0 * i).epsilon(1e-9));
    CHECK(dots[i].y == 0.0);
  }
  CHECK(place_dots(line_path({0, 0}, {100, 0}), 30).size() == 4);
  CHECK_THROWS_AS(place_dots(line_path({0, 0}, {100, 0}), 0), std::invalid_argument);
  CHECK_THROWS_AS(place_arrows(line_path({0, 0}, {100, 0}), -1), std::invalid_argument);
}

TEST_CASE("dots on a closed path do not repeat the seam") {
  Contour loop = solve_through({{100, 0}, {0, 100}, {-100, 0}, {0, -100}}, true);
  double len = ArcLengthIndex(loop).total();
  auto dots = place_dots(loop, len / 8);
  CHECK(dots.size() == 8);
  CHECK(near(dots.front(), {100, 0}, 1e-9));
}

TEST_CASE("dots on the Ra arc follow the dense oracle") {
  Contour p = solve_through({{25, 0}, {0, 50}, {50, 100}, {100, 50}, {75, 0}});
  const double thick = 10;
  oracle::DensePolyline dense(p, 20000);
  auto dots = place_dots(p, thick);
  CHECK(dots.size() == std::size_t(std::floor(dense.total() / thick)) + 1);
  for (std::size_t i = 0; i < dots.size(); ++i)
    CHECK(distance(dots[i], dense.point_at(thick * double(i))) < 0.5);
}

TEST_CASE("property: dot spacing along random paths") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> sp(5, 60);
  for (int trial = 0; trial < 30; ++trial) {
    Contour p = random_path(rng, 2 + trial % 8);
    double s = sp(rng);
    oracle::DensePolyline dense(p, 4000);
    auto dots = place_dots(p, s);
    double prev = 0;
    for (std::size_t i = 1; i < dots.size(); ++i) {
      double here = dense.length_at_nearest(dots[i], prev, 2 * s);
      CHECK(std::abs(here - prev - s) < 0.5);
      prev = here;
    }
  }
}

TEST_CASE("arrows carry the tangent angle") {
  auto fwd = place_arrows(line_path({0, 0}, {100, 0}), 50);
  REQUIRE(fwd.size() == 3);
  for (const auto& a : fwd) CHECK(a.angle == doctest::Approx(0));
  auto back = place_arrows(line_path({100, 0}, {0, 0}), 50);
  for (const auto& a : back) CHECK(std::abs(normalize_degrees(a.angle)) == doctest::Approx(180));

  // Quarter circle from (100,0) to (0,100): tangents turn from 90 to 180.
  Contour quarter{{{{100, 0}, {100, 55.22847498}, {55.22847498, 100}, {0, 100}}}, false};
  auto arrows = place_arrows(quarter, 5);
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    double a = normalize_degrees(arrows[i].angle);
    // Oracle: direction of the radius, turned a quarter.
    double want = angle_of(arrows[i].at) + 90;
    CHECK(std::abs(normalize_degrees(a - want)) < 0.1);
    if (i > 0) CHECK(a > normalize_degrees(arrows[i - 1].angle));
  }
}

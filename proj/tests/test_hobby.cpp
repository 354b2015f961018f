#include <random>

#include "doctest.h"
#include "metaglyph/hobby.hpp"
#include "oracles/hobby_reference.hpp"

using namespace metaglyph;
using hobby::JointKind;
using hobby::Knot;
using hobby::PathSpec;

namespace {

PathSpec curve_through(std::vector<Point> pts, bool cyclic = false, JointKind kind = JointKind::Curve) {
  PathSpec spec;
  spec.cyclic = cyclic;
  for (Point p : pts) spec.knots.push_back({p});
  spec.joints.assign(cyclic ? pts.size() : pts.size() - 1, kind);
  return spec;
}

double angle_diff(double a, double b) { return std::abs(normalize_degrees(a - b)); }

void check_close(Point a, Point b, double tol) {
  CHECK(std::abs(a.x - b.x) <= tol);
  CHECK(std::abs(a.y - b.y) <= tol);
}

struct RandomPath {
  PathSpec spec;
  std::vector<oracle::RefKnot> ref;
};

// 3-8 knots with well separated neighbours; a few knots carry directions.
RandomPath random_path(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(3, 8);
  std::uniform_real_distribution<double> step(60, 250), turn(-100, 100), dev(-60, 60), unit(0, 1);
  RandomPath out;
  int n = count(rng);
  bool cyclic = unit(rng) < 0.3;
  double heading = unit(rng) * 360;
  Point p{unit(rng) * 100, unit(rng) * 100};
  for (int i = 0; i < n; ++i) {
    std::optional<double> d;
    if (unit(rng) < 0.25) d = normalize_degrees(heading + dev(rng));
    Knot k{p};
    k.dir_out = d;
    out.spec.knots.push_back(k);
    out.ref.push_back({p.x, p.y, d});
    heading += turn(rng);
    p += dir(heading) * step(rng);
  }
  if (cyclic) {
    // Keep the closing chord reasonable: rebuild as a star-shaped loop.
    out.spec.knots.clear();
    out.ref.clear();
    double r0 = 150 + unit(rng) * 100;
    for (int i = 0; i < n; ++i) {
      double a = 360.0 * i / n + dev(rng) * 0.3;
      Point q = dir(a) * (r0 * (0.7 + 0.6 * unit(rng)));
      std::optional<double> d;
      if (unit(rng) < 0.2) d = normalize_degrees(a + 90 + dev(rng) * 0.5);
      Knot k{q};
      k.dir_out = d;
      out.spec.knots.push_back(k);
      out.ref.push_back({q.x, q.y, d});
    }
  }
  out.spec.cyclic = cyclic;
  out.spec.joints.assign(cyclic ? n : n - 1, JointKind::Curve);
  return out;
}

}  // namespace

TEST_CASE("collinear knots give a straight line") {
  Contour c = hobby::solve(curve_through({{0, 0}, {10, 0}, {20, 0}}));
  REQUIRE(c.segments.size() == 2);
  for (const auto& s : c.segments) {
    CHECK(std::abs(s.c0.y) <= 1e-9);
    CHECK(std::abs(s.c1.y) <= 1e-9);
    CHECK(s.is_line(1e-9));
  }
}

TEST_CASE("square with straight joints") {
  double side = 10;
  Contour c = hobby::solve(
      curve_through({{0, 0}, {side, 0}, {side, side}, {0, side}, {0, 0}}, false, JointKind::Line));
  REQUIRE(c.segments.size() == 4);
  std::vector<Point> corners{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(c.segments[i].p0 == corners[i]);
    CHECK(c.segments[i].is_line(1e-12));
  }
  CHECK(c.segments.back().p1 == Point{0, 0});
}

TEST_CASE("control-point figure path matches the reference solver") {
  // u = 2cm; knots at 0, 2u, 4u rounded to 4 decimals
  PathSpec spec = curve_through({{0, 0}, {113.3858, 0}, {226.7717, 0}});
  spec.knots[0].dir_out = 90;
  spec.knots[2].dir_in = 90;
  Contour c = hobby::solve(spec);
  auto ref = oracle::reference_hobby({{0, 0, 90}, {113.3858, 0, {}}, {226.7717, 0, 90}}, false);
  REQUIRE(c.segments.size() == ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    check_close(c.segments[i].c0, {ref[i].c0x, ref[i].c0y}, 1e-6);
    check_close(c.segments[i].c1, {ref[i].c1x, ref[i].c1y}, 1e-6);
  }
  // Frozen values, cross-checked once against an unrelated Hobby
  // implementation (gdstk) to ~2e-6 units.
  check_close(c.segments[0].c0, {0.0, 41.181430766}, 1e-6);
  check_close(c.segments[0].c1, {64.731829647, 48.653970353}, 1e-6);
  check_close(c.segments[1].c0, {162.039813263, -48.654013263}, 1e-6);
  check_close(c.segments[1].c1, {226.7717, -41.181467086}, 1e-6);
}

TEST_CASE("frozen open and cyclic paths") {
  Contour open = hobby::solve(curve_through({{0, 0}, {100, 80}, {200, -20}, {320, 60}}));
  check_close(open.segments[0].c0, {-8.189399306, 56.118496077}, 1e-6);
  check_close(open.segments[1].c1, {156.869287770, 2.137256811}, 1e-6);
  check_close(open.segments[2].c1, {325.129217928, -4.457471770}, 1e-6);

  Contour loop = hobby::solve(curve_through({{0, 0}, {100, 0}, {120, 90}, {10, 110}}, true));
  REQUIRE(loop.closed);
  check_close(loop.segments[0].c0, {27.036718399, -26.644005980}, 1e-6);
  check_close(loop.segments[2].c1, {46.299947512, 137.878334313}, 1e-6);
  check_close(loop.segments[3].c0, {-25.689710709, 82.590327125}, 1e-6);
}

TEST_CASE("explicit controls are kept") {
  PathSpec spec = curve_through({{0, 0}, {60, 40}});
  spec.knots[0].controls_after = std::pair{Point{26.8, -1.8}, Point{51.4, 14.6}};
  Contour c = hobby::solve(spec);
  REQUIRE(c.segments.size() == 1);
  CHECK(c.segments[0] == CubicSegment{{0, 0}, {26.8, -1.8}, {51.4, 14.6}, {60, 40}});
}

TEST_CASE("explicit controls set the direction of the neighbouring curve") {
  PathSpec spec = curve_through({{0, 0}, {60, 40}, {120, 10}});
  spec.knots[0].controls_after = std::pair{Point{26.8, -1.8}, Point{51.4, 14.6}};
  Contour c = hobby::solve(spec);
  double arriving = angle_of(Point{60, 40} - Point{51.4, 14.6});
  CHECK(angle_diff(hobby::direction_at(c, 1), arriving) < 1e-6);
}

TEST_CASE("solve errors") {
  CHECK_THROWS_AS(hobby::solve(curve_through({{0, 0}})), hobby::PathError);
  PathSpec bad = curve_through({{0, 0}, {1, 1}, {2, 0}});
  bad.joints.pop_back();
  CHECK_THROWS_AS(hobby::solve(bad), hobby::PathError);

  PathSpec conflict = curve_through({{0, 0}, {60, 40}});
  conflict.knots[0].controls_after = std::pair{Point{26.8, -1.8}, Point{51.4, 14.6}};
  conflict.knots[0].dir_out = 45;
  CHECK_THROWS_WITH_AS(hobby::solve(conflict), doctest::Contains("explicit controls"), hobby::PathError);

  PathSpec conflict_end = curve_through({{0, 0}, {60, 40}});
  conflict_end.knots[0].controls_after = std::pair{Point{26.8, -1.8}, Point{51.4, 14.6}};
  conflict_end.knots[1].dir_in = 45;
  CHECK_THROWS_AS(hobby::solve(conflict_end), hobby::PathError);
}

TEST_CASE("coincident knots give a degenerate segment and a warning") {
  std::vector<std::string> warnings;
  Contour c = hobby::solve(curve_through({{0, 0}, {50, 50}, {50, 50}, {100, 0}}), &warnings);
  REQUIRE(c.segments.size() == 3);
  CHECK(c.segments[1].c0 == Point{50, 50});
  CHECK(c.segments[1].c1 == Point{50, 50});
  CHECK(warnings.size() == 1);
}

TEST_CASE("direction_at") {
  Contour h{{CubicSegment::line({0, 0}, {10, 0})}, false};
  CHECK(hobby::direction_at(h, 0) == doctest::Approx(0));
  Contour v{{CubicSegment::line({0, 0}, {0, 10})}, false};
  CHECK(hobby::direction_at(v, 0) == doctest::Approx(90));
  CHECK(hobby::direction_at(v, 1) == doctest::Approx(90));
  CHECK_THROWS_AS(hobby::direction_at(v, 2), std::out_of_range);

  // Ra with terminals, width 200: z0{dir 135}..z1..z2{right}..z3{dir 260}..z4
  const double m = 200;
  Point z1{0, m / 2};
  Point z0{z1.x + m / 4, 0};
  Point z2{z0.x + m / 3, z1.y + m / 2};
  Point z3{z2.x + m / 3, z2.y - m / 2};
  Point z4{z2.x, 0};
  PathSpec ra = curve_through({z0, z1, z2, z3, z4});
  ra.knots[0].dir_out = 135;
  ra.knots[2].dir_out = 0;
  ra.knots[3].dir_out = 260;
  Contour c = hobby::solve(ra);
  CHECK(angle_diff(hobby::direction_at(c, 0), 135) < 1e-6);
  CHECK(angle_diff(hobby::direction_at(c, 2), 0) < 1e-6);
  CHECK(angle_diff(hobby::direction_at(c, 3), 260) < 1e-6);
}

TEST_CASE("smooth-line joints carry their direction into the curve") {
  PathSpec spec = curve_through({{0, 0}, {10, 0}, {20, 10}});
  spec.joints[0] = JointKind::SmoothLine;
  Contour c = hobby::solve(spec);
  CHECK(c.segments[0].is_line());
  CHECK(angle_diff(hobby::direction_at(c, 1), 0) < 1e-9);

  PathSpec plain = spec;
  plain.joints[0] = JointKind::Line;
  Contour d = hobby::solve(plain);
  CHECK(d.segments[1].is_line());
  CHECK(angle_diff(hobby::direction_at(d, 1), 45) < 1e-9);
}

TEST_CASE("property: interpolation, C1 continuity, constraints") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    RandomPath rp = random_path(rng);
    Contour c = hobby::solve(rp.spec);
    const auto& knots = rp.spec.knots;
    for (std::size_t k = 0; k < c.segments.size(); ++k) {
      CHECK(c.segments[k].p0 == knots[k].point);
      CHECK(c.segments[k].p1 == knots[(k + 1) % knots.size()].point);
    }
    for (std::size_t k = 0; k < knots.size(); ++k) {
      bool interior = rp.spec.cyclic || (k > 0 && k + 1 < knots.size());
      if (interior) CHECK(angle_diff(hobby::direction_at(c, k), hobby::direction_in_at(c, k)) < 1e-6);
      if (knots[k].dir_out && (rp.spec.cyclic || k + 1 < knots.size()))
        CHECK(angle_diff(hobby::direction_at(c, k), *knots[k].dir_out) < 1e-6);
    }
  }
}

TEST_CASE("property: agreement with the reference solver on random paths") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    RandomPath rp = random_path(rng);
    Contour c = hobby::solve(rp.spec);
    auto ref = oracle::reference_hobby(rp.ref, rp.spec.cyclic);
    REQUIRE(ref.size() == c.segments.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      check_close(c.segments[i].c0, {ref[i].c0x, ref[i].c0y}, 1e-6);
      check_close(c.segments[i].c1, {ref[i].c1x, ref[i].c1y}, 1e-6);
    }
  }
}

TEST_CASE("property: equivariance and mirror symmetry") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ang(-180, 180), off(-300, 300), sc(0.2, 5);
  for (int trial = 0; trial < 60; ++trial) {
    RandomPath rp = random_path(rng);
    Contour base = hobby::solve(rp.spec);
    double rot = ang(rng), s = sc(rng);
    Affine m = Affine::translation(off(rng), off(rng)) * Affine::rotation(rot) * Affine::scaling(s, s);
    PathSpec moved = rp.spec;
    for (auto& k : moved.knots) {
      k.point = m.apply(k.point);
      if (k.dir_out) k.dir_out = normalize_degrees(*k.dir_out + rot);
    }
    Contour got = hobby::solve(moved);
    Contour want = transform(base, m);
    double scale = 1;
    for (const auto& k : moved.knots) scale = std::max({scale, std::abs(k.point.x), std::abs(k.point.y)});
    for (std::size_t i = 0; i < got.segments.size(); ++i) {
      check_close(got.segments[i].c0, want.segments[i].c0, 1e-9 * scale * 10);
      check_close(got.segments[i].c1, want.segments[i].c1, 1e-9 * scale * 10);
    }

    PathSpec mirrored = rp.spec;
    for (auto& k : mirrored.knots) {
      k.point.y = -k.point.y;
      if (k.dir_out) k.dir_out = normalize_degrees(-*k.dir_out);
    }
    Contour mir = hobby::solve(mirrored);
    for (std::size_t i = 0; i < mir.segments.size(); ++i) {
      check_close(mir.segments[i].c0, {base.segments[i].c0.x, -base.segments[i].c0.y}, 1e-9 * scale * 10);
      check_close(mir.segments[i].c1, {base.segments[i].c1.x, -base.segments[i].c1.y}, 1e-9 * scale * 10);
    }
  }
}

TEST_CASE("velocity of a straight segment is one third") {
  CHECK(hobby::velocity(0, 0) / 3 == doctest::Approx(1.0 / 3.0));
  CHECK(hobby::velocity(0.3, -0.2) == doctest::Approx(3 * oracle::ref_velocity(0.3, -0.2)));
}

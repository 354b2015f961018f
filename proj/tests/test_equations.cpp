#include <algorithm>
#include <chrono>
#include <random>

#include "doctest.h"
#include "metaglyph/equations.hpp"
#include "oracles/dense_linear.hpp"

using namespace metaglyph::equations;

namespace {

LinExpr var(const std::string& n) { return LinExpr::variable(n); }
LinExpr num(double v) { return LinExpr::number(v); }

struct Eq {
  LinExpr lhs, rhs;
};

oracle::Row to_row(const Eq& e) {
  oracle::Row r;
  LinExpr d = e.lhs - e.rhs;
  for (const auto& [v, c] : d.terms) r.coef[v] += c;
  r.rhs = -d.constant;
  return r;
}

// The Ra letter: z0 = (x1 + w/4, 0), z1 = (0, y0 + h/2), z2 = (x1 + w/2, y1 + h/2),
// z3 = (x2 + w/2, y1), z4 = (x3 - w/4, y0), split into coordinates.
std::vector<Eq> ra_equations(double w, double h) {
  return {
      {var("x0"), var("x1") + num(w / 4)}, {var("y0"), num(0)},
      {var("x1"), num(0)},                 {var("y1"), var("y0") + num(h / 2)},
      {var("x2"), var("x1") + num(w / 2)}, {var("y2"), var("y1") + num(h / 2)},
      {var("x3"), var("x2") + num(w / 2)}, {var("y3"), var("y1")},
      {var("x4"), var("x3") - num(w / 4)}, {var("y4"), var("y0")},
  };
}

}  // namespace

TEST_CASE("single equations") {
  EquationSystem sys;
  sys.assert_equal(var("x"), num(5));
  CHECK(sys.is_known("x"));
  CHECK(sys.value_of("x") == 5);

  EquationSystem twice;
  twice.assert_equal(var("x"), num(1));
  CHECK_THROWS_AS(twice.assert_equal(var("x"), num(2)), InconsistentEquation);
  CHECK(twice.value_of("x") == 1);
}

TEST_CASE("inconsistency names the equation") {
  EquationSystem sys;
  sys.assert_equal(var("a") + var("b"), num(3));
  sys.assert_equal(var("a") - var("b"), num(1));
  CHECK_THROWS_WITH_AS(sys.assert_equal(var("a"), num(7), "z7 = (7, 0)"), doctest::Contains("z7 = (7, 0)"),
                       InconsistentEquation);
}

TEST_CASE("underdetermined and unknown variables") {
  EquationSystem sys;
  sys.assert_equal(var("x") + var("y"), num(10));
  CHECK_FALSE(sys.is_known("x"));
  try {
    sys.value_of("x");
    FAIL("expected Underdetermined");
  } catch (const Underdetermined& e) {
    CHECK(std::string(e.what()).find('y') != std::string::npos);
  }

  // Free unknowns report the other free unknowns they are tied to.
  EquationSystem three;
  three.assert_equal(var("a") * 3 + var("b") + var("c"), num(1));
  try {
    three.value_of("b");
    FAIL("expected Underdetermined");
  } catch (const Underdetermined& e) {
    CHECK(e.free_variables() == std::vector<std::string>{"b", "c"});
  }
  CHECK_THROWS_AS(sys.value_of("nope"), UnknownVariable);
  sys.declare("w");
  CHECK_THROWS_AS(sys.value_of("w"), Underdetermined);
}

TEST_CASE("Ra system against the dense oracle") {
  auto t0 = std::chrono::steady_clock::now();
  auto eqs = ra_equations(100, 100);
  EquationSystem sys;
  for (const auto& e : eqs) sys.assert_equal(e.lhs, e.rhs);
  std::vector<oracle::Row> rows;
  for (const auto& e : eqs) rows.push_back(to_row(e));
  auto ref = oracle::dense_solve_named(rows);

  // Frozen from the oracle.
  const std::vector<std::pair<double, double>> expect{{25, 0}, {0, 50}, {50, 100}, {100, 50}, {75, 0}};
  for (int k = 0; k < 5; ++k) {
    std::string x = "x" + std::to_string(k), y = "y" + std::to_string(k);
    CHECK(ref[x] == expect[k].first);
    CHECK(ref[y] == expect[k].second);
    CHECK(sys.value_of(x) == expect[k].first);
    CHECK(sys.value_of(y) == expect[k].second);
  }
  CHECK(sys.value_of("x4") == 75);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(1));
}

TEST_CASE("property: order independence and residuals") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> coef(-5, 5), wh(10, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eq> eqs;
    if (trial % 2 == 0) {
      eqs = ra_equations(wh(rng), wh(rng));
    } else {
      // Random dense square system; diagonal dominance keeps it regular.
      int n = 2 + trial % 6;
      for (int i = 0; i < n; ++i) {
        LinExpr l;
        for (int j = 0; j < n; ++j) {
          double c = coef(rng) + (i == j ? 30 : 0);
          l += var("v" + std::to_string(j)) * c;
        }
        eqs.push_back({l, num(coef(rng) * 100)});
      }
    }
    EquationSystem a;
    for (const auto& e : eqs) a.assert_equal(e.lhs, e.rhs);
    auto shuffled = eqs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EquationSystem b;
    for (const auto& e : shuffled) b.assert_equal(e.lhs, e.rhs);

    auto va = a.known_values(), vb = b.known_values();
    REQUIRE(va.size() == vb.size());
    for (const auto& [n, v] : va) CHECK(std::abs(v - vb.at(n)) <= 1e-9 * (1 + std::abs(v)));

    std::vector<oracle::Row> rows;
    for (const auto& e : eqs) rows.push_back(to_row(e));
    auto ref = oracle::dense_solve_named(rows);
    for (const auto& [n, v] : ref) CHECK(std::abs(a.value_of(n) - v) <= 1e-9 * (1 + std::abs(v)));

    for (const auto& e : eqs) {
      LinExpr d = e.lhs - e.rhs;
      double residual = d.constant;
      for (const auto& [n, c] : d.terms) residual += c * va.at(n);
      CHECK(std::abs(residual) <= 1e-9 * (1 + std::abs(d.constant)));
    }

    // A redundant combination of two equations changes nothing.
    Eq extra{eqs[0].lhs * 2 + eqs[1].lhs, eqs[0].rhs * 2 + eqs[1].rhs};
    CHECK_NOTHROW(a.assert_equal(extra.lhs, extra.rhs));
    CHECK(a.known_values() == va);
  }
}

TEST_CASE("partially determined systems") {
  EquationSystem sys;
  sys.assert_equal(var("x1") + var("w") * 0.5, var("x2"));
  sys.assert_equal(var("x1"), num(10));
  CHECK(sys.is_known("x1"));
  CHECK_FALSE(sys.is_known("x2"));
  LinExpr r = sys.reduce(var("x2") - var("w") * 0.5);
  CHECK(r.is_constant());
  CHECK(r.constant == doctest::Approx(10));
  sys.assert_equal(var("w"), num(40));
  CHECK(sys.value_of("x2") == doctest::Approx(30));
}

TEST_CASE("LinExpr arithmetic") {
  LinExpr e = var("a") * 2 + var("b") - var("a") * 2 + num(3);
  EquationSystem sys;
  LinExpr r = sys.reduce(e);
  CHECK(r.terms.size() == 1);
  CHECK(r.terms.at("b") == 1);
  CHECK(r.constant == 3);
}

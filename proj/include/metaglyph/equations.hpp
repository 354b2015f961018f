#pragma once

// Incremental solver for linear equations over named scalar unknowns, the
// way METAPOST treats `z1 = (x0 + w/2, y2)`: each new equation is reduced
// against what is already known and solved for its largest coefficient.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace metaglyph::equations {

/// Coefficients below this magnitude are treated as zero.
inline constexpr double kPivotEpsilon = 1e-9;

struct LinExpr {
  std::map<std::string, double> terms;
  double constant = 0.0;

  static LinExpr number(double v) { return {{}, v}; }
  static LinExpr variable(const std::string& name) { return {{{name, 1.0}}, 0.0}; }

  bool is_constant() const { return terms.empty(); }

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }
  LinExpr operator-() const { return *this * -1.0; }

  std::string to_string() const;
};

class InconsistentEquation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Underdetermined : public std::runtime_error {
 public:
  Underdetermined(const std::string& var, std::vector<std::string> free_vars);
  const std::vector<std::string>& free_variables() const { return free_; }

 private:
  std::vector<std::string> free_;
};

class UnknownVariable : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class EquationSystem {
 public:
  void declare(const std::string& name) { declared_.insert(name); }
  bool declared(const std::string& name) const { return declared_.contains(name); }

  /// Adds lhs == rhs. Throws InconsistentEquation when it contradicts what
  /// is already known; redundant equations are accepted silently.
  void assert_equal(const LinExpr& lhs, const LinExpr& rhs, const std::string& label = {});

  bool is_known(const std::string& name) const;
  double value_of(const std::string& name) const;

  /// Rewrites `e` in terms of the remaining free unknowns.
  LinExpr reduce(const LinExpr& e) const;

  std::map<std::string, double> known_values() const;

 private:
  void prune(LinExpr& e) const;

  std::set<std::string> declared_;
  // Eliminated unknown -> expression over free unknowns.
  std::map<std::string, LinExpr> dependent_;
};

}  // namespace metaglyph::equations

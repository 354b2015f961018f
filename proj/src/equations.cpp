#include "metaglyph/equations.hpp"

#include <cmath>
#include <sstream>

namespace metaglyph::equations {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (const auto& [name, c] : o.terms) {
    double v = (terms[name] += c);
    if (v == 0.0) terms.erase(name);
  }
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  for (const auto& [name, c] : o.terms) {
    double v = (terms[name] -= c);
    if (v == 0.0) terms.erase(name);
  }
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  if (s == 0.0) {
    terms.clear();
    constant = 0.0;
    return *this;
  }
  for (auto& [name, c] : terms) c *= s;
  constant *= s;
  return *this;
}

std::string LinExpr::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, c] : terms) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    double a = std::abs(c);
    if (a != 1.0) os << a << "*";
    os << name;
    first = false;
  }
  if (first) {
    os << constant;
  } else if (constant != 0.0) {
    os << (constant < 0 ? " - " : " + ") << std::abs(constant);
  }
  return os.str();
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) {
    if (!s.empty()) s += ", ";
    s += x;
  }
  return s;
}

}  // namespace

Underdetermined::Underdetermined(const std::string& var, std::vector<std::string> free_vars)
    : std::runtime_error("'" + var + "' is underdetermined; it depends on unknown " + join(free_vars)),
      free_(std::move(free_vars)) {}

void EquationSystem::prune(LinExpr& e) const {
  for (auto it = e.terms.begin(); it != e.terms.end();) {
    if (std::abs(it->second) < kPivotEpsilon) it = e.terms.erase(it);
    else ++it;
  }
}

LinExpr EquationSystem::reduce(const LinExpr& e) const {
  LinExpr out = LinExpr::number(e.constant);
  for (const auto& [name, c] : e.terms) {
    auto it = dependent_.find(name);
    if (it == dependent_.end()) out += LinExpr{{{name, c}}, 0.0};
    else out += it->second * c;
  }
  prune(out);
  return out;
}

void EquationSystem::assert_equal(const LinExpr& lhs, const LinExpr& rhs, const std::string& label) {
  for (const auto& [name, c] : lhs.terms) declared_.insert(name);
  for (const auto& [name, c] : rhs.terms) declared_.insert(name);

  LinExpr l = reduce(lhs), r = reduce(rhs);
  double scale = 1.0 + std::max(std::abs(l.constant), std::abs(r.constant));
  LinExpr e = l - r;
  prune(e);
  if (e.terms.empty()) {
    if (std::abs(e.constant) > kPivotEpsilon * scale) {
      std::string what = label.empty() ? lhs.to_string() + " = " + rhs.to_string() : label;
      std::ostringstream os;
      os << "inconsistent equation " << what << " (off by " << e.constant << ")";
      throw InconsistentEquation(os.str());
    }
    return;  // redundant
  }

  // Partial pivoting: solve for the largest coefficient.
  auto pivot = e.terms.begin();
  for (auto it = e.terms.begin(); it != e.terms.end(); ++it)
    if (std::abs(it->second) > std::abs(pivot->second)) pivot = it;
  const std::string var = pivot->first;
  const double coef = pivot->second;
  e.terms.erase(pivot);
  LinExpr solved = e * (-1.0 / coef);

  for (auto& [name, expr] : dependent_) {
    auto it = expr.terms.find(var);
    if (it == expr.terms.end()) continue;
    double c = it->second;
    expr.terms.erase(it);
    expr += solved * c;
    prune(expr);
  }
  dependent_[var] = std::move(solved);
}

bool EquationSystem::is_known(const std::string& name) const {
  auto it = dependent_.find(name);
  return it != dependent_.end() && it->second.terms.empty();
}

double EquationSystem::value_of(const std::string& name) const {
  auto it = dependent_.find(name);
  if (it != dependent_.end()) {
    if (it->second.terms.empty()) return it->second.constant;
    std::vector<std::string> free;
    for (const auto& [n, c] : it->second.terms) free.push_back(n);
    throw Underdetermined(name, std::move(free));
  }
  if (declared_.contains(name)) {
    // A free unknown; report the other free unknowns it is tied to.
    std::set<std::string> free{name};
    for (const auto& [dep, e] : dependent_)
      if (e.terms.contains(name))
        for (const auto& [n, c] : e.terms) free.insert(n);
    throw Underdetermined(name, {free.begin(), free.end()});
  }
  throw UnknownVariable("unknown variable '" + name + "'");
}

std::map<std::string, double> EquationSystem::known_values() const {
  std::map<std::string, double> out;
  for (const auto& [name, e] : dependent_)
    if (e.terms.empty()) out[name] = e.constant;
  return out;
}

}  // namespace metaglyph::equations

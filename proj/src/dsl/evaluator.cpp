#include "metaglyph/dsl/evaluator.hpp"

#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <variant>

#include "metaglyph/dsl/syntax.hpp"
#include "metaglyph/equations.hpp"
#include "metaglyph/pen.hpp"

namespace metaglyph::dsl {

namespace {

using equations::EquationSystem;
using equations::LinExpr;

struct Num {
  LinExpr e;
};
struct PairV {
  LinExpr x, y;
};
struct Color {
  double r = 0, g = 0, b = 0;
};
struct PathV {
  Contour c;
  hobby::PathSpec spec;
};
struct ShapeV {
  Outline contours;
};
struct PenV {
  bool square = false;
  pen::Nib nib;
  Affine shape;  // pensquare only: maps the unit square
};
struct StrV {
  std::string s;
};
using Value = std::variant<Num, PairV, Color, PathV, ShapeV, PenV, StrV>;

const char* type_name(const Value& v) {
  static const char* names[] = {"numeric", "pair", "color", "path", "shape", "pen", "string"};
  return names[v.index()];
}

struct EvalError {
  std::string message;
  Span span;
};

struct Vardef {
  std::vector<std::string> params;
  const Node* body = nullptr;
};

constexpr int kMaxCallDepth = 64;

bool coord_name(const std::string& name, char& axis, std::string& suffix) {
  if (name.size() < 2 || !std::isdigit(static_cast<unsigned char>(name[1]))) return false;
  if (name[0] != 'x' && name[0] != 'y' && name[0] != 'z') return false;
  axis = name[0];
  suffix = name.substr(1);
  return true;
}

std::string trim_statement(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ';')) s.pop_back();
  return s;
}

class Evaluator {
 public:
  Evaluator(const Program& program, const EvalOptions& opts) : program_(program), opts_(opts) {}

  GlyphResult run() {
    for (const auto& [k, v] : opts_.overrides) {
      vars_[k] = Num{LinExpr::number(v)};
      overridden_.insert(k);
      note_param(k);
    }
    try {
      for (const Node& st : program_.statements) {
        check_time(st.span);
        statement(st);
      }
    } catch (const EvalError& e) {
      result_.diagnostics.push_back({Severity::Error, e.message, e.span});
      result_.outline.clear();
      result_.strokes.clear();
    }
    finish();
    return std::move(result_);
  }

 private:
  // --- infrastructure -----------------------------------------------------
  [[noreturn]] void fail(const std::string& msg, const Span& at) const { throw EvalError{msg, at}; }

  void warn(const std::string& msg, const Span& at) {
    result_.diagnostics.push_back({Severity::Warning, msg, at});
  }

  void check_time(const Span& at) const {
    if (opts_.cancel && opts_.cancel->load(std::memory_order_relaxed)) fail("evaluation cancelled", at);
    if (opts_.deadline && std::chrono::steady_clock::now() > *opts_.deadline) fail("evaluation timed out", at);
  }

  void note_param(const std::string& name) {
    if (std::find(param_order_.begin(), param_order_.end(), name) == param_order_.end())
      param_order_.push_back(name);
  }

  bool in_prelude(const Span& at) const {
    return at.file < program_.files.size() && program_.files[at.file].starts_with("<prelude");
  }

  LinExpr unknown(const std::string& name) const { return sys_.reduce(LinExpr::variable(name)); }

  Value reduce(Value v) const {
    if (auto* n = std::get_if<Num>(&v)) n->e = sys_.reduce(n->e);
    if (auto* p = std::get_if<PairV>(&v)) {
      p->x = sys_.reduce(p->x);
      p->y = sys_.reduce(p->y);
    }
    return v;
  }

  std::string unknown_list(const LinExpr& e) const {
    std::string s;
    for (const auto& [n, c] : e.terms) s += (s.empty() ? "" : ", ") + n;
    return s;
  }

  double known(const LinExpr& e, const Node& at) const {
    if (!e.is_constant())
      fail("'" + trim_statement(print(at)) + "' is not determined; it depends on unknown " + unknown_list(e), at.span);
    if (!std::isfinite(e.constant)) fail("'" + trim_statement(print(at)) + "' is not a finite number", at.span);
    return e.constant;
  }

  template <class T>
  T& as(Value& v, const Node& at, const char* want) const {
    if (auto* p = std::get_if<T>(&v)) return *p;
    fail(std::string("expected a ") + want + " but '" + trim_statement(print(at)) + "' is a " + type_name(v), at.span);
  }

  double number(const Node& n) {
    Value v = eval(n);
    return known(as<Num>(v, n, "numeric").e, n);
  }

  Point point(const Node& n) {
    Value v = eval(n);
    auto& p = as<PairV>(v, n, "pair");
    return {known(p.x, n), known(p.y, n)};
  }

  // --- name lookup -------------------------------------------------------
  std::optional<Value> builtin(const std::string& name) const {
    auto pair = [](double x, double y) { return Value{PairV{LinExpr::number(x), LinExpr::number(y)}}; };
    if (name == "right") return pair(1, 0);
    if (name == "left") return pair(-1, 0);
    if (name == "up") return pair(0, 1);
    if (name == "down") return pair(0, -1);
    if (name == "origin") return pair(0, 0);
    if (name == "pencircle") return Value{PenV{false, pen::Nib::circle(1), {}}};
    if (name == "pensquare") return Value{PenV{true, {}, Affine::identity()}};
    if (name == "black") return Value{Color{0, 0, 0}};
    if (name == "white") return Value{Color{1, 1, 1}};
    if (name == "red") return Value{Color{1, 0, 0}};
    if (name == "green") return Value{Color{0, 1, 0}};
    if (name == "blue") return Value{Color{0, 0, 1}};
    return std::nullopt;
  }

  LinExpr coordinate(const std::string& name) {
    auto it = vars_.find(name);
    if (it != vars_.end()) {
      if (auto* n = std::get_if<Num>(&it->second)) return sys_.reduce(n->e);
    }
    return unknown(name);
  }

  Value lookup(const Node& n) {
    const std::string& name = n.text;
    for (auto f = locals_.rbegin(); f != locals_.rend(); ++f) {
      auto it = f->find(name);
      if (it != f->end()) return reduce(it->second);
    }
    if (auto it = vars_.find(name); it != vars_.end()) return reduce(it->second);
    if (auto it = vardefs_.find(name); it != vardefs_.end()) {
      if (!it->second.params.empty()) fail("macro '" + name + "' needs an argument", n.span);
      return call(it->second, {}, n);
    }
    char axis;
    std::string sfx;
    if (coord_name(name, axis, sfx)) {
      if (axis == 'z') return PairV{coordinate("x" + sfx), coordinate("y" + sfx)};
      return Num{unknown(name)};
    }
    if (auto b = builtin(name)) return *b;
    if (pair_unknowns_.contains(name)) return PairV{unknown(name + ".x"), unknown(name + ".y")};
    if (unknowns_.contains(name)) return Num{unknown(name)};
    if (auto it = declared_.find(name); it != declared_.end())
      fail(it->second + " '" + name + "' is declared but has no value", n.span);
    if (in_equation_) {
      unknowns_.insert(name);
      return Num{unknown(name)};
    }
    fail("undefined name '" + name + "'", n.span);
  }

  Value call(const Vardef& def, std::vector<Value> args, const Node& at) {
    check_time(at.span);
    if (depth_ >= kMaxCallDepth) fail("macro calls nest too deeply (recursive definition?)", at.span);
    std::map<std::string, Value> frame;
    for (std::size_t i = 0; i < def.params.size(); ++i) frame[def.params[i]] = std::move(args[i]);
    // Macro bodies see their own parameters only, not the caller's.
    struct Scope {
      Evaluator& e;
      std::vector<std::map<std::string, Value>> saved;
      ~Scope() {
        e.locals_ = std::move(saved);
        --e.depth_;
      }
    } scope{*this, std::move(locals_)};
    locals_.clear();
    locals_.push_back(std::move(frame));
    ++depth_;
    return eval(*def.body);
  }

  // --- expressions -------------------------------------------------------
  Value eval(const Node& n) {
    switch (n.kind) {
      case Kind::Number: return Num{LinExpr::number(n.number)};
      case Kind::Str: return StrV{n.text};
      case Kind::Name: return lookup(n);
      case Kind::Pair: {
        Value a = eval(n.kids[0]), b = eval(n.kids[1]);
        return PairV{as<Num>(a, n.kids[0], "numeric").e, as<Num>(b, n.kids[1], "numeric").e};
      }
      case Kind::Unary: return unary(n);
      case Kind::Binary: return binary(n);
      case Kind::Transform: return transform_value(n);
      case Kind::Call: return call_builtin(n);
      case Kind::Apply: return apply(n);
      case Kind::Of: return of(n);
      case Kind::Path: return path(n);
      default: fail("unexpected syntax in expression", n.span);
    }
  }

  Value unary(const Node& n) {
    const std::string& op = n.text;
    const Node& arg = n.kids[0];
    Value v = eval(arg);
    if (op == "-") {
      if (auto* x = std::get_if<Num>(&v)) return Num{-x->e};
      if (auto* p = std::get_if<PairV>(&v)) return PairV{-p->x, -p->y};
      fail(std::string("cannot negate a ") + type_name(v), n.span);
    }
    if (op == "xpart" || op == "ypart") {
      auto& p = as<PairV>(v, arg, "pair");
      return Num{op == "xpart" ? p.x : p.y};
    }
    if (op == "angle") {
      auto& p = as<PairV>(v, arg, "pair");
      return num(angle_of({known(p.x, arg), known(p.y, arg)}));
    }
    if (op == "unitvector") {
      auto& p = as<PairV>(v, arg, "pair");
      Point q{known(p.x, arg), known(p.y, arg)};
      if (q.length() == 0) fail("unitvector of the zero vector", n.span);
      q = q / q.length();
      return PairV{LinExpr::number(q.x), LinExpr::number(q.y)};
    }
    if (op == "length") {
      if (auto* p = std::get_if<PathV>(&v)) return num(static_cast<double>(p->c.segments.size()));
    }
    if (op == "abs" || op == "length") {
      if (auto* p = std::get_if<PairV>(&v)) return num(std::hypot(known(p->x, arg), known(p->y, arg)));
    }
    double x = known(as<Num>(v, arg, "numeric").e, arg);
    if (op == "sqrt") {
      if (x < 0) fail("sqrt of a negative number", n.span);
      return num(std::sqrt(x));
    }
    if (op == "sind") return num(std::sin(deg_to_rad(x)));
    if (op == "cosd") return num(std::cos(deg_to_rad(x)));
    if (op == "abs" || op == "length") return num(std::abs(x));
    if (op == "round") return num(std::floor(x + 0.5));
    if (op == "floor") return num(std::floor(x));
    if (op == "ceiling") return num(std::ceil(x));
    if (op == "dir") {
      Point d = dir(x);
      return PairV{LinExpr::number(d.x), LinExpr::number(d.y)};
    }
    fail("unknown operator '" + op + "'", n.span);
  }

  static Value num(double v) { return Num{LinExpr::number(v)}; }

  Value binary(const Node& n) {
    const std::string& op = n.text;
    Value a = eval(n.kids[0]), b = eval(n.kids[1]);
    auto mismatch = [&]() -> Value {
      fail(std::string("cannot apply '") + op + "' to a " + type_name(a) + " and a " + type_name(b), n.span);
    };
    if (op == "+" || op == "-") {
      double s = op == "+" ? 1.0 : -1.0;
      if (auto *x = std::get_if<Num>(&a), *y = std::get_if<Num>(&b); x && y) return Num{x->e + y->e * s};
      if (auto *x = std::get_if<PairV>(&a), *y = std::get_if<PairV>(&b); x && y)
        return PairV{x->x + y->x * s, x->y + y->y * s};
      if (auto *x = std::get_if<Color>(&a), *y = std::get_if<Color>(&b); x && y)
        return Color{x->r + s * y->r, x->g + s * y->g, x->b + s * y->b};
      return mismatch();
    }
    if (op == "*") {
      if (std::holds_alternative<Num>(b) && !std::holds_alternative<Num>(a)) std::swap(a, b);
      auto* k = std::get_if<Num>(&a);
      if (!k) return mismatch();
      if (auto* y = std::get_if<Num>(&b)) {
        if (k->e.is_constant()) return Num{y->e * k->e.constant};
        if (y->e.is_constant()) return Num{k->e * y->e.constant};
        fail("nonlinear product of two unknown quantities", n.span);
      }
      double s = known(k->e, n);
      if (auto* p = std::get_if<PairV>(&b)) return PairV{p->x * s, p->y * s};
      if (auto* c = std::get_if<Color>(&b)) return Color{c->r * s, c->g * s, c->b * s};
      return mismatch();
    }
    if (op == "/") {
      auto* d = std::get_if<Num>(&b);
      if (!d) return mismatch();
      double s = known(d->e, n.kids[1]);
      if (s == 0) fail("division by zero", n.span);
      if (auto* x = std::get_if<Num>(&a)) return Num{x->e * (1.0 / s)};
      if (auto* p = std::get_if<PairV>(&a)) return PairV{p->x * (1.0 / s), p->y * (1.0 / s)};
      return mismatch();
    }
    fail("unknown operator '" + op + "'", n.span);
  }

  Affine transform_affine(const Node& n) {
    const std::string& op = n.text;
    const Node& amount = n.kids[1];
    if (op == "xyscaled" || op == "shifted") {
      Point p = point(amount);
      return op == "shifted" ? Affine::translation(p.x, p.y) : Affine::scaling(p.x, p.y);
    }
    double k = number(amount);
    if (op == "scaled") return Affine::scaling(k, k);
    if (op == "xscaled") return Affine::scaling(k, 1);
    if (op == "yscaled") return Affine::scaling(1, k);
    if (op == "rotated") return Affine::rotation(k);
    if (op == "slanted") return Affine{1, 0, k, 1, 0, 0};
    fail("unknown transformer '" + op + "'", n.span);
  }

  Value transform_value(const Node& n) {
    Value v = eval(n.kids[0]);
    Affine m = transform_affine(n);
    if (auto* p = std::get_if<PairV>(&v))
      return PairV{p->x * m.a + p->y * m.c + LinExpr::number(m.tx), p->x * m.b + p->y * m.d + LinExpr::number(m.ty)};
    if (auto* p = std::get_if<PathV>(&v)) return PathV{transform(p->c, m), {}};
    if (auto* s = std::get_if<ShapeV>(&v)) return ShapeV{transform(s->contours, m)};
    if (auto* pen = std::get_if<PenV>(&v)) {
      Affine lin{m.a, m.b, m.c, m.d, 0, 0};
      if (pen->square) return PenV{true, {}, lin * pen->shape};
      try {
        return PenV{false, pen->nib.transformed(lin), {}};
      } catch (const std::exception& e) {
        fail(e.what(), n.span);
      }
    }
    fail(std::string("cannot transform a ") + type_name(v), n.span);
  }

  Value call_builtin(const Node& n) {
    std::vector<double> args;
    for (const Node& a : n.kids) args.push_back(number(a));
    if (n.text == "fix_nib") {
      if (args.size() != 3) fail("fix_nib takes (width, height, angle)", n.span);
      try {
        return PenV{false, pen::Nib::fixed(args[0], args[1], args[2]), {}};
      } catch (const std::exception& e) {
        fail(e.what(), n.span);
      }
    }
    if (args.empty()) fail(n.text + " needs at least one argument", n.span);
    double r = args[0];
    for (double a : args) r = n.text == "max" ? std::max(r, a) : std::min(r, a);
    return num(r);
  }

  Value apply(const Node& n) {
    auto it = vardefs_.find(n.text);
    if (it != vardefs_.end()) {
      std::vector<Value> args;
      for (const Node& a : n.kids) args.push_back(eval(a));
      if (args.size() != it->second.params.size())
        fail("macro '" + n.text + "' takes " + std::to_string(it->second.params.size()) + " argument(s)", n.span);
      return call(it->second, std::move(args), n);
    }
    const Node& arg = n.kids[0];
    if (n.kids.size() == 1 && arg.kind == Kind::Number && arg.number >= 0 && arg.number == std::floor(arg.number)) {
      Node sub = n;
      sub.kind = Kind::Name;
      sub.text = n.text + std::to_string(static_cast<long long>(arg.number));
      sub.kids.clear();
      return lookup(sub);
    }
    fail("'" + n.text + "' is not a macro", n.span);
  }

  Value of(const Node& n) {
    double t = number(n.kids[0]);
    Value v = eval(n.kids[1]);
    auto& p = as<PathV>(v, n.kids[1], "path");
    const auto segs = p.c.segments.size();
    if (segs == 0) fail("empty path", n.span);
    if (p.c.closed) t = std::fmod(std::fmod(t, double(segs)) + segs, double(segs));
    t = std::clamp(t, 0.0, double(segs));
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::floor(t)), segs - 1);
    double local = t - double(i);
    const CubicSegment& s = p.c.segments[i];
    Point r;
    if (n.text == "point") {
      r = bezier_eval(s, local);
    } else {
      r = bezier_derivative(s, local) / 3.0;
      if (r.length() == 0) r = tangent_at(s, local);
    }
    return PairV{LinExpr::number(r.x), LinExpr::number(r.y)};
  }

  Value path(const Node& n) {
    check_time(n.span);
    hobby::PathSpec spec;
    std::optional<double> pending_in;
    hobby::JointKind pending_join = hobby::JointKind::Curve;
    bool after_knot = false;
    for (const Node& item : n.kids) {
      switch (item.kind) {
        case Kind::DirSpec: {
          Point d = point(item.kids[0]);
          if (d.length() == 0) fail("direction is the zero vector", item.span);
          double a = angle_of(d);
          if (after_knot) spec.knots.back().dir_out = a;
          else pending_in = a;
          break;
        }
        case Kind::Knot: {
          Value v = eval(item.kids[0]);
          if (!std::holds_alternative<PairV>(v))
            fail(std::string("a path knot must be a pair, not a ") + type_name(v), item.span);
          hobby::Knot k;
          k.point = point(item.kids[0]);
          k.dir_in = pending_in;
          pending_in.reset();
          if (!spec.knots.empty()) spec.joints.push_back(pending_join);
          spec.knots.push_back(k);
          pending_join = hobby::JointKind::Curve;
          after_knot = true;
          break;
        }
        case Kind::Join:
          pending_join = item.text == "--"    ? hobby::JointKind::Line
                         : item.text == "---" ? hobby::JointKind::SmoothLine
                                              : hobby::JointKind::Curve;
          after_knot = false;
          break;
        case Kind::Controls:
          spec.knots.back().controls_after = std::pair{point(item.kids[0]), point(item.kids[1])};
          pending_join = hobby::JointKind::Curve;
          after_knot = false;
          break;
        case Kind::Cycle:
          spec.cyclic = true;
          spec.joints.push_back(pending_join);
          if (pending_in) {
            if (spec.knots.front().dir_in) fail("two directions given for the first knot", item.span);
            spec.knots.front().dir_in = pending_in;
          }
          break;
        default: fail("unexpected path element", item.span);
      }
    }
    std::vector<std::string> warnings;
    try {
      Contour c = hobby::solve(spec, &warnings);
      for (const auto& w : warnings) warn(w, n.span);
      return PathV{std::move(c), std::move(spec)};
    } catch (const hobby::PathError& e) {
      fail(e.what(), n.span);
    }
  }

  // --- statements --------------------------------------------------------
  void statement(const Node& st) {
    switch (st.kind) {
      case Kind::Assign: return assign(st);
      case Kind::Equation: return equation(st);
      case Kind::Declare: return declare(st);
      case Kind::Include: fail("input '" + st.text + "' was not resolved", st.span);
      case Kind::Vardef: {
        Vardef d;
        for (std::size_t i = 0; i + 1 < st.kids.size(); ++i) d.params.push_back(st.kids[i].text);
        d.body = &st.kids.back();
        vardefs_[st.text] = std::move(d);
        vars_.erase(st.text);
        return;
      }
      case Kind::Glyph: return glyph(st);
      case Kind::Pickup: {
        Value v = eval(st.kids[0]);
        current_pen_ = as<PenV>(v, st.kids[0], "pen");
        return;
      }
      case Kind::Draw:
      case Kind::Fill: return draw(st);
      case Kind::PenStroke: return stroke_statement(st);
      default: fail("unexpected statement", st.span);
    }
  }

  void assign(const Node& st) {
    const std::string& name = st.text;
    if (overridden_.contains(name)) return;
    Value v = eval(st.kids[0]);
    if (auto it = declared_.find(name); it != declared_.end()) {
      const std::string& t = it->second;
      bool fits = (t == "numeric" && std::holds_alternative<Num>(v)) ||
                  (t == "pair" && std::holds_alternative<PairV>(v)) ||
                  (t == "path" && (std::holds_alternative<PathV>(v) || std::holds_alternative<ShapeV>(v))) ||
                  (t == "pen" && std::holds_alternative<PenV>(v));
      if (!fits) fail(t + " '" + name + "' cannot hold a " + type_name(v), st.span);
    }
    char axis;
    std::string sfx;
    if (coord_name(name, axis, sfx)) {
      if (axis == 'z') {
        auto& p = as<PairV>(v, st.kids[0], "pair");
        vars_["x" + sfx] = Num{p.x};
        vars_["y" + sfx] = Num{p.y};
        return;
      }
      as<Num>(v, st.kids[0], "numeric");
    }
    vardefs_.erase(name);
    if (std::holds_alternative<Num>(v) && !in_prelude(st.span)) note_param(name);
    if (auto* p = std::get_if<PathV>(&v)) result_.paths[name] = {p->spec, p->c};
    vars_[name] = std::move(v);
  }

  void equation(const Node& st) {
    struct Flag {
      bool& f;
      ~Flag() { f = false; }
    } flag{in_equation_};
    in_equation_ = true;
    std::vector<Value> vals;
    for (const Node& k : st.kids) vals.push_back(eval(k));
    std::string label = trim_statement(print(st));
    try {
      for (std::size_t i = 1; i < vals.size(); ++i) {
        Value& a = vals[0];
        Value& b = vals[i];
        if (auto *x = std::get_if<Num>(&a), *y = std::get_if<Num>(&b); x && y) {
          sys_.assert_equal(x->e, y->e, label);
        } else if (auto *p = std::get_if<PairV>(&a), *q = std::get_if<PairV>(&b); p && q) {
          sys_.assert_equal(p->x, q->x, label + " (x part)");
          sys_.assert_equal(p->y, q->y, label + " (y part)");
        } else {
          fail(std::string("cannot equate a ") + type_name(a) + " with a " + type_name(b), st.span);
        }
      }
    } catch (const equations::InconsistentEquation& e) {
      fail(e.what(), st.span);
    }
  }

  void declare(const Node& st) {
    for (const Node& k : st.kids) {
      declared_[k.text] = st.text;
      vars_.erase(k.text);
      if (st.text == "numeric") unknowns_.insert(k.text);
      if (st.text == "pair") pair_unknowns_.insert(k.text);
    }
  }

  void glyph(const Node& st) {
    result_.name = st.text;
    for (const Node& a : st.kids) {
      const Node& e = a.kids[0];
      if (a.text == "advance") {
        result_.advance = number(e);
      } else if (e.kind == Kind::Str) {
        std::string s = e.text;
        if (s.size() > 2 && (s[0] == 'U' || s[0] == 'u') && s[1] == '+') s = s.substr(2);
        else if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s = s.substr(2);
        std::size_t used = 0;
        unsigned long cp = 0;
        try {
          cp = std::stoul(s, &used, 16);
        } catch (const std::exception&) {
          used = 0;
        }
        if (s.empty() || used != s.size() || cp > 0x10FFFF) fail("bad unicode value \"" + e.text + "\"", e.span);
        result_.unicode = static_cast<char32_t>(cp);
      } else {
        double v = number(e);
        if (v < 0 || v > 0x10FFFF || v != std::floor(v)) fail("bad unicode value", e.span);
        result_.unicode = static_cast<char32_t>(v);
      }
    }
  }

  void append(Contour c) {
    for (const auto& existing : result_.outline)
      if (existing == c) return;
    result_.outline.push_back(std::move(c));
  }

  static bool returns_to_start(const Contour& c) {
    return !c.segments.empty() && c.segments.front().p0 == c.segments.back().p1;
  }

  pen::Nib nib_of(const PenV& p, const Span& at) const {
    if (p.square) fail("pensquare is not supported for strokes; use fix_nib or pencircle", at);
    return p.nib;
  }

  Outline stroke_with(const Contour& c, const pen::Nib& nib, const std::vector<pen::NodeStyle>& styles,
                      const Span& at, pen::Envelope* keep = nullptr) {
    pen::Envelope env;
    try {
      env = pen::pen_stroke(c, nib, styles);
    } catch (const std::exception& e) {
      fail(e.what(), at);
    }
    for (const auto& w : env.warnings) warn(w, at);
    result_.strokes.push_back(c);
    Outline out = env.cyclic ? Outline{env.left, env.right.reversed()} : Outline{env.result};
    if (keep) *keep = std::move(env);
    return out;
  }

  void draw(const Node& st) {
    const bool is_fill = st.kind == Kind::Fill;
    Value v = eval(st.kids[0]);
    std::optional<PenV> pen = current_pen_;
    for (std::size_t i = 1; i < st.kids.size(); ++i) {
      const Node& opt = st.kids[i];
      Value o = eval(opt.kids[0]);
      if (opt.text == "withpen") {
        if (is_fill) fail("fill does not take a pen", opt.span);
        pen = as<PenV>(o, opt.kids[0], "pen");
      } else if (!std::holds_alternative<Color>(o) && !std::holds_alternative<Num>(o)) {
        fail(std::string("withcolor needs a color, not a ") + type_name(o), opt.span);
      }
    }
    if (auto* s = std::get_if<ShapeV>(&v)) {
      for (const auto& c : s->contours) append(c);
      return;
    }
    if (auto* p = std::get_if<PathV>(&v)) {
      Contour c = p->c;
      bool closed_like = c.closed || returns_to_start(c);
      if (is_fill && !closed_like) fail("fill needs a closed path (end it with 'cycle')", st.span);
      if (is_fill || closed_like || !pen) {
        if (closed_like) c.closed = true;
        append(std::move(c));
        return;
      }
      for (auto& out : stroke_with(c, nib_of(*pen, st.span), {}, st.span)) append(std::move(out));
      return;
    }
    if (auto* q = std::get_if<PairV>(&v); q && !is_fill) {
      Point at{known(q->x, st.kids[0]), known(q->y, st.kids[0])};
      if (!pen) fail("drawing a point needs a pen (pickup pencircle scaled ...)", st.span);
      pen::Nib nib = nib_of(*pen, st.span);
      if (nib.kind != pen::NibKind::Ellipse) fail("a razor nib cannot draw a point", st.span);
      append(ellipse(at, nib));
      return;
    }
    fail(std::string("cannot ") + (is_fill ? "fill" : "draw") + " a " + type_name(v), st.span);
  }

  static Contour ellipse(Point at, const pen::Nib& nib) {
    constexpr double k = 0.5522847498307936;
    Affine m = Affine::translation(at.x, at.y) * Affine::rotation(nib.angle) *
               Affine::scaling(nib.width / 2, nib.height / 2);
    Contour c;
    c.closed = true;
    const Point q[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int i = 0; i < 4; ++i) {
      Point a = q[i], b = q[(i + 1) % 4];
      c.segments.push_back({m.apply(a), m.apply(a + b * k), m.apply(b + a * k), m.apply(b)});
    }
    return c;
  }

  void stroke_statement(const Node& st) {
    const Node& path_node = st.kids.back();
    Value pv = eval(path_node);
    auto& p = as<PathV>(pv, path_node, "path");
    const std::size_t nodes = p.c.node_count();
    std::vector<pen::NodeStyle> styles;
    std::vector<bool> styled(nodes, false);

    for (std::size_t i = 0; i + 1 < st.kids.size(); ++i) {
      const Node& op = st.kids[i];
      if (op.text == "tip" || op.text == "ignore_directions")
        fail("'" + op.text + "' is not supported by pen_stroke", op.span);
      if (op.kids.size() != 2) fail(op.text + " needs (pen...)(nodes)", op.span);
      const Node& args = op.kids[0];
      const Node& list = op.kids[1];
      std::size_t want = op.text == "cut" ? 2 : 1;
      if (args.kids.size() != want)
        fail(op.text == "cut" ? "cut takes (pen, angle) or (pen, rel angle)" : "nib takes a single pen", args.span);
      Value penv = eval(args.kids[0]);
      pen::Nib nib = nib_of(as<PenV>(penv, args.kids[0], "pen"), args.kids[0].span);
      double angle = want == 2 ? number(args.kids[1]) : 0.0;
      for (const Node& idx : list.kids) {
        double k = number(idx);
        if (k < 0 || k != std::floor(k) || k >= double(nodes))
          fail("node " + trim_statement(print(idx)) + " is not on the path (it has " + std::to_string(nodes) +
                   " nodes)",
               idx.span);
        std::size_t node = static_cast<std::size_t>(k);
        if (styled[node]) fail("node " + std::to_string(node) + " already has a nib or cut", idx.span);
        styled[node] = true;
        if (op.text == "nib") {
          styles.push_back({node, pen::NibOverride{nib}});
        } else {
          auto mode = args.text == "rel" ? pen::CutMode::Relative : pen::CutMode::Absolute;
          styles.push_back({node, pen::CutOverride{nib, angle, mode}});
        }
      }
    }

    std::optional<pen::Nib> def;
    if (auto it = vars_.find("default_nib"); it != vars_.end() && std::holds_alternative<PenV>(it->second))
      def = nib_of(std::get<PenV>(it->second), st.span);
    else if (auto it = vardefs_.find("default_nib"); it != vardefs_.end()) {
      Value v = call(it->second, {}, st);
      def = nib_of(as<PenV>(v, st, "pen"), st.span);
    } else if (current_pen_) {
      def = nib_of(*current_pen_, st.span);
    }
    if (!def) {
      for (std::size_t k = 0; k < nodes; ++k)
        if (!styled[k])
          fail("node " + std::to_string(k) + " has no nib: pick up a pen or give it nib(...)(" + std::to_string(k) +
                   ")",
               st.span);
      def = pen::Nib::fixed(0, 0, 0);
    }

    pen::Envelope env;
    Outline out = stroke_with(p.c, *def, styles, st.span, &env);
    const std::string& r = st.text;
    if (env.cyclic) vars_[r] = ShapeV{out};
    else vars_[r] = PathV{env.result, {}};
    vars_[r + "_l"] = PathV{env.left, {}};
    vars_[r + "_r"] = PathV{env.right, {}};
    if (!env.cyclic) {
      vars_[r + "_b"] = PathV{env.begin_cap, {}};
      vars_[r + "_e"] = PathV{env.end_cap, {}};
    }
  }

  void finish() {
    for (const auto& name : param_order_) {
      auto it = vars_.find(name);
      if (it == vars_.end()) continue;
      if (auto* n = std::get_if<Num>(&it->second)) {
        LinExpr e = sys_.reduce(n->e);
        if (e.is_constant()) result_.parameters.emplace_back(name, e.constant + 0.0);
      }
    }
    std::map<std::string, double> coords = sys_.known_values();
    for (const auto& [name, v] : vars_) {
      char axis;
      std::string sfx;
      if (coord_name(name, axis, sfx) && axis != 'z')
        if (auto* n = std::get_if<Num>(&v))
          if (LinExpr e = sys_.reduce(n->e); e.is_constant()) coords[name] = e.constant;
    }
    for (const auto& [name, v] : coords) {
      char axis;
      std::string sfx;
      if (!coord_name(name, axis, sfx) || axis != 'x') continue;
      auto y = coords.find("y" + sfx);
      if (y != coords.end()) result_.points["z" + sfx] = {v + 0.0, y->second + 0.0};
    }
  }

  const Program& program_;
  const EvalOptions& opts_;
  GlyphResult result_;
  EquationSystem sys_;
  std::map<std::string, Value> vars_;
  std::map<std::string, std::string> declared_;
  std::map<std::string, Vardef> vardefs_;
  std::vector<std::map<std::string, Value>> locals_;
  std::set<std::string> overridden_, unknowns_, pair_unknowns_;
  std::vector<std::string> param_order_;
  std::optional<PenV> current_pen_;
  bool in_equation_ = false;
  int depth_ = 0;
};

}  // namespace

GlyphResult evaluate(const Program& program, const EvalOptions& options) {
  return Evaluator(program, options).run();
}

std::string Compilation::format_diagnostics() const {
  std::string out;
  for (const auto& d : diagnostics) out += format(d, program.files) + "\n";
  return out;
}

Compilation compile(std::string_view source, const std::string& file_name, const Loader& loader,
                    const EvalOptions& options) {
  Compilation c;
  ParseResult pr = parse(source, file_name);
  c.diagnostics = std::move(pr.diagnostics);
  if (has_errors(c.diagnostics)) {
    c.program = std::move(pr.program);
    return c;
  }
  c.program = resolve_includes(pr.program, loader, c.diagnostics);
  if (has_errors(c.diagnostics)) return c;
  c.glyph = evaluate(c.program, options);
  c.diagnostics.insert(c.diagnostics.end(), c.glyph.diagnostics.begin(), c.glyph.diagnostics.end());
  return c;
}

}  // namespace metaglyph::dsl

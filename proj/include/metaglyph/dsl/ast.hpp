#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace metaglyph::dsl {

struct Span {
  std::uint32_t file = 0;  // index into Program::files
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string message;
  Span span;
};

enum class Kind {
  // statements
  Assign,       // text = name, kids = {value}
  Equation,     // kids = {e0, e1, ...}, all equal
  Declare,      // text = type, kids = Name nodes
  Include,      // text = path as written
  Vardef,       // text = name, kids = {body}; params in Param nodes before body
  Param,        // text = name (vardef `expr` / `of` parameter)
  Glyph,        // text = glyph name, kids = GlyphAttr
  GlyphAttr,    // text = "unicode" | "advance", kids = {expr} or Str
  Pickup,       // kids = {pen}
  Draw,         // kids = {path, Option...}
  Fill,         // kids = {path, Option...}
  Option,       // text = "withpen" | "withcolor", kids = {expr}
  PenStroke,    // text = result name, kids = {StrokeOp..., path}
  StrokeOp,     // text = nib|cut|tip|ignore_directions, kids = {Args, Nodes}
  Args,
  Nodes,
  // expressions
  Number,
  Str,
  Name,
  Pair,         // kids = {x, y}
  Unary,        // text = op, kids = {operand}
  Binary,       // text = op, kids = {lhs, rhs}
  Transform,    // text = scaled|xscaled|..., kids = {operand, amount}
  Call,         // text = fn, kids = args
  Apply,        // text = name, kids = {arg} or {arg, of}
  Of,           // text = direction|point, kids = {t, path}
  Path,         // kids = Knot / DirSpec / Join / Controls / Cycle items
  Knot,         // kids = {point}
  DirSpec,      // text = dir|vec|right|left|up|down, kids = {} or {expr}
  Join,         // text = ".." | "--" | "---"
  Controls,     // kids = {a, b}
  Cycle,
};

struct Node {
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  std::vector<Node> kids;
  Span span;

  /// Structural equality that ignores spans.
  bool same_as(const Node& o) const;
};

struct Program {
  std::vector<std::string> files;  // display names, index = Span::file
  std::vector<Node> statements;

  bool same_as(const Program& o) const;
};

/// `file:line:col: error: message`
std::string format(const Diagnostic& d, const std::vector<std::string>& files);

bool has_errors(const std::vector<Diagnostic>& ds);

}  // namespace metaglyph::dsl

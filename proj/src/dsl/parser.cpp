#include <optional>
#include <set>
#include <stdexcept>

#include "lexer.hpp"
#include "metaglyph/dsl/syntax.hpp"

namespace metaglyph::dsl {

namespace {

const std::set<std::string, std::less<>> kReserved = {
    "beginfig", "endfig", "end", "input", "glyph", "path", "pen", "pair", "numeric", "vardef",
    "enddef", "of", "pickup", "draw", "fill", "withpen", "withcolor", "pen_stroke", "controls",
    "and", "tension", "curl", "cycle", "for", "forever", "endfor", "if", "fi", "def", "save",
    "scaled", "xscaled", "yscaled", "xyscaled", "rotated", "shifted", "slanted",
    "direction", "point", "sqrt", "sind", "cosd", "abs", "angle", "dir", "xpart", "ypart",
    "round", "floor", "ceiling", "length", "unitvector", "fix_nib", "max", "min"};

const std::set<std::string, std::less<>> kTransformers = {"scaled", "xscaled", "yscaled", "xyscaled",
                                                          "rotated", "shifted", "slanted"};
const std::set<std::string, std::less<>> kUnaryOps = {"sqrt", "sind", "cosd", "abs", "angle",
                                                      "dir", "xpart", "ypart", "round", "floor",
                                                      "ceiling", "length", "unitvector"};
const std::set<std::string, std::less<>> kFunctions = {"fix_nib", "max", "min"};
const std::set<std::string, std::less<>> kStrokeOps = {"nib", "cut", "tip", "ignore_directions"};

struct ParseError {
  std::string message;
  Span span;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags) : toks_(std::move(toks)), diags_(diags) {}

  std::vector<Node> program() {
    std::vector<Node> out;
    while (!at_end()) {
      try {
        statement(out);
      } catch (const ParseError& e) {
        diags_.push_back({Severity::Error, e.message, e.span});
        synchronize();
      }
    }
    return out;
  }

 private:
  // --- token helpers ---------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& ahead(std::size_t k = 1) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == Tok::End; }
  bool is_sym(std::string_view s) const { return cur().kind == Tok::Symbol && cur().text == s; }
  bool is_name(std::string_view s) const { return cur().kind == Tok::Name && cur().text == s; }
  static bool reserved(std::string_view s) { return kReserved.contains(s); }

  Token take() {
    Token t = cur();
    if (!at_end()) ++pos_;
    last_ = t;
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError{msg, cur().span}; }
  [[noreturn]] void fail_at(const std::string& msg, Span s) const { throw ParseError{msg, s}; }

  std::string describe(const Token& t) const {
    switch (t.kind) {
      case Tok::End: return "end of input";
      case Tok::Number: return "number " + t.text;
      case Tok::String: return "string \"" + t.text + "\"";
      default: return "'" + t.text + "'";
    }
  }

  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("expected '" + std::string(s) + "' but found " + describe(cur()));
    take();
  }
  void expect_name(std::string_view s) {
    if (!is_name(s)) fail("expected '" + std::string(s) + "' but found " + describe(cur()));
    take();
  }
  Token expect_identifier(const char* what) {
    if (cur().kind != Tok::Name || reserved(cur().text))
      fail(std::string("expected ") + what + " but found " + describe(cur()));
    return take();
  }
  void end_statement() {
    if (at_end()) return;  // a missing final ';' is tolerated
    if (!is_sym(";")) fail("expected ';' but found " + describe(cur()));
    take();
  }

  void synchronize() {
    while (!at_end()) {
      if (is_sym(";")) {
        take();
        return;
      }
      take();
    }
  }

  Node make(Kind k, const Token& start, std::string text = {}) {
    Node n;
    n.kind = k;
    n.text = std::move(text);
    n.span = start.span;
    return n;
  }
  // Extends n's span to the end of the most recently consumed token.
  Node& close(Node& n) {
    if (last_.span.file == n.span.file && last_.span.offset + last_.span.length >= n.span.offset)
      n.span.length = last_.span.offset + last_.span.length - n.span.offset;
    return n;
  }

  // --- statements --------------------------------------------------------
  void statement(std::vector<Node>& out) {
    if (is_sym(";")) {
      take();
      return;
    }
    const Token start = cur();
    if (start.kind == Tok::Name) {
      const std::string& w = start.text;
      if (w == "beginfig") {
        take();
        if (is_sym("(")) {
          take();
          expression();
          expect_sym(")");
        }
        end_statement();
        return;
      }
      if (w == "endfig" || w == "end") {
        take();
        end_statement();
        return;
      }
      if (w == "input") {
        take();
        if (cur().kind != Tok::RawPath) fail("expected a file name after 'input'");
        Node n = make(Kind::Include, start, take().text);
        out.push_back(close(n));
        end_statement();
        return;
      }
      if (w == "glyph") return out.push_back(glyph());
      if (w == "path" || w == "pen" || w == "pair" || w == "numeric") return out.push_back(declaration());
      if (w == "vardef") return out.push_back(vardef());
      if (w == "pickup") {
        take();
        Node n = make(Kind::Pickup, start);
        n.kids.push_back(expression());
        close(n);
        end_statement();
        return out.push_back(std::move(n));
      }
      if (w == "draw" || w == "fill") return out.push_back(draw_or_fill());
      if (w == "pen_stroke") return out.push_back(pen_stroke());
      if (w == "for" || w == "forever" || w == "if" || w == "def") return skip_block(w);
      if (w == "save" || w == "tension" || w == "curl")
        fail("'" + w + "' is not supported");
    }

    Node first = expression();
    if (is_sym(":=")) {
      take();
      if (first.kind != Kind::Name) fail_at("only a plain name can be assigned with ':='", first.span);
      Node n = make(Kind::Assign, start, first.text);
      n.kids.push_back(expression());
      close(n);
      end_statement();
      return out.push_back(std::move(n));
    }
    if (is_sym("=")) {
      Node n = make(Kind::Equation, start);
      n.kids.push_back(std::move(first));
      while (is_sym("=")) {
        take();
        n.kids.push_back(expression());
      }
      close(n);
      end_statement();
      return out.push_back(std::move(n));
    }
    fail_at("expected ':=' or '=' after expression (a bare expression is not a statement)", first.span);
  }

  void skip_block(const std::string& w) {
    Token start = take();
    std::string closer = w == "if" ? "fi" : w == "def" ? "enddef" : "endfor";
    std::size_t depth = 1;
    while (!at_end() && depth > 0) {
      if (cur().kind == Tok::Name && cur().text == w) ++depth;
      if (cur().kind == Tok::Name && cur().text == closer) --depth;
      take();
    }
    if (is_sym(";")) take();
    std::string what = w == "if" ? "conditionals" : w == "def" ? "macro definitions" : "loops";
    diags_.push_back({Severity::Error, "'" + w + "': " + what + " are not part of the language", start.span});
  }

  Node glyph() {
    Token start = take();
    if (cur().kind != Tok::String) fail("expected the glyph name as a string");
    Node n = make(Kind::Glyph, start, take().text);
    while (is_name("unicode") || is_name("advance")) {
      Token at = take();
      Node a = make(Kind::GlyphAttr, at, at.text);
      if (cur().kind == Tok::String) {
        Node s = make(Kind::Str, cur(), cur().text);
        take();
        a.kids.push_back(std::move(s));
      } else {
        a.kids.push_back(expression());
      }
      n.kids.push_back(close(a));
    }
    close(n);
    end_statement();
    return n;
  }

  Node declaration() {
    Token start = take();
    Node n = make(Kind::Declare, start, start.text);
    do {
      Token id = expect_identifier("a variable name");
      n.kids.push_back(make(Kind::Name, id, id.text));
    } while (is_sym(",") && (take(), true));
    close(n);
    end_statement();
    return n;
  }

  Node vardef() {
    Token start = take();
    Token name = expect_identifier("a macro name");
    Node n = make(Kind::Vardef, start, name.text);
    if (is_sym("(")) fail("parenthesised macro parameters are not supported; use 'expr NAME [of NAME]'");
    if (is_name("expr")) {
      take();
      Token p = expect_identifier("a parameter name");
      n.kids.push_back(make(Kind::Param, p, p.text));
      if (is_name("of")) {
        take();
        Token q = expect_identifier("a parameter name");
        n.kids.push_back(make(Kind::Param, q, q.text));
      }
    }
    expect_sym("=");
    n.kids.push_back(expression());
    expect_name("enddef");
    close(n);
    end_statement();
    return n;
  }

  Node draw_or_fill() {
    Token start = take();
    Node n = make(start.text == "draw" ? Kind::Draw : Kind::Fill, start);
    n.kids.push_back(expression());
    while (is_name("withpen") || is_name("withcolor")) {
      Token o = take();
      Node opt = make(Kind::Option, o, o.text);
      opt.kids.push_back(expression());
      n.kids.push_back(close(opt));
    }
    close(n);
    end_statement();
    return n;
  }

  std::vector<Node> expression_list(Node* args_for_rel) {
    std::vector<Node> items;
    expect_sym("(");
    if (!is_sym(")")) {
      do {
        if (args_for_rel && is_name("rel")) {
          take();
          args_for_rel->text = "rel";
          if (items.empty()) fail("'rel' applies to the cut angle, the second argument");
        }
        items.push_back(expression());
      } while (is_sym(",") && (take(), true));
    }
    expect_sym(")");
    return items;
  }

  Node pen_stroke() {
    Token start = take();
    Node n = make(Kind::PenStroke, start);
    if (!is_sym("(")) fail("expected '(' after pen_stroke");
    bool has_opts = ahead().kind == Tok::Symbol ? ahead().text == ")"
                                                 : ahead().kind == Tok::Name && kStrokeOps.contains(ahead().text) &&
                                                       ahead(2).kind == Tok::Symbol && ahead(2).text == "(";
    if (has_opts) {
      take();
      while (!is_sym(")")) {
        if (is_sym(";") || is_sym(",")) {
          take();
          continue;
        }
        if (cur().kind != Tok::Name || !kStrokeOps.contains(cur().text))
          fail("expected nib, cut, tip or ignore_directions but found " + describe(cur()));
        Token op = take();
        Node o = make(Kind::StrokeOp, op, op.text);
        while (is_sym("(")) {
          Node args = make(Kind::Args, cur());
          args.kids = expression_list(op.text == "cut" ? &args : nullptr);
          o.kids.push_back(close(args));
        }
        n.kids.push_back(close(o));
      }
      take();
    }
    expect_sym("(");
    n.kids.push_back(expression());
    expect_sym(")");
    expect_sym("(");
    n.text = expect_identifier("a result name").text;
    expect_sym(")");
    close(n);
    end_statement();
    return n;
  }

  // --- expressions ----------------------------------------------------
  bool join_ahead() const {
    return cur().kind == Tok::Symbol &&
           (cur().text == ".." || cur().text == "--" || cur().text == "---" || cur().text == "..." ||
            cur().text == "&");
  }

  Node expression() {
    const Token start = cur();
    std::optional<Node> pre;
    if (is_sym("{")) pre = dirspec();
    Node first = tertiary();
    if (!pre && !is_sym("{") && !join_ahead()) return first;
    return path(start, std::move(pre), std::move(first));
  }

  Node dirspec() {
    Token open = take();
    Node d = make(Kind::DirSpec, open);
    if (is_name("curl") || is_name("tension")) fail("'" + cur().text + "' is not supported in paths");
    d.kids.push_back(expression());
    expect_sym("}");
    return close(d);
  }

  Node path(const Token& start, std::optional<Node> pre, Node first) {
    Node p = make(Kind::Path, start);
    if (pre) p.kids.push_back(std::move(*pre));
    Node k = make(Kind::Knot, start);
    k.span = first.span;
    k.kids.push_back(std::move(first));
    p.kids.push_back(std::move(k));
    while (true) {
      if (is_sym("{")) p.kids.push_back(dirspec());
      if (!join_ahead()) break;
      Token j = take();
      if (j.text == "&") fail_at("path concatenation with '&' is not supported", j.span);
      if (j.text == "...") fail_at("'...' is not supported; use '..'", j.span);
      if (j.text == ".." && (is_name("tension") || is_name("curl")))
        fail("'" + cur().text + "' is not supported in paths");
      if (j.text == ".." && is_name("controls")) {
        Node c = make(Kind::Controls, j);
        take();
        Node a = tertiary();
        Node b = a;
        if (is_name("and")) {
          take();
          b = tertiary();
        }
        c.kids.push_back(std::move(a));
        c.kids.push_back(std::move(b));
        if (!is_sym("..")) fail("expected '..' after the control points");
        take();
        p.kids.push_back(close(c));
      } else {
        p.kids.push_back(make(Kind::Join, j, j.text));
      }
      if (is_sym("{")) p.kids.push_back(dirspec());
      if (is_name("cycle")) {
        p.kids.push_back(make(Kind::Cycle, take()));
        break;
      }
      Node knot = tertiary();
      Node kn = make(Kind::Knot, cur());
      kn.span = knot.span;
      kn.kids.push_back(std::move(knot));
      p.kids.push_back(std::move(kn));
    }
    return close(p);
  }

  Node tertiary() {
    const Token start = cur();
    Node lhs = secondary();
    while (is_sym("+") || is_sym("-")) {
      Token op = take();
      Node b = make(Kind::Binary, start, op.text);
      b.kids.push_back(std::move(lhs));
      b.kids.push_back(secondary());
      lhs = std::move(close(b));
    }
    return lhs;
  }

  Node secondary() {
    const Token start = cur();
    Node lhs = primary();
    while (true) {
      if (is_sym("*") || is_sym("/")) {
        Token op = take();
        Node b = make(Kind::Binary, start, op.text);
        b.kids.push_back(std::move(lhs));
        b.kids.push_back(primary());
        lhs = std::move(close(b));
      } else if (cur().kind == Tok::Name && kTransformers.contains(cur().text)) {
        Token op = take();
        Node t = make(Kind::Transform, start, op.text);
        t.kids.push_back(std::move(lhs));
        t.kids.push_back(primary());
        lhs = std::move(close(t));
      } else {
        return lhs;
      }
    }
  }

  // Tokens that may start an argument for `name arg` application or an
  // implicit product such as `1.25u`.
  bool starts_operand() const {
    if (cur().kind == Tok::Number) return true;
    if (cur().kind == Tok::Name) return !reserved(cur().text) || kUnaryOps.contains(cur().text);
    return false;
  }

  Node primary() {
    const Token start = cur();
    if (cur().kind == Tok::Number) {
      Node n = make(Kind::Number, take());
      n.number = start.number;
      // `2/3` binds as a single fraction.
      if (is_sym("/") && ahead().kind == Tok::Number) {
        take();
        Node d = make(Kind::Number, take());
        d.number = last_.number;
        Node f = make(Kind::Binary, start, "/");
        f.kids.push_back(std::move(n));
        f.kids.push_back(std::move(d));
        n = std::move(close(f));
      }
      if (starts_operand() && cur().kind == Tok::Name) {
        Node m = make(Kind::Binary, start, "*");
        m.kids.push_back(std::move(n));
        m.kids.push_back(primary());
        return close(m);
      }
      if (is_sym("(")) {
        Node m = make(Kind::Binary, start, "*");
        m.kids.push_back(std::move(n));
        m.kids.push_back(primary());
        return close(m);
      }
      return n;
    }
    if (cur().kind == Tok::String) fail("a string is not allowed here");
    if (is_sym("(")) {
      take();
      Node a = expression();
      if (is_sym(",")) {
        take();
        Node p = make(Kind::Pair, start);
        p.kids.push_back(std::move(a));
        p.kids.push_back(expression());
        expect_sym(")");
        return close(p);
      }
      expect_sym(")");
      return a;
    }
    if (is_sym("-") || is_sym("+")) {
      Token op = take();
      Node operand = primary();
      if (op.text == "+") return operand;
      Node u = make(Kind::Unary, start, "-");
      u.kids.push_back(std::move(operand));
      return close(u);
    }
    if (is_sym("[")) fail("subscripts like z[i] are not supported; write z0, z1, ...");
    if (cur().kind != Tok::Name) fail("expected an expression but found " + describe(cur()));

    const std::string w = cur().text;
    if (kUnaryOps.contains(w)) {
      take();
      Node u = make(Kind::Unary, start, w);
      u.kids.push_back(primary());
      return close(u);
    }
    if (w == "direction" || w == "point") {
      take();
      Node o = make(Kind::Of, start, w);
      o.kids.push_back(tertiary());
      expect_name("of");
      o.kids.push_back(primary());
      return close(o);
    }
    if (kFunctions.contains(w)) {
      take();
      Node c = make(Kind::Call, start, w);
      c.kids = expression_list(nullptr);
      return close(c);
    }
    if (w == "cycle") fail("'cycle' may only end a path");
    if (reserved(w)) fail("unexpected '" + w + "'");
    take();
    if (is_sym("(")) {
      std::vector<Node> args = expression_list(nullptr);
      if (args.size() != 1) fail_at("'" + w + "' takes a single argument", start.span);
      return apply(start, w, std::move(args.front()));
    }
    if (starts_operand()) return apply(start, w, primary());
    return make(Kind::Name, start, w);
  }

  Node apply(const Token& start, const std::string& name, Node arg) {
    Node a = make(Kind::Apply, start, name);
    a.kids.push_back(std::move(arg));
    if (is_name("of")) {
      take();
      a.kids.push_back(primary());
    }
    return close(a);
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  Token last_;
};

}  // namespace

ParseResult parse(std::string_view source, const std::string& file_name) {
  ParseResult r;
  r.program.files.push_back(file_name);
  std::vector<Token> toks = lex(source, 0, r.diagnostics);
  Parser p(std::move(toks), r.diagnostics);
  r.program.statements = p.program();
  return r;
}

}  // namespace metaglyph::dsl

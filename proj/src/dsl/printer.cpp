#include <charconv>
#include <sstream>

#include "metaglyph/dsl/syntax.hpp"

namespace metaglyph::dsl {

namespace {

// Shortest fixed-notation text that reads back as the same double.
std::string number_text(double v) {
  char buf[512];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  return std::string(buf, r.ptr);
}

bool atomic(const Node& n) {
  return n.kind == Kind::Number || n.kind == Kind::Name || n.kind == Kind::Pair || n.kind == Kind::Str ||
         n.kind == Kind::Call;
}

void expr(std::ostream& os, const Node& n);

void operand(std::ostream& os, const Node& n) {
  if (atomic(n)) return expr(os, n);
  os << '(';
  expr(os, n);
  os << ')';
}

void list(std::ostream& os, const std::vector<Node>& items, std::size_t from = 0) {
  os << '(';
  for (std::size_t i = from; i < items.size(); ++i) {
    if (i > from) os << ", ";
    expr(os, items[i]);
  }
  os << ')';
}

void expr(std::ostream& os, const Node& n) {
  switch (n.kind) {
    case Kind::Number: os << number_text(n.number); break;
    case Kind::Str: os << '"' << n.text << '"'; break;
    case Kind::Name: os << n.text; break;
    case Kind::Pair:
      os << '(';
      expr(os, n.kids[0]);
      os << ", ";
      expr(os, n.kids[1]);
      os << ')';
      break;
    case Kind::Unary:
      os << n.text;
      if (n.text != "-") os << ' ';
      operand(os, n.kids[0]);
      break;
    case Kind::Binary:
    case Kind::Transform:
      operand(os, n.kids[0]);
      os << ' ' << n.text << ' ';
      operand(os, n.kids[1]);
      break;
    case Kind::Call:
      os << n.text;
      list(os, n.kids);
      break;
    case Kind::Apply:
      os << n.text << '(';
      expr(os, n.kids[0]);
      os << ')';
      if (n.kids.size() > 1) {
        os << " of ";
        operand(os, n.kids[1]);
      }
      break;
    case Kind::Of:
      os << n.text << ' ';
      operand(os, n.kids[0]);
      os << " of ";
      operand(os, n.kids[1]);
      break;
    case Kind::Path:
      for (const Node& item : n.kids) {
        switch (item.kind) {
          case Kind::Knot: operand(os, item.kids[0]); break;
          case Kind::DirSpec:
            os << '{';
            expr(os, item.kids[0]);
            os << '}';
            break;
          case Kind::Join: os << ' ' << item.text << ' '; break;
          case Kind::Controls:
            os << " ..controls ";
            operand(os, item.kids[0]);
            os << " and ";
            operand(os, item.kids[1]);
            os << ".. ";
            break;
          case Kind::Cycle: os << "cycle"; break;
          default: break;
        }
      }
      break;
    default: os << "<?>"; break;
  }
}

void statement(std::ostream& os, const Node& s) {
  switch (s.kind) {
    case Kind::Assign:
      os << s.text << " := ";
      expr(os, s.kids[0]);
      break;
    case Kind::Equation:
      for (std::size_t i = 0; i < s.kids.size(); ++i) {
        if (i) os << " = ";
        expr(os, s.kids[i]);
      }
      break;
    case Kind::Declare:
      os << s.text << ' ';
      for (std::size_t i = 0; i < s.kids.size(); ++i) os << (i ? ", " : "") << s.kids[i].text;
      break;
    case Kind::Include: os << "input " << s.text; break;
    case Kind::Vardef:
      os << "vardef " << s.text;
      for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) os << (i == 0 ? " expr " : " of ") << s.kids[i].text;
      os << " = ";
      expr(os, s.kids.back());
      os << " enddef";
      break;
    case Kind::Glyph:
      os << "glyph \"" << s.text << '"';
      for (const Node& a : s.kids) {
        os << ' ' << a.text << ' ';
        expr(os, a.kids[0]);
      }
      break;
    case Kind::Pickup:
      os << "pickup ";
      expr(os, s.kids[0]);
      break;
    case Kind::Draw:
    case Kind::Fill:
      os << (s.kind == Kind::Draw ? "draw " : "fill ");
      expr(os, s.kids[0]);
      for (std::size_t i = 1; i < s.kids.size(); ++i) {
        os << ' ' << s.kids[i].text << ' ';
        expr(os, s.kids[i].kids[0]);
      }
      break;
    case Kind::PenStroke: {
      os << "pen_stroke(";
      for (std::size_t i = 0; i + 1 < s.kids.size(); ++i) {
        const Node& op = s.kids[i];
        os << (i ? "\n    " : "") << op.text;
        for (const Node& args : op.kids) {
          os << '(';
          for (std::size_t k = 0; k < args.kids.size(); ++k) {
            if (k) os << ", ";
            if (k == 1 && args.text == "rel") os << "rel ";
            expr(os, args.kids[k]);
          }
          os << ')';
        }
      }
      os << ")(";
      expr(os, s.kids.back());
      os << ")(" << s.text << ')';
      break;
    }
    default: os << "% <?>"; break;
  }
  os << ";\n";
}

}  // namespace

std::string print(const Node& node) {
  std::ostringstream os;
  if (node.kind >= Kind::Number) expr(os, node);
  else statement(os, node);
  return os.str();
}

std::string print(const Program& program) {
  std::ostringstream os;
  for (const Node& s : program.statements) statement(os, s);
  return os.str();
}

}  // namespace metaglyph::dsl

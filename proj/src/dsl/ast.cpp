#include <algorithm>

#include "metaglyph/dsl/ast.hpp"

namespace metaglyph::dsl {

bool Node::same_as(const Node& o) const {
  if (kind != o.kind || number != o.number || text != o.text || kids.size() != o.kids.size()) return false;
  for (std::size_t i = 0; i < kids.size(); ++i)
    if (!kids[i].same_as(o.kids[i])) return false;
  return true;
}

bool Program::same_as(const Program& o) const {
  if (statements.size() != o.statements.size()) return false;
  for (std::size_t i = 0; i < statements.size(); ++i)
    if (!statements[i].same_as(o.statements[i])) return false;
  return true;
}

std::string format(const Diagnostic& d, const std::vector<std::string>& files) {
  std::string file = d.span.file < files.size() ? files[d.span.file] : "<input>";
  return file + ":" + std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + ": " +
         (d.severity == Severity::Error ? "error" : "warning") + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& ds) {
  return std::any_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace metaglyph::dsl

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metaglyph/dsl/ast.hpp"

namespace metaglyph::dsl {

struct ParseResult {
  Program program;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

/// Parses one source file. On a syntax error the parser reports it, skips
/// to the next `;` and carries on, so one pass finds several errors.
ParseResult parse(std::string_view source, const std::string& file_name = "<input>");

/// Source text that parses back to the same program (spans aside).
std::string print(const Program& program);
std::string print(const Node& node);

}  // namespace metaglyph::dsl

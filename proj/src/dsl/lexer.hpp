#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "metaglyph/dsl/ast.hpp"

namespace metaglyph::dsl {

enum class Tok { Number, Name, String, Symbol, RawPath, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // symbol text, name, string contents or raw path
  double number = 0.0;
  Span span;
};

/// Splits `source` into tokens. The word after `input` is returned as a
/// single RawPath token. Problems are appended to `diags`; the lexer never
/// stops early.
std::vector<Token> lex(std::string_view source, std::uint32_t file, std::vector<Diagnostic>& diags);

}  // namespace metaglyph::dsl

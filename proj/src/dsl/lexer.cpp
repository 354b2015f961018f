#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace metaglyph::dsl {

namespace {

class Lexer {
 public:
  Lexer(std::string_view src, std::uint32_t file, std::vector<Diagnostic>& diags)
      : src_(src), file_(file), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) break;
      Token t = next();
      if (t.kind == Tok::End) continue;  // unrecognised input, already reported
      bool is_input = t.kind == Tok::Name && t.text == "input";
      out.push_back(std::move(t));
      if (is_input) {
        Token path = raw_path();
        if (!path.text.empty()) out.push_back(std::move(path));
      }
    }
    Token end;
    end.kind = Tok::End;
    end.span = here(0);
    out.push_back(end);
    return out;
  }

 private:
  Span here(std::size_t length) const {
    return {file_, static_cast<std::uint32_t>(pos_), static_cast<std::uint32_t>(length), line_, col_};
  }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i) {
      unsigned char c = src_[pos_++];
      if (c == '\n') {
        ++line_;
        col_ = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col_;  // count code points, not bytes
      }
    }
  }

  char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void report(Severity sev, std::string msg, Span span) { diags_.push_back({sev, std::move(msg), span}); }

  Token raw_path() {
    while (peek() == ' ' || peek() == '\t') advance();
    Token t;
    t.kind = Tok::RawPath;
    t.span = here(0);
    std::size_t start = pos_;
    while (pos_ < src_.size() && peek() != ';' && peek() != '\n' && peek() != '%') advance();
    std::string_view text = src_.substr(start, pos_ - start);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    t.text = std::string(text);
    t.span.length = static_cast<std::uint32_t>(text.size());
    return t;
  }

  Token next() {
    Token t;
    t.span = here(0);
    std::size_t start = pos_;
    char c = peek();
    auto finish = [&](Tok kind) {
      t.kind = kind;
      t.span.length = static_cast<std::uint32_t>(pos_ - start);
      return t;
    };

    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      std::string_view digits = src_.substr(start, pos_ - start);
      std::string buf(digits);
      if (buf.front() == '.') buf.insert(buf.begin(), '0');
      std::from_chars(buf.data(), buf.data() + buf.size(), t.number);
      t.text = std::string(digits);
      return finish(Tok::Number);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      t.text = std::string(src_.substr(start, pos_ - start));
      return finish(Tok::Name);
    }
    if (c == '"') {
      advance();
      while (pos_ < src_.size() && peek() != '"' && peek() != '\n') advance();
      if (peek() != '"') {
        report(Severity::Error, "unterminated string", here(0));
        t.text = std::string(src_.substr(start + 1, pos_ - start - 1));
        return finish(Tok::String);
      }
      t.text = std::string(src_.substr(start + 1, pos_ - start - 1));
      advance();
      return finish(Tok::String);
    }
    // Dashes pasted from typeset listings.
    for (std::string_view dash : {"\xE2\x80\x94", "\xE2\x80\x93"}) {
      if (starts_with(dash)) {
        advance(dash.size());
        t.text = "--";
        Token out = finish(Tok::Symbol);
        report(Severity::Warning, "typographic dash read as '--'", out.span);
        return out;
      }
    }
    for (std::string_view sym : {":=", "---", "...", "--", ".."}) {
      if (starts_with(sym)) {
        advance(sym.size());
        t.text = std::string(sym);
        return finish(Tok::Symbol);
      }
    }
    if (std::string_view("=,;(){}[]+-*/&:<>").find(c) != std::string_view::npos) {
      advance();
      t.text = std::string(1, c);
      return finish(Tok::Symbol);
    }
    // Unknown byte or code point: report once and skip it.
    std::size_t len = 1;
    unsigned char uc = static_cast<unsigned char>(c);
    if (uc >= 0xF0) len = 4;
    else if (uc >= 0xE0) len = 3;
    else if (uc >= 0xC0) len = 2;
    Span s = here(len);
    std::string what(src_.substr(start, len));
    advance(len);
    report(Severity::Error, "unexpected character '" + what + "'", s);
    t.kind = Tok::End;
    return t;
  }

  std::string_view src_;
  std::uint32_t file_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view source, std::uint32_t file, std::vector<Diagnostic>& diags) {
  return Lexer(source, file, diags).run();
}

}  // namespace metaglyph::dsl

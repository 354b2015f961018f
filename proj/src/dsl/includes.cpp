#include "metaglyph/dsl/includes.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "metaglyph/dsl/prelude.hpp"
#include "metaglyph/dsl/syntax.hpp"

namespace fs = std::filesystem;

namespace metaglyph::dsl {

namespace {

constexpr int kMaxDepth = 64;
constexpr const char* kPreludeFile = "<prelude plain_ex>";

fs::path with_extension(const std::string& written) {
  fs::path p(written);
  if (!p.has_extension()) p += ".mpg";
  return p;
}

bool read_file(const fs::path& p, std::string& out) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) return false;
  std::ifstream in(p, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

void splice(const Program& src, Program& dst, const Loader& loader, std::vector<Diagnostic>& diags,
            std::vector<std::string>& stack, std::uint32_t file_offset) {
  for (const Node& st : src.statements) {
    if (st.kind != Kind::Include) {
      Node copy = st;
      if (file_offset) {
        std::function<void(Node&)> shift = [&](Node& n) {
          n.span.file += file_offset;
          for (Node& k : n.kids) shift(k);
        };
        shift(copy);
      }
      dst.statements.push_back(std::move(copy));
      continue;
    }
    Span at = st.span;
    at.file += file_offset;
    const std::string& from = stack.back();
    if (stack.size() > kMaxDepth) {
      diags.push_back({Severity::Error, "input nesting is too deep", at});
      continue;
    }
    SourceFile sf;
    try {
      sf = loader(st.text, from);
    } catch (const IncludeError& e) {
      diags.push_back({Severity::Error, e.what(), at});
      continue;
    }
    if (std::find(stack.begin(), stack.end(), sf.name) != stack.end()) {
      std::string chain;
      for (const auto& s : stack) chain += s + " -> ";
      diags.push_back({Severity::Error, "input cycle: " + chain + sf.name, at});
      continue;
    }
    ParseResult pr = parse(sf.text, sf.name);
    auto offset = static_cast<std::uint32_t>(dst.files.size());
    dst.files.push_back(sf.name);
    for (Diagnostic d : pr.diagnostics) {
      d.span.file += offset;
      diags.push_back(std::move(d));
    }
    stack.push_back(sf.name);
    splice(pr.program, dst, loader, diags, stack, offset);
    stack.pop_back();
  }
}

}  // namespace

Loader prelude_loader() {
  return [](const std::string& written, const std::string&) -> SourceFile {
    if (written == kPreludeName) return {kPreludeFile, std::string(prelude_source())};
    throw IncludeError("cannot find input file '" + written + "'");
  };
}

Loader file_loader(std::vector<fs::path> roots) {
  return [roots = std::move(roots)](const std::string& written, const std::string& from) -> SourceFile {
    fs::path rel = with_extension(written);
    std::vector<fs::path> candidates;
    if (rel.is_absolute()) {
      candidates.push_back(rel);
    } else {
      fs::path base = fs::path(from).parent_path();
      if (!from.empty() && from.front() != '<') candidates.push_back(base / rel);
      for (const auto& r : roots) candidates.push_back(r / rel);
    }
    for (const auto& c : candidates) {
      std::string text;
      if (read_file(c, text)) {
        std::error_code ec;
        fs::path canon = fs::weakly_canonical(c, ec);
        return {(ec ? c : canon).string(), std::move(text)};
      }
    }
    if (written == kPreludeName) return {kPreludeFile, std::string(prelude_source())};
    throw IncludeError("cannot find input file '" + written + "'");
  };
}

Loader memory_loader(std::map<std::string, std::string> files) {
  return [files = std::move(files)](const std::string& written, const std::string& from) -> SourceFile {
    fs::path rel = with_extension(written);
    fs::path base = from.empty() || from.front() == '<' ? fs::path() : fs::path(from).parent_path();
    for (fs::path cand : {(base / rel).lexically_normal(), rel.lexically_normal()}) {
      auto it = files.find(cand.generic_string());
      if (it != files.end()) return {it->first, it->second};
    }
    if (written == kPreludeName) return {kPreludeFile, std::string(prelude_source())};
    throw IncludeError("cannot find input file '" + written + "'");
  };
}

Program resolve_includes(const Program& program, const Loader& loader, std::vector<Diagnostic>& diags) {
  Program out;
  out.files = program.files;
  std::vector<std::string> stack{program.files.empty() ? std::string("<input>") : program.files.front()};
  splice(program, out, loader, diags, stack, 0);
  return out;
}

}  // namespace metaglyph::dsl

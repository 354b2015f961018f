#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "metaglyph/dsl/ast.hpp"

namespace metaglyph::dsl {

struct SourceFile {
  std::string name;  // canonical; used for cycle detection and diagnostics
  std::string text;
};

class IncludeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps `input <written>` seen in file `from` to a source. Throws
/// IncludeError when nothing matches. Must be safe to call concurrently.
using Loader = std::function<SourceFile(const std::string& written, const std::string& from)>;

/// Resolves `plain_ex` only.
Loader prelude_loader();

/// Looks next to the including file first, then in each of `roots`.
/// `.mpg` is appended when the name has no extension. `plain_ex` is the
/// built-in prelude unless a file of that name is found.
Loader file_loader(std::vector<std::filesystem::path> roots = {});

/// In-memory files keyed by path ("config/Regular.mpg"); relative names
/// resolve against the including file's directory.
Loader memory_loader(std::map<std::string, std::string> files);

/// Replaces every Include statement with the statements of the included
/// file, recursively. Cycles, missing files and parse errors in included
/// files are reported in `diags`; the offending Include is dropped.
Program resolve_includes(const Program& program, const Loader& loader, std::vector<Diagnostic>& diags);

}  // namespace metaglyph::dsl

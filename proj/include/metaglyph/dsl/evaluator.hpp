#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "metaglyph/dsl/ast.hpp"
#include "metaglyph/dsl/includes.hpp"
#include "metaglyph/geometry.hpp"
#include "metaglyph/hobby.hpp"

namespace metaglyph::dsl {

struct EvalOptions {
  /// Parameter values that win over in-file `:=` assignments of the same name.
  std::map<std::string, double> overrides;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  const std::atomic<bool>* cancel = nullptr;
};

struct NamedPath {
  hobby::PathSpec spec;
  Contour contour;
};

struct GlyphResult {
  std::string name;
  std::optional<char32_t> unicode;
  std::optional<double> advance;
  Outline outline;
  /// Centre lines of every pen stroke, in drawing order.
  std::vector<Contour> strokes;
  /// Known numeric parameters in order of first assignment.
  std::vector<std::pair<std::string, double>> parameters;
  /// Points z<suffix> whose coordinates are both known.
  std::map<std::string, Point> points;
  std::map<std::string, NamedPath> paths;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return !has_errors(diagnostics); }
};

/// Runs a program whose includes are already resolved. Stops at the first
/// error; a failed evaluation has an empty outline.
GlyphResult evaluate(const Program& program, const EvalOptions& options = {});

struct Compilation {
  Program program;  // after include resolution
  GlyphResult glyph;
  std::vector<Diagnostic> diagnostics;  // parse, include and evaluation

  bool ok() const { return !has_errors(diagnostics); }
  std::string format_diagnostics() const;
};

/// parse + resolve_includes + evaluate. Evaluation is skipped when parsing
/// or include resolution failed.
Compilation compile(std::string_view source, const std::string& file_name, const Loader& loader,
                    const EvalOptions& options = {});

}  // namespace metaglyph::dsl

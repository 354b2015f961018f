#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metaglyph/dsl/ast.hpp"
#include "metaglyph/font/config.hpp"
#include "metaglyph/font/manifest.hpp"
#include "metaglyph/geometry.hpp"

namespace metaglyph::font {

struct BuiltGlyph {
  std::string name;
  std::optional<char32_t> unicode;
  double advance = 0;
  Outline outline;
  /// Stroke centre lines, transformed like the outline.
  std::vector<Contour> strokes;
  std::vector<std::string> warnings;  // formatted diagnostics
};

struct GlyphSet {
  std::string name;  // master or instance name
  TypographicConfig config;
  std::map<std::string, double> parameters;  // everything the config defines
  std::vector<BuiltGlyph> glyphs;            // manifest order

  const BuiltGlyph* find(const std::string& glyph) const;
};

struct GlyphFailure {
  std::string master;
  std::string glyph;
  std::string report;
};

class BuildError : public std::runtime_error {
 public:
  explicit BuildError(std::vector<GlyphFailure> failures);
  const std::vector<GlyphFailure>& failures() const { return failures_; }

 private:
  std::vector<GlyphFailure> failures_;
};

/// Parsed, include-resolved glyph programs. Configs arrive as overrides at
/// evaluation time, so one parse serves every master.
struct SourceSet {
  struct Source {
    GlyphEntry entry;
    dsl::Program program;
  };
  std::vector<Source> glyphs;

  static SourceSet load(const Manifest& manifest);
};

struct MasterConfig {
  TypographicConfig config;
  std::map<std::string, double> parameters;
};

/// Evaluates a master's config file with its overrides.
MasterConfig resolve_master_config(const Manifest& manifest, const MasterSpec& spec);

struct BuildOptions {
  bool parallel = true;
  std::optional<std::chrono::milliseconds> glyph_timeout;
};

/// One glyph set per master in manifest order. Throws BuildError listing
/// every failing glyph. `parallel` selects the OpenMP path; the serial path
/// is the reference and both give identical results.
std::vector<GlyphSet> build_masters(const Manifest& manifest, const SourceSet& sources,
                                    const std::vector<std::string>& only = {}, const BuildOptions& options = {});

GlyphSet build_master(const Manifest& manifest, const MasterSpec& spec, const BuildOptions& options = {});

/// Final placement shared by masters: shift to the left bearing (when the
/// advance is derived), condense, slant.
Affine placement(const TypographicConfig& config, const Outline& outline, bool derive_advance, double& advance);

}  // namespace metaglyph::font

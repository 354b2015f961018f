#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaglyph/font/build.hpp"

namespace metaglyph::font {

struct Mismatch {
  std::string glyph;
  std::string master;
  std::optional<std::size_t> contour;
  std::string message;
};

struct CompatibilityReport {
  std::vector<Mismatch> mismatches;

  bool compatible() const { return mismatches.empty(); }
  /// One line per mismatch, or "compatible".
  std::string to_string() const;
};

/// Compares every master with the first: glyph presence, contour count,
/// and per contour the segment count, closed flag, segment kinds and
/// start node.
CompatibilityReport check_compatibility(std::span<const GlyphSet> masters);

}  // namespace metaglyph::font

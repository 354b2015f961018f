#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "metaglyph/font/build.hpp"
#include "metaglyph/geometry.hpp"

namespace metaglyph::font {

/// The em box an outline is drawn into. SVG y = ascent - y.
struct SvgFrame {
  double x = 0;
  double width = 0;
  double ascent = 0;
  double descent = 0;

  /// Tight frame around an outline (the empty outline gives a 0x0 frame).
  static SvgFrame around(const Outline& outline);
};

/// Construction geometry drawn over the outline in debug mode.
struct DebugOverlay {
  std::vector<Contour> guides;           // stroke centre lines and named paths
  std::map<std::string, Point> points;   // labelled knots (z0, z1, ...)
};

inline constexpr const char* kDefaultDebugStyle =
    ".outline{fill:#000;fill-opacity:.15;stroke:#000;stroke-width:1}"
    ".guide{fill:none;stroke:#1f77b4;stroke-width:1}"
    ".handle{stroke:#2ca02c;stroke-width:1}"
    ".control{fill:#2ca02c}"
    ".knot{fill:#d62728}"
    ".node{fill:#000}"
    ".label{font:12px sans-serif;fill:#d62728}";

/// Absolute M/L/C/Z path data, y flipped, 3 decimals. A closing line
/// segment becomes Z.
std::string svg_path_data(const Outline& outline, const SvgFrame& frame);

std::string svg_document(const Outline& outline, const SvgFrame& frame, const DebugOverlay* overlay = nullptr,
                         const std::string& debug_style = kDefaultDebugStyle);

/// Shortest decimal for `v` rounded to 3 places; never "-0".
std::string svg_number(double v);

/// One <glyph>.svg per glyph, framed by advance, ascent and descent.
void write_svg(const GlyphSet& set, const std::filesystem::path& out_dir);

}  // namespace metaglyph::font

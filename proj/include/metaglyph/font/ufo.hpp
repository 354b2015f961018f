#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "metaglyph/font/build.hpp"

namespace metaglyph::font {

class UfoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FontMetadata {
  std::string family = "Untitled";
  std::string style = "Regular";
  std::string version = "1.000";
};

struct UfoOptions {
  /// Round coordinates and advances to integers (half away from zero).
  /// Otherwise they are written with 3 decimals.
  bool round_to_integer = true;
};

/// Writes a UFO3 package (replacing any existing one at `dir`).
void write_ufo(const GlyphSet& set, const FontMetadata& meta, const std::filesystem::path& dir,
               const UfoOptions& options = {});

/// Point of a glif outline as written: type is "line", "curve", "move",
/// or empty for off-curve points.
struct GlifPoint {
  double x = 0, y = 0;
  std::string type;
  bool smooth = false;
};

struct GlifGlyph {
  std::string name;
  double advance = 0;
  std::vector<char32_t> unicodes;
  std::vector<std::vector<GlifPoint>> contours;

  /// Back to cubic contours (lines get controls at thirds).
  Outline outline() const;
};

/// Minimal glif (format 2) reader, enough to read back what write_ufo emits.
GlifGlyph read_glif(const std::string& xml);
GlifGlyph read_glif_file(const std::filesystem::path& file);

/// Glyph name -> .glif file name from glyphs/contents.plist.
std::vector<std::pair<std::string, std::string>> read_contents_plist(const std::filesystem::path& ufo_dir);

/// The glif points for one contour: on-curve nodes typed line/curve,
/// smooth where tangents agree within 1e-3 degrees.
std::vector<GlifPoint> glif_points(const Contour& contour);

}  // namespace metaglyph::font

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace metaglyph::font {

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis tag -> user-space value.
using Location = std::map<std::string, double>;

struct AxisDef {
  std::string name;
  std::string tag;
  double minimum = 0;
  double default_value = 0;
  double maximum = 0;
  /// Config parameter the axis drives, with (axis value, parameter value)
  /// pairs sorted by axis value. Informational: masters carry the values.
  std::string parameter;
  std::vector<std::pair<double, double>> mapping;

  /// Piecewise-linear parameter value at `v`, extrapolating at the ends.
  double parameter_at(double v) const;
};

struct MasterSpec {
  std::string name;
  std::filesystem::path config;  // absolute after loading
  std::map<std::string, double> overrides;
  Location location;  // complete: missing axes filled with defaults
};

struct GlyphEntry {
  std::filesystem::path source;  // absolute after loading
  std::optional<std::string> name;
  std::optional<char32_t> unicode;
  /// Expression in the glyph's own terms, e.g. "6u + lbearing + rbearing".
  std::optional<std::string> advance;
};

struct NamedInstance {
  std::string name;
  Location location;
};

struct Manifest {
  std::filesystem::path root;  // directory of the manifest file
  std::string family = "Untitled";
  std::string version = "1.000";
  std::vector<GlyphEntry> glyphs;
  std::vector<AxisDef> axes;
  std::vector<MasterSpec> masters;
  std::vector<NamedInstance> instances;

  /// Reads a JSON manifest. Relative paths resolve against its directory.
  static Manifest load(const std::filesystem::path& file);
  static Manifest parse(const std::string& json_text, const std::filesystem::path& root);

  const MasterSpec& default_master() const;
  const MasterSpec& master(const std::string& name) const;
  Location default_location() const;
  /// Fills missing axes with defaults; throws on unknown tags or values
  /// outside an axis range.
  Location complete(const Location& partial) const;
};

/// Weight x width x softness grid: 8 x 2 x 2 = 32 named instances.
std::vector<NamedInstance> default_instances(const std::vector<AxisDef>& axes);

/// Parses "0D31", "U+0D31" or "0x0D31".
std::optional<char32_t> parse_unicode(const std::string& text);

}  // namespace metaglyph::font

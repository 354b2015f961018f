#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace metaglyph::font {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The typographic parameter set every master config defines. Lengths are
/// in font units; thin and xthick are ratios of thick; slant is in degrees.
struct TypographicConfig {
  double em = 1000;
  double u = 100;
  double ascent = 800;
  double descent = 200;
  double xheight = 1600.0 / 3.0;
  double mheight = 600;
  double Xheight = 800;
  double thick = 100;
  double thin = 0.7;
  double subthick = 66.6;
  double xthick = 1;
  double slant = 0;
  double condense = 1;
  double terminalround = 0.5;
  double lbearing = 40;
  double rbearing = 40;

  /// Reads every field from evaluated parameters. Throws ConfigError when
  /// a field is missing or an invariant does not hold.
  static TypographicConfig from_parameters(const std::map<std::string, double>& params);

  /// Human-readable invariant violations; empty when valid.
  std::vector<std::string> violations() const;

  std::map<std::string, double> to_map() const;

  bool operator==(const TypographicConfig&) const = default;
};

}  // namespace metaglyph::font

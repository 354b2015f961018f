#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "metaglyph/font/build.hpp"
#include "metaglyph/font/manifest.hpp"

namespace metaglyph::font {

class VariationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps a user value to [-1, 1]: default -> 0, minimum -> -1, maximum -> 1.
double normalize_value(double v, const AxisDef& axis);
Location normalize_location(const Location& user, std::span<const AxisDef> axes);

/// The variation model of the designspace/OpenType variations format:
/// every master owns a support region, and an instance is a weighted sum
/// of masters.
class VariationModel {
 public:
  /// Normalized master locations; exactly one must be the origin.
  explicit VariationModel(std::vector<Location> locations);

  /// Per-master weights (input order) at a normalized location.
  std::vector<double> master_scalars(const Location& loc) const;

  struct Support {
    double lower, peak, upper;
  };
  using Region = std::map<std::string, Support>;
  const std::vector<Region>& supports() const { return supports_; }

 private:
  std::vector<double> support_scalars(const Location& loc) const;

  std::vector<Location> sorted_;           // model order
  std::vector<std::size_t> mapping_;       // input index -> model index
  std::vector<Region> supports_;
  std::vector<std::map<std::size_t, double>> delta_weights_;
};

double support_scalar(const Location& loc, const VariationModel::Region& support);

struct MasterSet {
  std::vector<AxisDef> axes;
  std::vector<MasterSpec> masters;
  std::vector<GlyphSet> sets;  // parallel to masters
  std::vector<NamedInstance> instances;
};

/// Interpolated glyph set at a user-space location. Throws VariationError
/// for locations outside the axes or incompatible masters.
GlyphSet interpolate(const MasterSet& set, const Location& location, const std::string& name = {});

}  // namespace metaglyph::font

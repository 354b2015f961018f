#pragma once

// Expanded strokes ("pen envelopes"). A nib is placed at every node of the
// centre path; the two extremal nib points perpendicular to the path give
// one left and one right outline node, and the edges between them are
// re-smoothed with Hobby joins that follow the centre path's directions.
// The result has exactly two outline nodes per path node plus the caps.

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "metaglyph/geometry.hpp"

namespace metaglyph::pen {

enum class NibKind { Razor, Ellipse };

/// A razor (zero height) or an ellipse. width/height are full extents along
/// the nib's own axes; angle is in degrees.
struct Nib {
  NibKind kind = NibKind::Razor;
  double width = 0.0;
  double height = 0.0;
  double angle = 0.0;

  /// fix_nib(w, h, a); height 0 gives a razor.
  static Nib fixed(double width, double height, double angle);
  static Nib circle(double diameter) { return fixed(diameter, diameter, 0.0); }

  /// Applies the linear part of `m` to the nib shape.
  Nib transformed(const Affine& m) const;
  Nib scaled(double s) const { return transformed(Affine::scaling(s, s)); }
  Nib rotated(double degrees) const { return transformed(Affine::rotation(degrees)); }

  /// Offset (relative to the nib centre) of the nib point that is extremal
  /// in direction `normal`.
  Point extremal_offset(Point normal) const;

  bool operator==(const Nib&) const = default;
};

enum class CutMode { Absolute, Relative };

struct NibOverride {
  Nib nib;
};
struct CutOverride {
  Nib nib;
  double angle = 0.0;
  CutMode mode = CutMode::Absolute;
};

struct NodeStyle {
  std::size_t node_index = 0;
  std::variant<NibOverride, CutOverride> style;
};

struct Envelope {
  Contour result;  // closed; empty for cyclic paths
  Contour left;
  Contour right;
  Contour begin_cap;  // empty for cyclic paths
  Contour end_cap;
  bool cyclic = false;
  /// Offset vectors of the left/right nodes from their path node.
  std::vector<Point> left_offsets;
  std::vector<Point> right_offsets;
  std::vector<std::string> warnings;
};

class StrokeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Envelope pen_stroke(const Contour& path, const Nib& default_nib, const std::vector<NodeStyle>& styles = {});

/// Arc-length parametrisation queries.
class ArcLengthIndex {
 public:
  explicit ArcLengthIndex(const Contour& path, double rel_tol = 1e-6);
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  /// Segment index and parameter at arc length `s` (clamped to the path).
  std::pair<std::size_t, double> locate(double s) const;
  Point point_at(double s) const;
  /// Tangent angle in degrees at arc length `s`.
  double angle_at(double s) const;

 private:
  const Contour* path_;
  double tol_;
  std::vector<double> cumulative_;  // length up to the end of segment i
};

/// Points at arc lengths 0, s, 2s, ... (the end point of an open path is
/// included only when it falls on that grid; closed paths never repeat
/// the seam).
std::vector<Point> place_dots(const Contour& path, double spacing);

struct Arrow {
  Point at;
  double angle;  // degrees
};
std::vector<Arrow> place_arrows(const Contour& path, double spacing);

}  // namespace metaglyph::pen

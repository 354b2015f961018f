#pragma once

// Hobby's smooth-path algorithm (unit tension, unit end curl): turns a list
// of knots with joint kinds and optional direction constraints into
// explicit cubic control points.

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "metaglyph/geometry.hpp"

namespace metaglyph::hobby {

enum class JointKind {
  Curve,       // ..
  Line,        // --
  SmoothLine,  // ---  straight, and its direction carries into the adjacent curves
};

struct Knot {
  Point point;
  std::optional<double> dir_in;   // degrees, arriving direction
  std::optional<double> dir_out;  // degrees, leaving direction
  /// Controls of the joint that leaves this knot; overrides solving.
  std::optional<std::pair<Point, Point>> controls_after;
};

struct PathSpec {
  std::vector<Knot> knots;
  std::vector<JointKind> joints;
  bool cyclic = false;
};

class PathError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Hobby's velocity function rho(theta, phi), angles in radians. The
/// control distance is rho / 3 times the chord length.
double velocity(double theta, double phi);

/// Solves the whole path. One segment per joint; knots are preserved
/// exactly. Degenerate (zero-length) joints produce a point segment and a
/// message in `warnings`.
Contour solve(const PathSpec& spec, std::vector<std::string>* warnings = nullptr);

/// A single segment from `a` leaving at `dir_a` degrees to `b` arriving at
/// `dir_b` degrees.
CubicSegment segment_with_directions(Point a, double dir_a, Point b, double dir_b);

/// Tangent direction in degrees at node `index`: outgoing where a segment
/// leaves the node, else incoming.
double direction_at(const Contour& contour, std::size_t index);
/// Arriving direction at node `index` (for the first node of an open
/// contour this is the outgoing direction).
double direction_in_at(const Contour& contour, std::size_t index);

}  // namespace metaglyph::hobby

#pragma once

#include <stdexcept>

#include "metaglyph/font/build.hpp"

namespace metaglyph::font {

enum class EducationMode { Dots, Arrows };

class EducationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Replaces each glyph's stroked outline with dots (diameter thick) or
/// arrowheads along its centre lines, `spacing` apart by arc length.
/// Glyphs drawn only with fills keep their outline. Throws when no glyph
/// in the set has centre lines.
GlyphSet derive_education_variant(const GlyphSet& set, EducationMode mode, double spacing);

/// Four-arc circle, counter-clockwise from the rightmost point.
Contour circle_contour(Point centre, double diameter);

/// Closed triangle pointing along `angle` (degrees), `size` long.
Contour arrow_contour(Point at, double angle, double size);

}  // namespace metaglyph::font

#include "metaglyph/font/education.hpp"

#include "metaglyph/pen.hpp"

namespace metaglyph::font {

Contour circle_contour(Point c, double diameter) {
  constexpr double k = 0.5522847498307936;
  const double r = diameter / 2, h = k * r;
  Contour out;
  out.closed = true;
  out.segments = {
      {{c.x + r, c.y}, {c.x + r, c.y + h}, {c.x + h, c.y + r}, {c.x, c.y + r}},
      {{c.x, c.y + r}, {c.x - h, c.y + r}, {c.x - r, c.y + h}, {c.x - r, c.y}},
      {{c.x - r, c.y}, {c.x - r, c.y - h}, {c.x - h, c.y - r}, {c.x, c.y - r}},
      {{c.x, c.y - r}, {c.x + h, c.y - r}, {c.x + r, c.y - h}, {c.x + r, c.y}},
  };
  return out;
}

Contour arrow_contour(Point at, double angle, double size) {
  // Template: tip at (0.5, 0), base corners at (-0.5, +-0.4), centred on the path.
  Affine m = Affine::translation(at.x, at.y) * Affine::rotation(angle) * Affine::scaling(size, size);
  Point tip = m.apply({0.5, 0}), b1 = m.apply({-0.5, 0.4}), b2 = m.apply({-0.5, -0.4});
  Contour out;
  out.closed = true;
  out.segments = {CubicSegment::line(tip, b1), CubicSegment::line(b1, b2), CubicSegment::line(b2, tip)};
  return out;
}

GlyphSet derive_education_variant(const GlyphSet& set, EducationMode mode, double spacing) {
  if (!(spacing > 0)) throw EducationError("spacing must be positive");
  bool any = false;
  GlyphSet out = set;
  out.name = set.name + (mode == EducationMode::Dots ? " Dots" : " Arrows");
  const double size = set.config.thick;
  for (auto& g : out.glyphs) {
    if (g.strokes.empty()) continue;
    any = true;
    g.outline.clear();
    for (const auto& path : g.strokes) {
      if (mode == EducationMode::Dots) {
        for (Point p : pen::place_dots(path, spacing)) g.outline.push_back(circle_contour(p, size));
      } else {
        for (const auto& a : pen::place_arrows(path, spacing)) g.outline.push_back(arrow_contour(a.at, a.angle, size));
      }
    }
  }
  if (!any) throw EducationError("glyph set " + set.name + " has no centre-line data");
  return out;
}

}  // namespace metaglyph::font

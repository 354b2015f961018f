#include "metaglyph/font/svg.hpp"

#include <charconv>
#include <cmath>

#include "io.hpp"

namespace metaglyph::font {

std::string svg_number(double v) {
  double r = std::round(v * 1000.0) / 1000.0;
  if (r == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, r, std::chars_format::fixed, 3);
  std::string s(buf, res.ptr);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

SvgFrame SvgFrame::around(const Outline& outline) {
  if (outline.empty()) return {};
  BBox b = bbox(outline);
  return {b.xmin, b.width(), b.ymax, -b.ymin};
}

namespace {

std::string xy(Point p, const SvgFrame& f) { return svg_number(p.x) + " " + svg_number(f.ascent - p.y); }

}  // namespace

std::string svg_path_data(const Outline& outline, const SvgFrame& frame) {
  std::string d;
  for (const auto& c : outline) {
    if (c.segments.empty()) continue;
    if (!d.empty()) d += " ";
    d += "M " + xy(c.segments.front().p0, frame);
    for (std::size_t i = 0; i < c.segments.size(); ++i) {
      const CubicSegment& s = c.segments[i];
      const bool last = i + 1 == c.segments.size();
      if (s.is_line()) {
        if (last && c.closed) break;
        d += " L " + xy(s.p1, frame);
      } else {
        d += " C " + xy(s.c0, frame) + " " + xy(s.c1, frame) + " " + xy(s.p1, frame);
      }
    }
    if (c.closed) d += " Z";
  }
  return d;
}

std::string svg_document(const Outline& outline, const SvgFrame& frame, const DebugOverlay* overlay,
                         const std::string& debug_style) {
  const std::string w = svg_number(frame.width), h = svg_number(frame.ascent + frame.descent);
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"" + svg_number(frame.x) + " 0 " + w +
       " " + h + "\" width=\"" + w + "\" height=\"" + h + "\">\n";
  if (overlay) s += "  <style>" + xml_escape(debug_style) + "</style>\n";
  s += "  <path" + std::string(overlay ? " class=\"outline\"" : "") + " d=\"" + svg_path_data(outline, frame) +
       "\"/>\n";
  if (overlay) {
    auto circle = [&](Point p, const char* cls, double r) {
      s += "  <circle class=\"" + std::string(cls) + "\" cx=\"" + svg_number(p.x) + "\" cy=\"" +
           svg_number(frame.ascent - p.y) + "\" r=\"" + svg_number(r) + "\"/>\n";
    };
    auto line = [&](Point a, Point b) {
      s += "  <line class=\"handle\" x1=\"" + svg_number(a.x) + "\" y1=\"" + svg_number(frame.ascent - a.y) +
           "\" x2=\"" + svg_number(b.x) + "\" y2=\"" + svg_number(frame.ascent - b.y) + "\"/>\n";
    };
    for (const auto& g : overlay->guides) {
      s += "  <path class=\"guide\" d=\"" + svg_path_data({g}, frame) + "\"/>\n";
      for (const auto& seg : g.segments) {
        if (seg.is_line()) continue;
        line(seg.p0, seg.c0);
        line(seg.p1, seg.c1);
        circle(seg.c0, "control", 2);
        circle(seg.c1, "control", 2);
      }
      for (std::size_t i = 0; i < g.node_count(); ++i) circle(g.node(i), "knot", 4);
    }
    for (const auto& c : outline)
      for (std::size_t i = 0; i < c.node_count(); ++i) circle(c.node(i), "node", 1.5);
    for (const auto& [name, p] : overlay->points) {
      s += "  <text class=\"label\" x=\"" + svg_number(p.x + 5) + "\" y=\"" + svg_number(frame.ascent - p.y - 5) +
           "\">" + xml_escape(name) + " (" + svg_number(p.x) + ", " + svg_number(p.y) + ")</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

void write_svg(const GlyphSet& set, const std::filesystem::path& out_dir) {
  for (const auto& g : set.glyphs) {
    SvgFrame f{0, g.advance, set.config.ascent, set.config.descent};
    write_file_atomic(out_dir / (safe_file_name(g.name) + ".svg"), svg_document(g.outline, f));
  }
}

}  // namespace metaglyph::font

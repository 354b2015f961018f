#include "metaglyph/font/compat.hpp"

namespace metaglyph::font {

namespace {

std::vector<bool> kinds(const Contour& c) {
  std::vector<bool> k;
  for (const auto& s : c.segments) k.push_back(s.is_line());
  return k;
}

// Smallest rotation that maps `b` onto `a`, if any.
std::optional<std::size_t> rotation(const std::vector<bool>& a, const std::vector<bool>& b) {
  const std::size_t n = a.size();
  for (std::size_t r = 0; r < n; ++r) {
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = a[i] == b[(i + r) % n];
    if (ok) return r;
  }
  return std::nullopt;
}

// Nodes in the unit square of the contour's bounding box.
std::vector<Point> unit_nodes(const Contour& c) {
  BBox b = bbox(std::span<const Contour>(&c, 1));
  const double w = b.width() > 0 ? b.width() : 1, h = b.height() > 0 ? b.height() : 1;
  std::vector<Point> out;
  for (const auto& s : c.segments) out.push_back({(s.p0.x - b.xmin) / w, (s.p0.y - b.ymin) / h});
  return out;
}

// Rotation of `b` that lines its nodes up best with `a` among the rotations
// that keep segment kinds; 0 unless some rotation is clearly better.
std::size_t best_geometric_rotation(const Contour& a, const Contour& b) {
  auto ka = kinds(a), kb = kinds(b);
  auto na = unit_nodes(a), nb = unit_nodes(b);
  const std::size_t n = na.size();
  auto cost = [&](std::size_t r) {
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Point d = na[i] - nb[(i + r) % n];
      sum += d.x * d.x + d.y * d.y;
    }
    return sum;
  };
  const double base = cost(0);
  std::size_t best = 0;
  double best_cost = base;
  for (std::size_t r = 1; r < n; ++r) {
    bool same_kinds = true;
    for (std::size_t i = 0; i < n && same_kinds; ++i) same_kinds = ka[i] == kb[(i + r) % n];
    if (!same_kinds) continue;
    const double c = cost(r);
    if (c < best_cost) {
      best = r;
      best_cost = c;
    }
  }
  return best_cost < 0.25 * base ? best : 0;
}

}  // namespace

std::string CompatibilityReport::to_string() const {
  if (mismatches.empty()) return "compatible\n";
  std::string out;
  for (const auto& m : mismatches) {
    out += m.glyph + " [" + m.master + "]";
    if (m.contour) out += " contour " + std::to_string(*m.contour);
    out += ": " + m.message + "\n";
  }
  return out;
}

CompatibilityReport check_compatibility(std::span<const GlyphSet> masters) {
  CompatibilityReport report;
  if (masters.size() < 2) return report;
  const GlyphSet& ref = masters.front();
  auto add = [&](const std::string& g, const std::string& m, std::optional<std::size_t> c, std::string msg) {
    report.mismatches.push_back({g, m, c, std::move(msg)});
  };

  for (std::size_t mi = 1; mi < masters.size(); ++mi) {
    const GlyphSet& other = masters[mi];
    for (const auto& g : other.glyphs)
      if (!ref.find(g.name)) add(g.name, ref.name, std::nullopt, "missing in " + ref.name);
    for (const auto& rg : ref.glyphs) {
      const BuiltGlyph* og = other.find(rg.name);
      if (!og) {
        add(rg.name, other.name, std::nullopt, "missing in " + other.name);
        continue;
      }
      if (og->outline.size() != rg.outline.size()) {
        add(rg.name, other.name, std::nullopt,
            std::to_string(og->outline.size()) + " contours, " + ref.name + " has " +
                std::to_string(rg.outline.size()));
        continue;
      }
      for (std::size_t c = 0; c < rg.outline.size(); ++c) {
        const Contour& a = rg.outline[c];
        const Contour& b = og->outline[c];
        if (a.closed != b.closed) {
          add(rg.name, other.name, c, b.closed ? "closed, reference is open" : "open, reference is closed");
          continue;
        }
        if (a.segments.size() != b.segments.size()) {
          add(rg.name, other.name, c,
              std::to_string(b.segments.size()) + " segments, " + ref.name + " has " +
                  std::to_string(a.segments.size()));
          continue;
        }
        auto ka = kinds(a), kb = kinds(b);
        if (ka == kb) {
          if (!a.closed) continue;
          if (std::size_t r = best_geometric_rotation(a, b))
            add(rg.name, other.name, c, "start node appears shifted by " + std::to_string(r));
          continue;
        }
        auto r = a.closed ? rotation(ka, kb) : std::nullopt;
        if (r) add(rg.name, other.name, c, "start node is shifted by " + std::to_string(*r));
        else add(rg.name, other.name, c, "line/curve segment types differ");
      }
    }
    if (other.glyphs.size() != ref.glyphs.size() && report.mismatches.empty())
      add("*", other.name, std::nullopt, "glyph count differs");
  }
  return report;
}

}  // namespace metaglyph::font

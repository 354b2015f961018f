#include "metaglyph/font/ufo.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "io.hpp"
#include "metaglyph/font/svg.hpp"

namespace metaglyph::font {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr double kSmoothDegrees = 1e-3;

const char* kPlistHeader =
    "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    "<!DOCTYPE plist PUBLIC \"-//Apple//DTD PLIST 1.0//EN\" \"http://www.apple.com/DTDs/PropertyList-1.0.dtd\">\n"
    "<plist version=\"1.0\">\n";

std::string hex(char32_t cp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04X", static_cast<unsigned>(cp));
  return buf;
}

bool smooth_between(const CubicSegment& in, const CubicSegment& out) {
  Point a = tangent_at(in, 1.0), b = tangent_at(out, 0.0);
  if (!a.finite() || !b.finite() || a.length() == 0 || b.length() == 0) return false;
  double diff = std::abs(normalize_degrees(angle_of(b) - angle_of(a)));
  return diff < kSmoothDegrees;
}

std::string plist_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) return "<integer>" + std::to_string(static_cast<long long>(v)) + "</integer>";
  return "<real>" + svg_number(v) + "</real>";
}

}  // namespace

std::vector<GlifPoint> glif_points(const Contour& c) {
  std::vector<GlifPoint> pts;
  const auto& segs = c.segments;
  const std::size_t n = segs.size();
  if (n == 0) return pts;
  auto on = [&](const CubicSegment& seg) { return seg.is_line() ? "line" : "curve"; };
  if (c.closed) {
    // Start node first, typed by the closing segment; that segment's
    // off-curve points wrap around to the end of the list.
    pts.push_back({segs[0].p0.x, segs[0].p0.y, on(segs[n - 1]), smooth_between(segs[n - 1], segs[0])});
    for (std::size_t i = 0; i < n; ++i) {
      const CubicSegment& s = segs[i];
      if (!s.is_line()) {
        pts.push_back({s.c0.x, s.c0.y, "", false});
        pts.push_back({s.c1.x, s.c1.y, "", false});
      }
      if (i + 1 < n) pts.push_back({s.p1.x, s.p1.y, on(s), smooth_between(s, segs[i + 1])});
    }
  } else {
    pts.push_back({segs[0].p0.x, segs[0].p0.y, "move", false});
    for (std::size_t i = 0; i < n; ++i) {
      const CubicSegment& s = segs[i];
      if (!s.is_line()) {
        pts.push_back({s.c0.x, s.c0.y, "", false});
        pts.push_back({s.c1.x, s.c1.y, "", false});
      }
      pts.push_back({s.p1.x, s.p1.y, on(s), i + 1 < n && smooth_between(s, segs[i + 1])});
    }
  }
  return pts;
}

void write_ufo(const GlyphSet& set, const FontMetadata& meta, const fs::path& dir, const UfoOptions& options) {
  std::set<std::string> names, files;
  std::vector<std::pair<std::string, std::string>> contents;
  for (const auto& g : set.glyphs) {
    if (g.name.empty()) throw UfoError("a glyph has no name");
    if (!names.insert(g.name).second) throw UfoError("duplicate glyph name " + g.name);
    if (g.unicode && (*g.unicode > 0x10FFFF || (*g.unicode >= 0xD800 && *g.unicode <= 0xDFFF)))
      throw UfoError("invalid unicode value for " + g.name);
    std::string base = safe_file_name(g.name), file = base + ".glif";
    std::string lower = file;
    for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (int k = 1; files.contains(lower); ++k) {
      file = base + std::to_string(k) + ".glif";
      lower = file;
      for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    files.insert(lower);
    contents.emplace_back(g.name, file);
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
  auto num = [&](double v) {
    return options.round_to_integer ? svg_number(round_half_away(v)) : svg_number(v);
  };

  write_file_atomic(dir / "metainfo.plist",
                    std::string(kPlistHeader) +
                        "<dict>\n  <key>creator</key>\n  <string>org.metaglyph</string>\n"
                        "  <key>formatVersion</key>\n  <integer>3</integer>\n</dict>\n</plist>\n");

  const TypographicConfig& c = set.config;
  int major = 1, minor = 0;
  std::sscanf(meta.version.c_str(), "%d.%d", &major, &minor);
  std::string info = std::string(kPlistHeader) + "<dict>\n";
  auto key = [&](const std::string& k, const std::string& v) { info += "  <key>" + k + "</key>\n  " + v + "\n"; };
  key("familyName", "<string>" + xml_escape(meta.family) + "</string>");
  key("styleName", "<string>" + xml_escape(meta.style) + "</string>");
  key("versionMajor", "<integer>" + std::to_string(major) + "</integer>");
  key("versionMinor", "<integer>" + std::to_string(minor) + "</integer>");
  key("unitsPerEm", plist_number(c.em));
  key("ascender", plist_number(c.ascent));
  key("descender", plist_number(-c.descent));
  key("xHeight", plist_number(round_half_away(c.xheight)));
  key("capHeight", plist_number(c.Xheight));
  key("italicAngle", plist_number(-c.slant));
  info += "</dict>\n</plist>\n";
  write_file_atomic(dir / "fontinfo.plist", info);

  write_file_atomic(dir / "layercontents.plist",
                    std::string(kPlistHeader) +
                        "<array>\n  <array>\n    <string>public.default</string>\n    <string>glyphs</string>\n"
                        "  </array>\n</array>\n</plist>\n");

  std::string cp = std::string(kPlistHeader) + "<dict>\n";
  for (const auto& [name, file] : contents)
    cp += "  <key>" + xml_escape(name) + "</key>\n  <string>" + xml_escape(file) + "</string>\n";
  cp += "</dict>\n</plist>\n";
  write_file_atomic(dir / "glyphs" / "contents.plist", cp);

  for (std::size_t i = 0; i < set.glyphs.size(); ++i) {
    const BuiltGlyph& g = set.glyphs[i];
    std::string x = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    x += "<glyph name=\"" + xml_escape(g.name) + "\" format=\"2\">\n";
    x += "  <advance width=\"" + num(g.advance) + "\"/>\n";
    if (g.unicode) x += "  <unicode hex=\"" + hex(*g.unicode) + "\"/>\n";
    x += "  <outline>\n";
    for (const auto& contour : g.outline) {
      if (contour.empty()) continue;
      x += "    <contour>\n";
      for (const auto& p : glif_points(contour)) {
        x += "      <point x=\"" + num(p.x) + "\" y=\"" + num(p.y) + "\"";
        if (!p.type.empty()) x += " type=\"" + p.type + "\"";
        if (p.smooth) x += " smooth=\"yes\"";
        x += "/>\n";
      }
      x += "    </contour>\n";
    }
    x += "  </outline>\n</glyph>\n";
    write_file_atomic(dir / "glyphs" / contents[i].second, x);
  }
}

GlifGlyph read_glif(const std::string& xml) {
  pt::ptree tree;
  std::istringstream in(xml);
  try {
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw UfoError(std::string("malformed glif: ") + e.what());
  }
  const auto& glyph = tree.get_child("glyph");
  GlifGlyph g;
  g.name = glyph.get<std::string>("<xmlattr>.name");
  for (const auto& [tag, child] : glyph) {
    if (tag == "advance") {
      g.advance = child.get<double>("<xmlattr>.width", 0.0);
    } else if (tag == "unicode") {
      auto cp = parse_unicode(child.get<std::string>("<xmlattr>.hex"));
      if (!cp) throw UfoError("bad unicode in glif " + g.name);
      g.unicodes.push_back(*cp);
    } else if (tag == "outline") {
      for (const auto& [ctag, contour] : child) {
        if (ctag != "contour") continue;
        std::vector<GlifPoint> pts;
        for (const auto& [ptag, p] : contour) {
          if (ptag != "point") continue;
          pts.push_back({p.get<double>("<xmlattr>.x"), p.get<double>("<xmlattr>.y"),
                         p.get<std::string>("<xmlattr>.type", ""), p.get<std::string>("<xmlattr>.smooth", "") == "yes"});
        }
        g.contours.push_back(std::move(pts));
      }
    }
  }
  return g;
}

GlifGlyph read_glif_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw UfoError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_glif(ss.str());
}

Outline GlifGlyph::outline() const {
  Outline out;
  for (const auto& pts : contours) {
    Contour c;
    if (pts.empty()) continue;
    c.closed = pts.front().type != "move";
    // Rotate closed contours so the list starts at an on-curve point.
    std::size_t start = 0;
    while (start < pts.size() && pts[start].type.empty()) ++start;
    if (start == pts.size()) throw UfoError("contour without on-curve points in " + name);
    std::vector<GlifPoint> seq(pts.begin() + static_cast<long>(start), pts.end());
    seq.insert(seq.end(), pts.begin(), pts.begin() + static_cast<long>(start));
    if (c.closed) seq.push_back(seq.front());
    Point cur{seq[0].x, seq[0].y};
    std::vector<Point> off;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const GlifPoint& p = seq[i];
      Point q{p.x, p.y};
      if (p.type.empty()) {
        off.push_back(q);
        continue;
      }
      if (p.type == "line") {
        if (!off.empty()) throw UfoError("line point after off-curve points in " + name);
        c.segments.push_back(CubicSegment::line(cur, q));
      } else if (p.type == "curve") {
        if (off.size() != 2) throw UfoError("curve needs two off-curve points in " + name);
        c.segments.push_back({cur, off[0], off[1], q});
      } else {
        throw UfoError("unsupported point type " + p.type + " in " + name);
      }
      off.clear();
      cur = q;
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_contents_plist(const fs::path& ufo_dir) {
  pt::ptree tree;
  try {
    pt::read_xml((ufo_dir / "glyphs" / "contents.plist").string(), tree);
  } catch (const pt::xml_parser_error& e) {
    throw UfoError(std::string("cannot read contents.plist: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  std::string pending;
  for (const auto& [tag, child] : tree.get_child("plist.dict")) {
    if (tag == "key") pending = child.data();
    else if (tag == "string") out.emplace_back(pending, child.data());
  }
  return out;
}

}  // namespace metaglyph::font

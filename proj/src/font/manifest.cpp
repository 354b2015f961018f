#include "metaglyph/font/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "metaglyph/font/svg.hpp"

namespace metaglyph::font {

using nlohmann::json;
namespace fs = std::filesystem;

double AxisDef::parameter_at(double v) const {
  if (mapping.empty()) throw ManifestError("axis " + tag + " has no parameter mapping");
  if (mapping.size() == 1) return mapping.front().second;
  std::size_t i = 1;
  while (i + 1 < mapping.size() && v > mapping[i].first) ++i;
  const auto& [x0, y0] = mapping[i - 1];
  const auto& [x1, y1] = mapping[i];
  if (v == x0) return y0;
  if (v == x1) return y1;
  return y0 + (y1 - y0) * (v - x0) / (x1 - x0);
}

std::optional<char32_t> parse_unicode(const std::string& text) {
  std::string s = text;
  if (s.size() > 2 && (s[0] == 'U' || s[0] == 'u') && s[1] == '+') s = s.substr(2);
  else if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) s = s.substr(2);
  if (s.empty() || s.size() > 6) return std::nullopt;
  if (!std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c); })) return std::nullopt;
  unsigned long v = std::stoul(s, nullptr, 16);
  if (v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) return std::nullopt;
  return static_cast<char32_t>(v);
}

namespace {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ManifestError(where + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ManifestError(where + ": \"" + key + "\" has the wrong type");
  }
}

Location read_location(const json& j, const std::string& where) {
  Location loc;
  if (!j.is_object()) throw ManifestError(where + ": location must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ManifestError(where + ": location value for " + k + " must be a number");
    loc[k] = v.get<double>();
  }
  return loc;
}

}  // namespace

Manifest Manifest::load(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ManifestError("cannot read manifest " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  fs::path root = fs::absolute(file).parent_path();
  return parse(ss.str(), root);
}

Manifest Manifest::parse(const std::string& text, const fs::path& root) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ManifestError("manifest must be a JSON object");

  Manifest m;
  m.root = root;
  if (j.contains("family")) m.family = get<std::string>(j, "family", "manifest");
  if (j.contains("version")) m.version = get<std::string>(j, "version", "manifest");

  std::set<std::string> tags;
  for (const auto& a : j.value("axes", json::array())) {
    AxisDef ax;
    ax.tag = get<std::string>(a, "tag", "axis");
    const std::string where = "axis " + ax.tag;
    ax.name = a.value("name", ax.tag);
    ax.minimum = get<double>(a, "minimum", where);
    ax.default_value = get<double>(a, "default", where);
    ax.maximum = get<double>(a, "maximum", where);
    ax.parameter = a.value("parameter", "");
    for (const auto& p : a.value("map", json::array())) {
      if (!p.is_array() || p.size() != 2) throw ManifestError(where + ": map entries are [axis, parameter] pairs");
      ax.mapping.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::sort(ax.mapping.begin(), ax.mapping.end());
    if (ax.tag.size() != 4) throw ManifestError(where + ": tags have four characters");
    if (!(ax.minimum <= ax.default_value && ax.default_value <= ax.maximum))
      throw ManifestError(where + ": needs minimum <= default <= maximum");
    if (!tags.insert(ax.tag).second) throw ManifestError("duplicate axis tag " + ax.tag);
    m.axes.push_back(std::move(ax));
  }

  for (const auto& g : get<json>(j, "glyphs", "manifest")) {
    GlyphEntry e;
    if (g.is_string()) {
      e.source = g.get<std::string>();
    } else {
      e.source = get<std::string>(g, "source", "glyph");
      if (g.contains("name")) e.name = get<std::string>(g, "name", e.source.string());
      if (g.contains("unicode")) {
        e.unicode = parse_unicode(get<std::string>(g, "unicode", e.source.string()));
        if (!e.unicode) throw ManifestError(e.source.string() + ": bad unicode value");
      }
      if (g.contains("advance")) e.advance = get<std::string>(g, "advance", e.source.string());
    }
    e.source = (root / e.source).lexically_normal();
    m.glyphs.push_back(std::move(e));
  }

  std::set<std::string> names;
  for (const auto& s : get<json>(j, "masters", "manifest")) {
    MasterSpec ms;
    ms.name = get<std::string>(s, "name", "master");
    const std::string where = "master " + ms.name;
    ms.config = (root / get<std::string>(s, "config", where)).lexically_normal();
    const json overrides = s.value("overrides", json::object());
    if (!overrides.is_object()) throw ManifestError(where + ": overrides must be an object");
    for (const auto& [k, v] : overrides.items()) {
      if (!v.is_number()) throw ManifestError(where + ": override " + k + " must be a number");
      ms.overrides[k] = v.get<double>();
    }
    ms.location = read_location(s.value("location", json::object()), where);
    if (!names.insert(ms.name).second) throw ManifestError("duplicate master " + ms.name);
    m.masters.push_back(std::move(ms));
  }
  if (m.masters.empty()) throw ManifestError("manifest has no masters");
  for (auto& ms : m.masters) {
    try {
      ms.location = m.complete(ms.location);
    } catch (const ManifestError& e) {
      throw ManifestError("master " + ms.name + ": " + e.what());
    }
  }
  for (std::size_t a = 0; a < m.masters.size(); ++a)
    for (std::size_t b = a + 1; b < m.masters.size(); ++b)
      if (m.masters[a].location == m.masters[b].location)
        throw ManifestError("masters " + m.masters[a].name + " and " + m.masters[b].name + " share a location");
  m.default_master();

  if (j.contains("instances")) {
    for (const auto& i : j.at("instances")) {
      NamedInstance ni;
      ni.name = get<std::string>(i, "name", "instance");
      ni.location = m.complete(read_location(i.value("location", json::object()), "instance " + ni.name));
      m.instances.push_back(std::move(ni));
    }
  } else {
    m.instances = default_instances(m.axes);
  }
  return m;
}

Location Manifest::default_location() const {
  Location loc;
  for (const auto& a : axes) loc[a.tag] = a.default_value;
  return loc;
}

Location Manifest::complete(const Location& partial) const {
  Location loc = default_location();
  for (const auto& [tag, v] : partial) {
    auto it = std::find_if(axes.begin(), axes.end(), [&](const AxisDef& a) { return a.tag == tag; });
    if (it == axes.end()) throw ManifestError("unknown axis " + tag);
    if (v < it->minimum || v > it->maximum)
      throw ManifestError(tag + "=" + svg_number(v) + " is outside " + svg_number(it->minimum) + ".." +
                          svg_number(it->maximum));
    loc[tag] = v;
  }
  return loc;
}

const MasterSpec& Manifest::default_master() const {
  const Location d = default_location();
  for (const auto& m : masters)
    if (m.location == d) return m;
  throw ManifestError("no master sits at the default location");
}

const MasterSpec& Manifest::master(const std::string& name) const {
  for (const auto& m : masters)
    if (m.name == name) return m;
  throw ManifestError("no master named " + name);
}

std::vector<NamedInstance> default_instances(const std::vector<AxisDef>& axes) {
  auto find = [&](const char* tag) -> const AxisDef* {
    for (const auto& a : axes)
      if (a.tag == tag) return &a;
    return nullptr;
  };
  const AxisDef* wght = find("wght");
  const AxisDef* wdth = find("wdth");
  const AxisDef* soft = find("SOFT");
  std::vector<std::pair<std::string, double>> weights{{"Regular", 0}};
  if (wght)
    weights = {{"Thin", 100},    {"ExtraLight", 200}, {"Light", 300}, {"Regular", 400},
               {"Medium", 500},  {"SemiBold", 600},   {"Bold", 700},  {"Black", 900}};
  std::vector<std::pair<std::string, double>> widths{{"", wdth ? wdth->default_value : 0}};
  if (wdth) widths.emplace_back("Condensed", wdth->minimum);
  std::vector<std::pair<std::string, double>> softs{{"", soft ? soft->default_value : 0}};
  if (soft) softs.emplace_back("Soft", soft->maximum);

  std::vector<NamedInstance> out;
  for (const auto& [sname, sv] : softs) {
    for (const auto& [wname, wv] : widths) {
      for (const auto& [name, w] : weights) {
        if (wght && (w < wght->minimum || w > wght->maximum)) continue;
        NamedInstance ni;
        for (const auto& a : axes) ni.location[a.tag] = a.default_value;
        if (wght) ni.location["wght"] = w;
        if (wdth) ni.location["wdth"] = wv;
        if (soft) ni.location["SOFT"] = sv;
        std::string prefix = wname + (wname.empty() || sname.empty() ? "" : " ") + sname;
        ni.name = prefix.empty() ? name : (name == "Regular" ? prefix : prefix + " " + name);
        out.push_back(std::move(ni));
      }
    }
  }
  return out;
}

}  // namespace metaglyph::font

#include "metaglyph/font/designspace.hpp"

#include "io.hpp"
#include "metaglyph/font/svg.hpp"

namespace metaglyph::font {

namespace fs = std::filesystem;

namespace {

bool is_default(const Location& loc, const std::vector<AxisDef>& axes) {
  for (const auto& a : axes) {
    auto it = loc.find(a.tag);
    if (it != loc.end() && it->second != a.default_value) return false;
  }
  return true;
}

std::string location_xml(const Location& loc, const std::vector<AxisDef>& axes, const std::string& indent) {
  std::string x = indent + "<location>\n";
  for (const auto& a : axes) {
    auto it = loc.find(a.tag);
    double v = it == loc.end() ? a.default_value : it->second;
    x += indent + "  <dimension name=\"" + xml_escape(a.name) + "\" xvalue=\"" + svg_number(v) + "\"/>\n";
  }
  return x + indent + "</location>\n";
}

}  // namespace

std::string designspace_document(const MasterSet& set, const std::string& family,
                                 const std::map<std::string, fs::path>& ufo_paths, const fs::path& base) {
  std::string x = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<designspace format=\"4.1\">\n  <axes>\n";
  for (const auto& a : set.axes) {
    x += "    <axis tag=\"" + xml_escape(a.tag) + "\" name=\"" + xml_escape(a.name) + "\" minimum=\"" +
         svg_number(a.minimum) + "\" default=\"" + svg_number(a.default_value) + "\" maximum=\"" +
         svg_number(a.maximum) + "\"/>\n";
  }
  x += "  </axes>\n  <sources>\n";
  for (const auto& m : set.masters) {
    auto it = ufo_paths.find(m.name);
    if (it == ufo_paths.end()) throw DesignspaceError("no UFO path for master " + m.name);
    if (!fs::is_directory(it->second)) throw DesignspaceError("master UFO missing: " + it->second.string());
    std::string rel = fs::relative(it->second, base).generic_string();
    x += "    <source filename=\"" + xml_escape(rel) + "\" name=\"" + xml_escape(family + " " + m.name) +
         "\" familyname=\"" + xml_escape(family) + "\" stylename=\"" + xml_escape(m.name) + "\">\n";
    if (is_default(m.location, set.axes)) x += "      <info copy=\"1\"/>\n";
    x += location_xml(m.location, set.axes, "      ");
    x += "    </source>\n";
  }
  x += "  </sources>\n";
  if (!set.instances.empty()) {
    x += "  <instances>\n";
    for (const auto& inst : set.instances) {
      x += "    <instance name=\"" + xml_escape(family + " " + inst.name) + "\" familyname=\"" + xml_escape(family) +
           "\" stylename=\"" + xml_escape(inst.name) + "\">\n";
      x += location_xml(inst.location, set.axes, "      ");
      x += "    </instance>\n";
    }
    x += "  </instances>\n";
  }
  return x + "</designspace>\n";
}

void write_designspace(const MasterSet& set, const std::string& family,
                       const std::map<std::string, fs::path>& ufo_paths, const fs::path& file) {
  fs::path base = file.has_parent_path() ? file.parent_path() : fs::path(".");
  write_file_atomic(file, designspace_document(set, family, ufo_paths, fs::absolute(base)));
}

}  // namespace metaglyph::font

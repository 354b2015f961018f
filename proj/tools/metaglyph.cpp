// metaglyph: command-line front end for the glyph compiler and font pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "metaglyph/dsl/evaluator.hpp"
#include "metaglyph/font/build.hpp"
#include "metaglyph/font/compat.hpp"
#include "metaglyph/font/designspace.hpp"
#include "metaglyph/font/education.hpp"
#include "metaglyph/font/svg.hpp"
#include "metaglyph/font/ufo.hpp"
#include "metaglyph/font/variation.hpp"
#include "metaglyph/service.hpp"

namespace fs = std::filesystem;
using namespace metaglyph;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUsage = 2, kIo = 3 };

constexpr const char* kManifestEnv = "METAGLYPH_MANIFEST";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text) || !out.flush()) throw IoFailure("cannot write " + p.string());
  }
  fs::rename(tmp, p, ec);
  if (ec) throw IoFailure("cannot write " + p.string() + ": " + ec.message());
}

std::pair<std::string, double> parse_setting(const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected name=value, got '" + kv + "'");
  const std::string name = kv.substr(0, eq), value = kv.substr(eq + 1);
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (value.empty() || *end != '\0' || !std::isfinite(v)) throw UsageError("'" + value + "' is not a number");
  return {name, v};
}

font::Location parse_location(const std::string& text) {
  font::Location loc;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    auto [k, v] = parse_setting(item);
    loc[k] = v;
  }
  return loc;
}

fs::path manifest_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kManifestEnv); env && *env) return env;
  throw UsageError(std::string("no manifest: pass --manifest or set ") + kManifestEnv);
}

font::Manifest load_manifest(const std::string& flag) {
  fs::path p = manifest_path(flag);
  if (!fs::exists(p)) throw IoFailure("manifest not found: " + p.string());
  return font::Manifest::load(p);
}

font::MasterSet build_all(const font::Manifest& m, bool serial) {
  font::BuildOptions opts;
  opts.parallel = !serial;
  font::MasterSet set;
  set.axes = m.axes;
  set.masters = m.masters;
  set.instances = m.instances;
  set.sets = font::build_masters(m, font::SourceSet::load(m), {}, opts);
  return set;
}

void print_warnings(const font::GlyphSet& set) {
  for (const auto& g : set.glyphs)
    for (const auto& w : g.warnings) std::cerr << w << "\n";
}

// --- subcommands -----------------------------------------------------------

struct CompileArgs {
  std::string file;
  std::vector<std::string> settings;
  std::string svg;
  bool debug = false;
  std::string style;
  std::vector<std::string> includes;
  bool params = false;
};

// Nearest ancestor of the glyph file holding a project manifest.
std::optional<fs::path> project_root(const fs::path& file) {
  for (fs::path d = fs::absolute(file).parent_path(); !d.empty(); d = d.parent_path()) {
    if (fs::exists(d / "project.json")) return d;
    if (d == d.root_path()) break;
  }
  return std::nullopt;
}

int run_compile(const CompileArgs& a) {
  const std::string source = read_file(a.file);
  dsl::EvalOptions eo;
  for (const auto& s : a.settings) eo.overrides.insert(parse_setting(s));
  std::vector<fs::path> roots;
  for (const auto& i : a.includes) roots.emplace_back(i);
  if (auto root = project_root(a.file)) roots.push_back(*root);
  dsl::Compilation c = dsl::compile(source, a.file, dsl::file_loader(roots), eo);
  std::cerr << c.format_diagnostics();
  if (!c.ok()) return kInvalid;

  const auto& g = c.glyph;
  font::SvgFrame frame = font::SvgFrame::around(g.outline);
  std::string svg;
  if (a.debug) {
    font::DebugOverlay overlay;
    overlay.guides = g.strokes;
    for (const auto& [name, path] : g.paths) overlay.guides.push_back(path.contour);
    overlay.points = g.points;
    std::string style = a.style.empty() ? std::string(font::kDefaultDebugStyle) : read_file(a.style);
    svg = font::svg_document(g.outline, frame, &overlay, style);
  } else {
    svg = font::svg_document(g.outline, frame);
  }
  if (a.params)
    for (const auto& [k, v] : g.parameters) std::cerr << k << " = " << font::svg_number(v) << "\n";
  if (a.svg.empty() || a.svg == "-") std::cout << svg;
  else write_file(a.svg, svg);
  return kOk;
}

struct BuildArgs {
  std::string manifest;
  std::vector<std::string> masters;
  std::string svg_dir;
  bool serial = false;
};

int run_build(const BuildArgs& a) {
  font::Manifest m = load_manifest(a.manifest);
  font::BuildOptions opts;
  opts.parallel = !a.serial;
  auto sets = font::build_masters(m, font::SourceSet::load(m), a.masters, opts);
  for (const auto& s : sets) {
    print_warnings(s);
    std::size_t contours = 0;
    for (const auto& g : s.glyphs) contours += g.outline.size();
    std::cout << s.name << ": " << s.glyphs.size() << " glyphs, " << contours << " contours, thick "
              << font::svg_number(s.config.thick) << "\n";
    if (!a.svg_dir.empty()) font::write_svg(s, fs::path(a.svg_dir) / s.name);
  }
  return kOk;
}

int run_check(const std::string& manifest, bool serial) {
  font::Manifest m = load_manifest(manifest);
  font::MasterSet set = build_all(m, serial);
  font::CompatibilityReport r = font::check_compatibility(set.sets);
  std::cout << r.to_string();
  return r.compatible() ? kOk : kInvalid;
}

struct InstanceArgs {
  std::string manifest;
  std::string loc;
  std::string name;
  std::string svg_dir;
  std::string ufo;
};

int run_instance(const InstanceArgs& a) {
  font::Manifest m = load_manifest(a.manifest);
  font::Location loc = parse_location(a.loc);
  font::MasterSet set = build_all(m, false);
  font::GlyphSet inst = font::interpolate(set, loc, a.name.empty() ? "Instance" : a.name);
  if (!a.svg_dir.empty()) font::write_svg(inst, a.svg_dir);
  if (!a.ufo.empty()) font::write_ufo(inst, {m.family, inst.name, m.version}, a.ufo);
  std::cout << inst.name << ": " << inst.glyphs.size() << " glyphs, thick " << font::svg_number(inst.config.thick)
            << "\n";
  return kOk;
}

struct EmitArgs {
  std::string manifest;
  std::string out;
  bool decimals = false;
  std::string education;
  double spacing = 0;
};

int run_emit(const EmitArgs& a) {
  font::Manifest m = load_manifest(a.manifest);
  font::MasterSet set = build_all(m, false);
  font::CompatibilityReport r = font::check_compatibility(set.sets);
  if (!r.compatible()) {
    std::cerr << r.to_string();
    return kInvalid;
  }
  std::optional<font::EducationMode> mode;
  if (a.education == "dots") mode = font::EducationMode::Dots;
  else if (a.education == "arrows") mode = font::EducationMode::Arrows;
  else if (!a.education.empty()) throw UsageError("--education takes dots or arrows");

  std::string family = m.family;
  if (mode) family += *mode == font::EducationMode::Dots ? " Dots" : " Arrows";
  std::string file_family;
  for (char c : family)
    if (c != ' ') file_family += c;

  const fs::path out = a.out;
  std::map<std::string, fs::path> ufos;
  font::UfoOptions uo;
  uo.round_to_integer = !a.decimals;
  for (std::size_t i = 0; i < set.masters.size(); ++i) {
    font::GlyphSet s = set.sets[i];
    if (mode) {
      const double spacing = a.spacing > 0 ? a.spacing : s.config.thick * 1.5;
      s = font::derive_education_variant(s, *mode, spacing);
    }
    const fs::path ufo = out / (file_family + "-" + set.masters[i].name + ".ufo");
    font::write_ufo(s, {family, set.masters[i].name, m.version}, ufo, uo);
    ufos[set.masters[i].name] = ufo;
  }
  const fs::path ds = out / (file_family + ".designspace");
  font::write_designspace(set, family, ufos, ds);
  std::cout << "wrote " << ufos.size() << " UFOs and " << ds.string() << "\n";
  return kOk;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::size_t max_bytes = service::kDefaultMaxRequestBytes;
};

int run_serve(const ServeArgs& a) {
  service::ServiceOptions o;
  o.host = a.host;
  o.port = a.port;
  if (!a.static_dir.empty()) {
    if (!fs::is_directory(a.static_dir)) throw IoFailure("static directory not found: " + a.static_dir);
    o.static_dir = a.static_dir;
  }
  o.max_request_bytes = a.max_bytes;
  service::Server server(o);
  const int port = server.bind();
  if (port < 0) throw IoFailure("cannot bind " + a.host + ":" + std::to_string(a.port));
  std::cerr << "listening on http://" << a.host << ":" << port << "\n";
  return server.listen() ? kOk : kIo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parametric glyph compiler and font pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", service::version_string());

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Evaluate one glyph program and write SVG");
  compile->add_option("file", ca.file, "Glyph program (.mpg)")->required();
  compile->add_option("--set", ca.settings, "Override a parameter (name=value), repeatable");
  compile->add_option("--svg", ca.svg, "Output SVG file (default: standard output)");
  compile->add_flag("--debug", ca.debug, "Draw knots, control handles and centre lines");
  compile->add_option("--debug-style", ca.style, "CSS file replacing the debug overlay style");
  compile->add_option("-I,--include", ca.includes, "Extra include directory, repeatable");
  compile->add_flag("--params", ca.params, "Print parameter values to standard error");

  BuildArgs ba;
  auto* build = app.add_subcommand("build", "Build master glyph sets");
  build->add_option("--manifest", ba.manifest, std::string("Project manifest (default: $") + kManifestEnv + ")");
  build->add_option("--master", ba.masters, "Build only this master, repeatable");
  build->add_option("--svg-dir", ba.svg_dir, "Write <dir>/<master>/<glyph>.svg");
  build->add_flag("--serial", ba.serial, "Use the serial reference path");

  std::string check_manifest;
  bool check_serial = false;
  auto* check = app.add_subcommand("check", "Check master compatibility (exit 1 on mismatch)");
  check->add_option("--manifest", check_manifest, "Project manifest");
  check->add_flag("--serial", check_serial, "Use the serial reference path");

  InstanceArgs ia;
  auto* instance = app.add_subcommand("instance", "Interpolate an instance");
  instance->add_option("--manifest", ia.manifest, "Project manifest");
  instance->add_option("--loc", ia.loc, "Location, e.g. wght=550,wdth=80")->required();
  instance->add_option("--name", ia.name, "Instance style name");
  instance->add_option("--svg-dir", ia.svg_dir, "Write one SVG per glyph");
  instance->add_option("--ufo", ia.ufo, "Write the instance as a UFO");

  EmitArgs ea;
  auto* emit = app.add_subcommand("emit", "Write master UFOs and a designspace");
  emit->add_option("--manifest", ea.manifest, "Project manifest");
  emit->add_option("--out", ea.out, "Output directory")->required();
  emit->add_flag("--decimals", ea.decimals, "Keep 3 decimals instead of rounding to integers");
  emit->add_option("--education", ea.education, "Emit a dots or arrows variant instead");
  emit->add_option("--spacing", ea.spacing, "Arc-length spacing for --education (default 1.5 thick)");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the playground compile service");
  serve->add_option("--host", sa.host, "Bind address");
  serve->add_option("--port", sa.port, "Port (0 picks a free one)")->envname("METAGLYPH_PORT");
  serve->add_option("--static-dir", sa.static_dir, "Directory served at /")->envname("METAGLYPH_STATIC_DIR");
  serve->add_option("--max-request-bytes", sa.max_bytes, "Request size limit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kUsage;
  }

  try {
    if (*compile) return run_compile(ca);
    if (*build) return run_build(ba);
    if (*check) return run_check(check_manifest, check_serial);
    if (*instance) return run_instance(ia);
    if (*emit) return run_emit(ea);
    if (*serve) return run_serve(sa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const font::BuildError& e) {
    for (const auto& f : e.failures()) {
      std::cerr << "error: " << (f.master.empty() ? "" : f.master + "/") << f.glyph << " failed\n" << f.report;
      if (!f.report.empty() && f.report.back() != '\n') std::cerr << "\n";
    }
    return kInvalid;
  } catch (const font::ManifestError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const font::VariationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const font::EducationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const font::DesignspaceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const font::UfoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

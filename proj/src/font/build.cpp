#include "metaglyph/font/build.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "metaglyph/dsl/evaluator.hpp"
#include "metaglyph/dsl/includes.hpp"
#include "metaglyph/dsl/syntax.hpp"

namespace metaglyph::font {

namespace fs = std::filesystem;

namespace {

constexpr const char* kAdvanceVar = "manifest_advance";

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_all(const std::vector<dsl::Diagnostic>& ds, const std::vector<std::string>& files,
                       dsl::Severity only) {
  std::string out;
  for (const auto& d : ds)
    if (d.severity == only) out += dsl::format(d, files) + "\n";
  return out;
}

struct Outcome {
  std::optional<BuiltGlyph> glyph;
  std::string error;
};

Outcome build_one(const SourceSet::Source& src, const MasterConfig& mc, const BuildOptions& opts) {
  dsl::EvalOptions eo;
  eo.overrides = mc.parameters;
  if (opts.glyph_timeout) eo.deadline = std::chrono::steady_clock::now() + *opts.glyph_timeout;
  dsl::GlyphResult r = dsl::evaluate(src.program, eo);
  if (!r.ok()) return {std::nullopt, format_all(r.diagnostics, src.program.files, dsl::Severity::Error)};

  BuiltGlyph g;
  g.name = src.entry.name ? *src.entry.name : (!r.name.empty() ? r.name : src.entry.source.stem().string());
  g.unicode = src.entry.unicode ? src.entry.unicode : r.unicode;
  std::string warnings = format_all(r.diagnostics, src.program.files, dsl::Severity::Warning);
  std::istringstream ws(warnings);
  for (std::string line; std::getline(ws, line);) g.warnings.push_back(line);

  std::optional<double> advance = r.advance;
  if (src.entry.advance) {
    for (const auto& [k, v] : r.parameters)
      if (k == kAdvanceVar) advance = v;
  }
  double adv = advance.value_or(0.0);
  Affine m = placement(mc.config, r.outline, !advance, adv);
  g.advance = adv;
  g.outline = transform(r.outline, m);
  g.strokes = transform(r.strokes, m);
  return {std::move(g), {}};
}

}  // namespace

const BuiltGlyph* GlyphSet::find(const std::string& glyph) const {
  for (const auto& g : glyphs)
    if (g.name == glyph) return &g;
  return nullptr;
}

BuildError::BuildError(std::vector<GlyphFailure> failures)
    : std::runtime_error([&] {
        std::string msg = std::to_string(failures.size()) + " glyph(s) failed to build";
        for (const auto& f : failures) msg += "\n" + f.master + "/" + f.glyph + ":\n" + f.report;
        return msg;
      }()),
      failures_(std::move(failures)) {}

SourceSet SourceSet::load(const Manifest& manifest) {
  SourceSet set;
  std::vector<GlyphFailure> failures;
  dsl::Loader loader = dsl::file_loader({manifest.root});
  for (const auto& entry : manifest.glyphs) {
    std::string text;
    try {
      text = read_text(entry.source);
    } catch (const std::exception& e) {
      failures.push_back({"", entry.source.string(), e.what()});
      continue;
    }
    dsl::ParseResult pr = dsl::parse(text, entry.source.string());
    std::vector<dsl::Diagnostic> diags = pr.diagnostics;
    dsl::Program flat;
    if (pr.ok()) flat = dsl::resolve_includes(pr.program, loader, diags);
    if (dsl::has_errors(diags)) {
      const auto& files = pr.ok() ? flat.files : pr.program.files;
      failures.push_back({"", entry.source.string(), format_all(diags, files, dsl::Severity::Error)});
      continue;
    }
    if (entry.advance) {
      dsl::ParseResult adv = dsl::parse(std::string(kAdvanceVar) + " := (" + *entry.advance + ");",
                                        entry.source.string() + " (manifest advance)");
      if (!adv.ok()) {
        failures.push_back({"", entry.source.string(),
                            format_all(adv.diagnostics, adv.program.files, dsl::Severity::Error)});
        continue;
      }
      auto file = static_cast<std::uint32_t>(flat.files.size());
      flat.files.push_back(adv.program.files[0]);
      for (dsl::Node st : adv.program.statements) {
        std::function<void(dsl::Node&)> shift = [&](dsl::Node& n) {
          n.span.file = file;
          for (auto& k : n.kids) shift(k);
        };
        shift(st);
        flat.statements.push_back(std::move(st));
      }
    }
    set.glyphs.push_back({entry, std::move(flat)});
  }
  if (!failures.empty()) throw BuildError(std::move(failures));
  return set;
}

MasterConfig resolve_master_config(const Manifest& manifest, const MasterSpec& spec) {
  std::string text;
  try {
    text = read_text(spec.config);
  } catch (const std::exception& e) {
    throw BuildError({{spec.name, "(config)", e.what()}});
  }
  dsl::EvalOptions eo;
  eo.overrides = spec.overrides;
  dsl::Compilation c = dsl::compile(text, spec.config.string(), dsl::file_loader({manifest.root}), eo);
  if (!c.ok()) throw BuildError({{spec.name, "(config)", c.format_diagnostics()}});
  MasterConfig mc;
  for (const auto& [k, v] : c.glyph.parameters) mc.parameters[k] = v;
  try {
    mc.config = TypographicConfig::from_parameters(mc.parameters);
  } catch (const ConfigError& e) {
    throw BuildError({{spec.name, "(config)", e.what()}});
  }
  return mc;
}

Affine placement(const TypographicConfig& config, const Outline& outline, bool derive_advance, double& advance) {
  Affine shift = Affine::identity();
  if (derive_advance) {
    if (outline.empty()) {
      advance = config.lbearing + config.rbearing;
    } else {
      BBox b = bbox(outline);
      shift = Affine::translation(config.lbearing - b.xmin, 0);
      advance = b.width() + config.lbearing + config.rbearing;
    }
  }
  advance *= config.condense;
  return Affine::slant(config.slant) * Affine::scaling(config.condense, 1) * shift;
}

std::vector<GlyphSet> build_masters(const Manifest& manifest, const SourceSet& sources,
                                    const std::vector<std::string>& only, const BuildOptions& options) {
  std::vector<const MasterSpec*> specs;
  for (const auto& m : manifest.masters)
    if (only.empty() || std::find(only.begin(), only.end(), m.name) != only.end()) specs.push_back(&m);
  for (const auto& name : only) manifest.master(name);

  std::vector<GlyphSet> sets(specs.size());
  std::vector<MasterConfig> configs;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    configs.push_back(resolve_master_config(manifest, *specs[i]));
    sets[i].name = specs[i]->name;
    sets[i].config = configs[i].config;
    sets[i].parameters = configs[i].parameters;
  }

  const std::size_t per = sources.glyphs.size();
  const auto jobs = static_cast<long>(specs.size() * per);
  std::vector<Outcome> out(static_cast<std::size_t>(jobs));
  auto work = [&](long j) {
    const std::size_t m = static_cast<std::size_t>(j) / per, g = static_cast<std::size_t>(j) % per;
    try {
      out[static_cast<std::size_t>(j)] = build_one(sources.glyphs[g], configs[m], options);
    } catch (const std::exception& e) {
      out[static_cast<std::size_t>(j)] = {std::nullopt, e.what()};
    }
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < jobs; ++j) work(j);
  } else {
    for (long j = 0; j < jobs; ++j) work(j);
  }

  std::vector<GlyphFailure> failures;
  for (long j = 0; j < jobs; ++j) {
    const std::size_t m = static_cast<std::size_t>(j) / per, g = static_cast<std::size_t>(j) % per;
    Outcome& o = out[static_cast<std::size_t>(j)];
    if (o.glyph) sets[m].glyphs.push_back(std::move(*o.glyph));
    else failures.push_back({specs[m]->name, sources.glyphs[g].entry.source.filename().string(), o.error});
  }
  if (!failures.empty()) throw BuildError(std::move(failures));

  for (const auto& s : sets) {
    std::set<std::string> seen;
    for (const auto& g : s.glyphs)
      if (!seen.insert(g.name).second) throw BuildError({{s.name, g.name, "duplicate glyph name"}});
  }
  return sets;
}

GlyphSet build_master(const Manifest& manifest, const MasterSpec& spec, const BuildOptions& options) {
  SourceSet sources = SourceSet::load(manifest);
  return std::move(build_masters(manifest, sources, {spec.name}, options).front());
}

}  // namespace metaglyph::font

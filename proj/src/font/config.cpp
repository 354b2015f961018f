#include "metaglyph/font/config.hpp"

#include <cmath>

namespace metaglyph::font {

namespace {

struct Field {
  const char* name;
  double TypographicConfig::*member;
};

constexpr Field kFields[] = {
    {"em", &TypographicConfig::em},
    {"u", &TypographicConfig::u},
    {"ascent", &TypographicConfig::ascent},
    {"descent", &TypographicConfig::descent},
    {"xheight", &TypographicConfig::xheight},
    {"mheight", &TypographicConfig::mheight},
    {"Xheight", &TypographicConfig::Xheight},
    {"thick", &TypographicConfig::thick},
    {"thin", &TypographicConfig::thin},
    {"subthick", &TypographicConfig::subthick},
    {"xthick", &TypographicConfig::xthick},
    {"slant", &TypographicConfig::slant},
    {"condense", &TypographicConfig::condense},
    {"terminalround", &TypographicConfig::terminalround},
    {"lbearing", &TypographicConfig::lbearing},
    {"rbearing", &TypographicConfig::rbearing},
};

}  // namespace

TypographicConfig TypographicConfig::from_parameters(const std::map<std::string, double>& params) {
  TypographicConfig c;
  std::string missing;
  for (const auto& f : kFields) {
    auto it = params.find(f.name);
    if (it == params.end()) missing += std::string(missing.empty() ? "" : ", ") + f.name;
    else c.*f.member = it->second;
  }
  if (!missing.empty()) throw ConfigError("config does not define " + missing);
  auto bad = c.violations();
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += " " + b + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }
  return c;
}

std::vector<std::string> TypographicConfig::violations() const {
  std::vector<std::string> out;
  for (const auto& f : kFields)
    if (!std::isfinite(this->*f.member)) out.push_back(std::string(f.name) + " is not finite");
  if (!(em > 0)) out.push_back("em must be positive");
  if (std::abs(u - em / 10) > 1e-9 * std::abs(em)) out.push_back("u must equal em/10");
  if (!(condense > 0)) out.push_back("condense must be positive");
  if (!(thin > 0 && thin <= 1)) out.push_back("thin must lie in (0, 1]");
  return out;
}

std::map<std::string, double> TypographicConfig::to_map() const {
  std::map<std::string, double> out;
  for (const auto& f : kFields) out[f.name] = this->*f.member;
  return out;
}

}  // namespace metaglyph::font

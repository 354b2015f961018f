#include "metaglyph/font/variation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "metaglyph/font/compat.hpp"
#include "metaglyph/font/svg.hpp"

namespace metaglyph::font {

double normalize_value(double v, const AxisDef& a) {
  v = std::clamp(v, a.minimum, a.maximum);
  if (v == a.default_value) return 0.0;
  if (v < a.default_value) return (v - a.default_value) / (a.default_value - a.minimum);
  return (v - a.default_value) / (a.maximum - a.default_value);
}

Location normalize_location(const Location& user, std::span<const AxisDef> axes) {
  Location out;
  for (const auto& a : axes) {
    auto it = user.find(a.tag);
    double v = it == user.end() ? a.default_value : it->second;
    double n = normalize_value(v, a);
    if (n != 0.0) out[a.tag] = n;
  }
  return out;
}

double support_scalar(const Location& loc, const VariationModel::Region& support) {
  double scalar = 1.0;
  for (const auto& [axis, s] : support) {
    if (s.peak == 0.0) continue;
    if (s.lower > s.peak || s.peak > s.upper) continue;
    if (s.lower < 0.0 && s.upper > 0.0) continue;
    auto it = loc.find(axis);
    double v = it == loc.end() ? 0.0 : it->second;
    if (v == s.peak) continue;
    if (v <= s.lower || s.upper <= v) return 0.0;
    if (v < s.peak) scalar *= (v - s.lower) / (s.peak - s.lower);
    else scalar *= (v - s.upper) / (s.peak - s.upper);
  }
  return scalar;
}

VariationModel::VariationModel(std::vector<Location> locations) {
  for (auto& l : locations)
    std::erase_if(l, [](const auto& kv) { return kv.second == 0.0; });
  if (std::count(locations.begin(), locations.end(), Location{}) != 1)
    throw VariationError("exactly one master must sit at the default location");

  // Sort: fewer active axes first, on-axis masters before off-axis ones.
  std::map<std::string, std::set<double>> axis_points;
  for (const auto& l : locations)
    if (l.size() == 1) {
      auto& pts = axis_points[l.begin()->first];
      pts.insert(0.0);
      pts.insert(l.begin()->second);
    }
  auto key = [&](const Location& l) {
    long on_point = 0;
    std::vector<std::string> axes;
    std::vector<int> signs;
    std::vector<double> mags;
    for (const auto& [a, v] : l) {
      auto it = axis_points.find(a);
      if (it != axis_points.end() && it->second.contains(v)) ++on_point;
      axes.push_back(a);
      signs.push_back(v < 0 ? -1 : 1);
      mags.push_back(std::abs(v));
    }
    return std::make_tuple(l.size(), -on_point, axes, signs, mags);
  };
  std::vector<std::size_t> order(locations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key(locations[a]) < key(locations[b]); });
  for (std::size_t i : order) sorted_.push_back(locations[i]);
  mapping_.resize(locations.size());
  for (std::size_t m = 0; m < order.size(); ++m) mapping_[order[m]] = m;

  // Initial regions span from the origin to the extreme master on each axis.
  std::map<std::string, double> min_v, max_v;
  for (const auto& l : sorted_)
    for (const auto& [a, v] : l) {
      min_v[a] = std::min(v, min_v.contains(a) ? min_v[a] : v);
      max_v[a] = std::max(v, max_v.contains(a) ? max_v[a] : v);
    }
  std::vector<Region> regions;
  for (const auto& l : sorted_) {
    Region r;
    for (const auto& [a, v] : l) r[a] = v > 0 ? Support{0, v, max_v[a]} : Support{min_v[a], v, 0};
    regions.push_back(std::move(r));
  }

  // Shrink each region so earlier masters inside it are not double counted.
  for (std::size_t i = 0; i < regions.size(); ++i) {
    Region& region = regions[i];
    for (std::size_t p = 0; p < i; ++p) {
      const Region& prev = regions[p];
      bool subset = std::all_of(prev.begin(), prev.end(), [&](const auto& kv) { return region.contains(kv.first); });
      if (!subset) continue;
      bool relevant = true;
      for (const auto& [a, s] : region) {
        auto it = prev.find(a);
        double pv = it == prev.end() ? 0.0 : it->second.peak;
        if (!(pv == s.peak || (s.lower < pv && pv < s.upper))) {
          relevant = false;
          break;
        }
      }
      if (!relevant) continue;
      std::map<std::string, Support> best;
      double best_ratio = -1;
      for (const auto& [a, ps] : prev) {
        double val = ps.peak;
        Support cur = region.at(a);
        Support next = cur;
        double ratio;
        if (val < cur.peak) {
          next.lower = val;
          ratio = (val - cur.peak) / (cur.lower - cur.peak);
        } else if (cur.peak < val) {
          next.upper = val;
          ratio = (val - cur.peak) / (cur.upper - cur.peak);
        } else {
          continue;
        }
        if (ratio > best_ratio) {
          best.clear();
          best_ratio = ratio;
        }
        if (ratio == best_ratio) best[a] = next;
      }
      for (const auto& [a, s] : best) region[a] = s;
    }
  }
  supports_ = std::move(regions);

  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    std::map<std::size_t, double> w;
    for (std::size_t j = 0; j < i; ++j) {
      double s = support_scalar(sorted_[i], supports_[j]);
      if (s != 0.0) w[j] = s;
    }
    delta_weights_.push_back(std::move(w));
  }
}

std::vector<double> VariationModel::support_scalars(const Location& loc) const {
  std::vector<double> out;
  for (const auto& s : supports_) out.push_back(support_scalar(loc, s));
  return out;
}

std::vector<double> VariationModel::master_scalars(const Location& loc) const {
  std::vector<double> out = support_scalars(loc);
  for (std::size_t i = delta_weights_.size(); i-- > 0;)
    for (const auto& [j, w] : delta_weights_[i]) out[j] -= out[i] * w;
  std::vector<double> result(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) result[i] = out[mapping_[i]];
  return result;
}

namespace {

struct Blend {
  std::vector<std::pair<std::size_t, double>> terms;  // nonzero weights only

  double operator()(const std::vector<double>& values) const {
    double acc = 0.0;
    bool first = true;
    for (const auto& [i, w] : terms) {
      double t = w * values[i];
      acc = first ? t : acc + t;
      first = false;
    }
    return acc;
  }
};

}  // namespace

GlyphSet interpolate(const MasterSet& set, const Location& location, const std::string& name) {
  if (set.sets.size() != set.masters.size() || set.sets.empty()) throw VariationError("master set is incomplete");
  for (const auto& [tag, v] : location) {
    auto it = std::find_if(set.axes.begin(), set.axes.end(), [&](const AxisDef& a) { return a.tag == tag; });
    if (it == set.axes.end()) throw VariationError("unknown axis " + tag);
    if (!(v >= it->minimum && v <= it->maximum))
      throw VariationError(tag + "=" + svg_number(v) + " is outside " + svg_number(it->minimum) + ".." +
                           svg_number(it->maximum));
  }
  CompatibilityReport report = check_compatibility(set.sets);
  if (!report.compatible()) throw VariationError("masters are not compatible:\n" + report.to_string());

  std::vector<Location> locs;
  for (const auto& m : set.masters) locs.push_back(normalize_location(m.location, set.axes));
  VariationModel model(locs);
  std::vector<double> scalars = model.master_scalars(normalize_location(location, set.axes));
  Blend blend;
  for (std::size_t i = 0; i < scalars.size(); ++i)
    if (scalars[i] != 0.0) blend.terms.emplace_back(i, scalars[i]);

  const std::size_t n = set.sets.size();
  std::vector<double> vals(n);
  auto mix = [&](auto get) {
    for (std::size_t i = 0; i < n; ++i) vals[i] = get(set.sets[i]);
    return blend(vals);
  };

  const GlyphSet& ref = set.sets.front();
  GlyphSet out;
  out.name = name;
  for (const auto& [k, v] : ref.parameters) {
    bool everywhere = std::all_of(set.sets.begin(), set.sets.end(),
                                  [&](const GlyphSet& s) { return s.parameters.contains(k); });
    if (everywhere) out.parameters[k] = mix([&](const GlyphSet& s) { return s.parameters.at(k); });
  }
  out.config = TypographicConfig::from_parameters(out.parameters);

  auto mix_outline = [&](auto member, std::size_t g) {
    const Outline& shape = ref.glyphs[g].*member;
    Outline o = shape;
    for (std::size_t c = 0; c < shape.size(); ++c) {
      for (std::size_t s = 0; s < shape[c].segments.size(); ++s) {
        Point CubicSegment::*pts[] = {&CubicSegment::p0, &CubicSegment::c0, &CubicSegment::c1, &CubicSegment::p1};
        for (auto p : pts) {
          auto at = [&](const GlyphSet& gs) -> const Point& {
            return (gs.find(ref.glyphs[g].name)->*member)[c].segments[s].*p;
          };
          (o[c].segments[s].*p).x = mix([&](const GlyphSet& gs) { return at(gs).x; });
          (o[c].segments[s].*p).y = mix([&](const GlyphSet& gs) { return at(gs).y; });
        }
      }
    }
    return o;
  };

  for (std::size_t g = 0; g < ref.glyphs.size(); ++g) {
    const BuiltGlyph& rg = ref.glyphs[g];
    BuiltGlyph bg;
    bg.name = rg.name;
    bg.unicode = rg.unicode;
    bg.advance = mix([&](const GlyphSet& s) { return s.find(rg.name)->advance; });
    bg.outline = mix_outline(&BuiltGlyph::outline, g);
    bool strokes_match = std::all_of(set.sets.begin(), set.sets.end(), [&](const GlyphSet& s) {
      const auto& st = s.find(rg.name)->strokes;
      if (st.size() != rg.strokes.size()) return false;
      for (std::size_t i = 0; i < st.size(); ++i)
        if (st[i].segments.size() != rg.strokes[i].segments.size()) return false;
      return true;
    });
    if (strokes_match) bg.strokes = mix_outline(&BuiltGlyph::strokes, g);
    out.glyphs.push_back(std::move(bg));
  }
  return out;
}

}  // namespace metaglyph::font

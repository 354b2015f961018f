// Serial reference vs OpenMP master build over the sample project, with the
// glyph list replicated to give the scheduler enough jobs.

#include <benchmark/benchmark.h>

#include <string>

#include "metaglyph/font/build.hpp"

using namespace metaglyph::font;

namespace {

Manifest replicated(int copies) {
  Manifest base = Manifest::load(METAGLYPH_SAMPLES "/project.json");
  std::vector<GlyphEntry> glyphs;
  for (int c = 0; c < copies; ++c) {
    for (auto e : base.glyphs) {
      e.name = e.source.stem().string() + "." + std::to_string(c);
      e.unicode.reset();
      glyphs.push_back(std::move(e));
    }
  }
  base.glyphs = std::move(glyphs);
  return base;
}

void run(benchmark::State& state, bool parallel) {
  const Manifest m = replicated(static_cast<int>(state.range(0)));
  const SourceSet sources = SourceSet::load(m);
  BuildOptions opts;
  opts.parallel = parallel;
  std::size_t glyphs = 0;
  for (auto _ : state) {
    auto sets = build_masters(m, sources, {}, opts);
    glyphs += sets.size() * sets.front().glyphs.size();
    benchmark::DoNotOptimize(sets);
  }
  state.counters["glyphs/s"] = benchmark::Counter(static_cast<double>(glyphs), benchmark::Counter::kIsRate);
}

void BM_BuildSerial(benchmark::State& state) { run(state, false); }
void BM_BuildOpenMP(benchmark::State& state) { run(state, true); }

}  // namespace

BENCHMARK(BM_BuildSerial)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BuildOpenMP)->Arg(1)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();

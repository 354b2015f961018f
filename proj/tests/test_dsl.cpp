#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "metaglyph/dsl/evaluator.hpp"
#include "metaglyph/dsl/prelude.hpp"
#include "metaglyph/dsl/syntax.hpp"
#include "oracles/dense_linear.hpp"

using namespace metaglyph;
using namespace metaglyph::dsl;
namespace fs = std::filesystem;

namespace {

const fs::path kData = METAGLYPH_TEST_DATA;
const fs::path kSamples = METAGLYPH_SAMPLES;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Compilation run(const std::string& src, std::map<std::string, double> overrides = {}) {
  EvalOptions o;
  o.overrides = std::move(overrides);
  return compile(src, "t.mpg", prelude_loader(), o);
}

Compilation run_file(const fs::path& p, std::map<std::string, double> overrides = {}) {
  EvalOptions o;
  o.overrides = std::move(overrides);
  return compile(slurp(p), p.string(), file_loader({kSamples}), o);
}

double param(const GlyphResult& g, const std::string& name) {
  for (const auto& [k, v] : g.parameters)
    if (k == name) return v;
  FAIL("no parameter " << name);
  return 0;
}

std::vector<fs::path> corpus() {
  std::vector<fs::path> out;
  for (const fs::path dir : {kData, kSamples / "config", kSamples / "glyphs"})
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".mpg") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t errors(const std::vector<Diagnostic>& ds) {
  return std::count_if(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

}  // namespace

TEST_CASE("square program parses to an assignment and a five-knot line path") {
  ParseResult r = parse(slurp(kData / "square.mpg"));
  REQUIRE(r.ok());
  REQUIRE(r.program.statements.size() == 2);
  const Node& a = r.program.statements[0];
  CHECK(a.kind == Kind::Assign);
  CHECK(a.text == "side");
  CHECK(a.kids[0].kind == Kind::Number);
  CHECK(a.kids[0].number == 10);
  const Node& d = r.program.statements[1];
  CHECK(d.kind == Kind::Draw);
  const Node& path = d.kids[0];
  REQUIRE(path.kind == Kind::Path);
  int knots = 0, lines = 0;
  for (const Node& item : path.kids) {
    knots += item.kind == Kind::Knot;
    lines += item.kind == Kind::Join && item.text == "--";
  }
  CHECK(knots == 5);
  CHECK(lines == 4);
}

TEST_CASE("direction specs land on the right knots") {
  auto c = run(
      "z0 = (50, 0); z1 = (0, 100); z2 = (100, 200); z3 = (200, 100); z4 = (150, 0);\n"
      "path p; p := z0{dir 135}..z1..z2{right}..z3{dir 260}..z4;");
  REQUIRE(c.ok());
  const auto& spec = c.glyph.paths.at("p").spec;
  REQUIRE(spec.knots.size() == 5);
  CHECK(spec.knots[0].dir_out.value() == doctest::Approx(135));
  CHECK_FALSE(spec.knots[1].dir_in);
  CHECK_FALSE(spec.knots[1].dir_out);
  CHECK(spec.knots[2].dir_out.value() == doctest::Approx(0));
  CHECK(std::remainder(spec.knots[3].dir_out.value() - 260, 360) == doctest::Approx(0));
  CHECK_FALSE(spec.knots[4].dir_in);
  CHECK(hobby::direction_at(c.glyph.paths.at("p").contour, 0) == doctest::Approx(135));
}

TEST_CASE("empty source") {
  ParseResult r = parse("");
  CHECK(r.ok());
  CHECK(r.program.statements.empty());
  auto c = run("");
  CHECK(c.ok());
  CHECK(c.glyph.outline.empty());
  CHECK(c.diagnostics.empty());
}

TEST_CASE("square follows its side parameter") {
  const std::string src = slurp(kData / "square.mpg");
  auto a = run(src);
  REQUIRE(a.ok());
  CHECK(bbox(a.glyph.outline) == BBox{0, 0, 10, 10});
  REQUIRE(a.glyph.outline.size() == 1);
  CHECK(a.glyph.outline[0].closed);
  CHECK(a.glyph.outline[0].segments.size() == 4);
  auto b = run(src, {{"side", 20}});
  REQUIRE(b.ok());
  CHECK(bbox(b.glyph.outline) == BBox{0, 0, 20, 20});
  CHECK(param(b.glyph, "side") == 20);
}

TEST_CASE("typographic dashes read as line joins with a warning") {
  auto c = run("side:=10;\ndraw (0,0) \xE2\x80\x94 (side,0) \xE2\x80\x94 (side,side) --(0,side) \xE2\x80\x94 (0,0);");
  REQUIRE(c.ok());
  CHECK(bbox(c.glyph.outline) == BBox{0, 0, 10, 10});
  CHECK(c.glyph.outline[0].segments.size() == 4);
  CHECK(std::any_of(c.diagnostics.begin(), c.diagnostics.end(),
                    [](const Diagnostic& d) { return d.severity == Severity::Warning && d.span.line == 2; }));
}

TEST_CASE("implicit equations place the Ra knots") {
  auto c = run_file(kData / "ra_equations.mpg");
  REQUIRE(c.ok());
  // Independent dense solve of the same ten scalar equations.
  const double w = 100, h = 100;
  auto sol = oracle::dense_solve_named({
      {{{"x0", 1}, {"x1", -1}}, w / 4},
      {{{"y0", 1}}, 0},
      {{{"x1", 1}}, 0},
      {{{"y1", 1}, {"y0", -1}}, h / 2},
      {{{"x2", 1}, {"x1", -1}}, w / 2},
      {{{"y2", 1}, {"y1", -1}}, h / 2},
      {{{"x3", 1}, {"x2", -1}}, w / 2},
      {{{"y3", 1}, {"y1", -1}}, 0},
      {{{"x4", 1}, {"x3", -1}}, -w / 4},
      {{{"y4", 1}, {"y0", -1}}, 0},
  });
  const std::vector<Point> expected{{25, 0}, {0, 50}, {50, 100}, {100, 50}, {75, 0}};
  for (int i = 0; i < 5; ++i) {
    const std::string k = std::to_string(i);
    Point p = c.glyph.points.at("z" + k);
    CHECK(p.x == sol.at("x" + k));
    CHECK(p.y == sol.at("y" + k));
    CHECK(p == expected[i]);
  }
  REQUIRE(c.glyph.strokes.size() == 1);
  CHECK(c.glyph.strokes[0].node_count() == 5);
}

TEST_CASE("undefined name gives one error and no outline") {
  auto c = run("side := 10;\ndraw (0,0) -- (side,0) -- (sied,side) -- cycle;");
  CHECK_FALSE(c.ok());
  REQUIRE(errors(c.diagnostics) == 1);
  const Diagnostic& d = c.diagnostics[0];
  CHECK(d.message.find("sied") != std::string::npos);
  CHECK(d.span.line == 2);
  CHECK(d.span.column == 28);
  CHECK(c.glyph.outline.empty());
  CHECK(c.format_diagnostics() == "t.mpg:2:28: error: undefined name 'sied'\n");
}

TEST_CASE("syntax errors carry line and column") {
  auto c = run("a := 1;\nb := (2, ;\nc := 3;\n");
  CHECK_FALSE(c.ok());
  REQUIRE(errors(c.diagnostics) >= 1);
  CHECK(c.diagnostics[0].span.line == 2);
  CHECK(c.diagnostics[0].span.column == 10);
  CHECK(c.glyph.outline.empty());

  auto u = run("a := 1;\nര := 2;");
  REQUIRE_FALSE(u.ok());
  CHECK(u.diagnostics[0].span.line == 2);
  CHECK(u.diagnostics[0].span.column == 1);
}

TEST_CASE("evaluation errors") {
  auto first_error = [](const std::string& src) {
    auto c = run(src);
    REQUIRE_FALSE(c.ok());
    CHECK(c.glyph.outline.empty());
    for (const auto& d : c.diagnostics)
      if (d.severity == Severity::Error) return d.message;
    return std::string();
  };
  CHECK(first_error("a = 1; a = 2;").find("inconsistent") != std::string::npos);
  CHECK(first_error("a = b*c;").find("nonlinear") != std::string::npos);
  CHECK(first_error("x1 + y1 = 3; draw (x1, 0) -- (1, 1);").find("x1") != std::string::npos);
  CHECK(first_error("fill (0,0) -- (1,0) -- (1,1);").find("closed") != std::string::npos);
  CHECK(first_error("draw (0,0) -- (1,1) withpen pensquare;").find("pensquare") != std::string::npos);
  CHECK(first_error("path p, s; p := (0,0)..(10,0);\npen_stroke(tip(pencircle)(0))(p)(s);").find("tip") !=
        std::string::npos);
  CHECK(first_error("path p, s; p := (0,0)..(10,0);\npen_stroke(nib(pencircle)(0))(p)(s);").find("node 1") !=
        std::string::npos);
  CHECK(first_error("vardef f = f + 1 enddef; a := f;").find("nest") != std::string::npos);
  CHECK(first_error("for i = 0 upto 4: draw (i, 0); endfor;").find("loop") != std::string::npos);
  CHECK(first_error("a := (1, 2) + 3;").find("pair") != std::string::npos);
  CHECK(first_error("a := 1/0;").find("zero") != std::string::npos);
  CHECK(first_error("path p; p := (0,0) .. tension 2 .. (1,1);").size() > 0);
  CHECK(first_error("pair q; draw q;").find("not determined") != std::string::npos);
}

TEST_CASE("expressions") {
  auto c = run(
      "a := 6/2/3; k := 10; b := k/2/3; c := 2(3 + 1); e := sqrt 16 + abs(-3);\n"
      "pair p; p := (1, 0) rotated 90; q := xpart ((1, 2) slanted 2); r := ypart ((3, 4) xyscaled (2, 3));\n"
      "f := angle (1, 1); g := length (3, 4); h := round 2.5 + floor -1.5 + ceiling 0.2;\n"
      "path k; k := (0,0)..(10,0)..(20,0); m := xpart point 1 of k; n := length k;\n"
      "o := xpart direction 0 of ((0,0) -- (30, 0)); t := max(1, 4, 2) - min(3, -1);\n"
      "pair v; v := 3 dir 90; w := ypart unitvector (0, 5); z7 := (1, 2); zz := x7 + y7;\n");
  REQUIRE_MESSAGE(c.ok(), c.format_diagnostics());
  const auto& g = c.glyph;
  CHECK(param(g, "a") == doctest::Approx(1));
  CHECK(param(g, "b") == doctest::Approx(15));
  CHECK(param(g, "c") == 8);
  CHECK(param(g, "e") == 7);
  CHECK(param(g, "q") == 5);
  CHECK(param(g, "r") == 12);
  CHECK(param(g, "f") == doctest::Approx(45));
  CHECK(param(g, "g") == 5);
  CHECK(param(g, "h") == 3 - 2 + 1);
  CHECK(param(g, "m") == doctest::Approx(10));
  CHECK(param(g, "n") == 2);
  CHECK(param(g, "o") == doctest::Approx(10));
  CHECK(param(g, "t") == 5);
  CHECK(param(g, "w") == 1);
  CHECK(param(g, "zz") == 3);
  CHECK(g.points.at("z7") == Point{1, 2});
}

TEST_CASE("subscripts written with a space name the same point") {
  auto c = run("z 3 = (4, 5); a := x3; b := y 3;");
  REQUIRE_MESSAGE(c.ok(), c.format_diagnostics());
  CHECK(param(c.glyph, "a") == 4);
  CHECK(param(c.glyph, "b") == 5);
}

TEST_CASE("macros with arguments") {
  auto c = run(
      "vardef twice expr t = 2t enddef;\n"
      "vardef ang expr t of p = angle(direction t of p) + 90 enddef;\n"
      "path q; q := (0,0) -- (0, 10);\n"
      "a := twice 4; b := ang 0 of q; t := 100; c := twice(t + 1);");
  REQUIRE_MESSAGE(c.ok(), c.format_diagnostics());
  CHECK(param(c.glyph, "a") == 8);
  CHECK(param(c.glyph, "b") == doctest::Approx(180));
  CHECK(param(c.glyph, "c") == 202);
}

TEST_CASE("glyph header") {
  auto c = run("u := 100; glyph \"ra\" unicode \"0D31\" advance 6u;");
  REQUIRE(c.ok());
  CHECK(c.glyph.name == "ra");
  CHECK(c.glyph.unicode == U'റ');
  CHECK(c.glyph.advance == 600);
  auto d = run("glyph \"A\" unicode 65;");
  REQUIRE(d.ok());
  CHECK(d.glyph.unicode == U'A');
  CHECK_FALSE(run("glyph \"x\" unicode \"zz\";").ok());
}

TEST_CASE("parameters are echoed in order of first assignment") {
  auto c = run("input plain_ex; b := 2; a := 1; b := 3; pair p; p := (1, 1); c := a + b;");
  REQUIRE(c.ok());
  std::vector<std::pair<std::string, double>> want{{"b", 3}, {"a", 1}, {"c", 4}};
  CHECK(c.glyph.parameters == want);
}

TEST_CASE("pen_stroke binds the result and its parts") {
  auto c = run(
      "path p, s; p := (0, 0) .. (50, 30) .. (100, 0);\n"
      "pen_stroke(cut(pencircle scaled 10, 90)(0) nib(fix_nib(10, 2, 30))(1) nib(pencircle scaled 4)(2))(p)(s);\n"
      "draw s; draw s_l; draw s_r; draw s_b; draw s_e;");
  REQUIRE_MESSAGE(c.ok(), c.format_diagnostics());
  REQUIRE(c.glyph.outline.size() == 5);
  CHECK(c.glyph.outline[0].closed);
  CHECK(c.glyph.outline[1].node_count() == 3);
  CHECK(c.glyph.outline[2].node_count() == 3);
  REQUIRE(c.glyph.strokes.size() == 1);

  auto cyc = run(
      "path p, s; p := (0, 0) .. (50, 50) .. (100, 0) .. (50, -50) .. cycle;\n"
      "pen_stroke(nib(fix_nib(8, 8, 0))(0, 1, 2, 3))(p)(s); fill s;");
  REQUIRE_MESSAGE(cyc.ok(), cyc.format_diagnostics());
  CHECK(cyc.glyph.outline.size() == 2);
}

TEST_CASE("drawing a point with a round pen makes a dot") {
  auto c = run("pickup pencircle scaled 4; draw (10, 10);");
  REQUIRE(c.ok());
  REQUIRE(c.glyph.outline.size() == 1);
  BBox b = bbox(c.glyph.outline);
  CHECK(b.xmin == doctest::Approx(8));
  CHECK(b.xmax == doctest::Approx(12));
  CHECK(b.ymin == doctest::Approx(8));
  CHECK(b.ymax == doctest::Approx(12));
}

TEST_CASE("drawing the same closed path twice keeps one contour") {
  auto c = run("path s; s := (0,0) -- (1,0) -- (1,1) -- cycle; draw s; fill s;");
  REQUIRE(c.ok());
  CHECK(c.glyph.outline.size() == 1);
}

TEST_CASE("includes") {
  const std::map<std::string, std::string> files{
      {"config/Regular.mpg", "u := 100;\nthick := 0.90u;\nsoften := 0;\n"},
      {"config/Bold.mpg", "input ./config/Regular;\nthick:= 1.25u;\n"},
      {"config/Thin.mpg", "input ./config/Regular;\nthick := 0.5u;\n"},
      {"loop.mpg", "input loop;\na := 1;\n"},
      {"a.mpg", "input b;\n"},
      {"b.mpg", "input a;\n"},
      {"empty.mpg", ""},
  };
  Loader loader = memory_loader(files);

  SUBCASE("a later assignment in the including file wins") {
    auto c = compile(files.at("config/Bold.mpg"), "config/Bold.mpg", loader);
    REQUIRE_MESSAGE(c.ok(), c.format_diagnostics());
    CHECK(c.program.statements.size() == 4);
    CHECK(param(c.glyph, "thick") == 125);
    auto t = compile(files.at("config/Thin.mpg"), "config/Thin.mpg", loader);
    CHECK(param(t.glyph, "thick") == 50);
  }
  SUBCASE("cycles are errors") {
    auto c = compile(files.at("loop.mpg"), "loop.mpg", loader);
    CHECK_FALSE(c.ok());
    CHECK(c.format_diagnostics().find("input cycle: loop.mpg -> loop.mpg") != std::string::npos);
    auto ab = compile(files.at("a.mpg"), "a.mpg", loader);
    CHECK(ab.format_diagnostics().find("a.mpg -> b.mpg -> a.mpg") != std::string::npos);
  }
  SUBCASE("an empty include only removes the input statement") {
    ParseResult with = parse("a := 1;\ninput empty;\nb := 2;\n", "x.mpg");
    ParseResult without = parse("a := 1;\nb := 2;\n", "x.mpg");
    std::vector<Diagnostic> diags;
    Program flat = resolve_includes(with.program, loader, diags);
    CHECK(diags.empty());
    CHECK(flat.same_as(without.program));
  }
  SUBCASE("missing files") {
    auto c = compile("input nowhere;", "x.mpg", loader);
    REQUIRE_FALSE(c.ok());
    CHECK(c.diagnostics[0].message.find("nowhere") != std::string::npos);
    CHECK(c.diagnostics[0].span.line == 1);
  }
  SUBCASE("diagnostics name the included file") {
    Loader broken = memory_loader({{"inc.mpg", "a := 1;\nb := ;\n"}});
    auto c = compile("input inc;\n", "main.mpg", broken);
    REQUIRE_FALSE(c.ok());
    CHECK(c.format_diagnostics().rfind("inc.mpg:2:", 0) == 0);
  }
}

TEST_CASE("print then parse is a fixed point over the corpus") {
  std::vector<std::pair<std::string, std::string>> sources{{"prelude", std::string(prelude_source())}};
  for (const auto& p : corpus()) sources.emplace_back(p.filename().string(), slurp(p));
  CHECK(sources.size() >= 15);
  for (const auto& [name, text] : sources) {
    CAPTURE(name);
    ParseResult a = parse(text, name);
    REQUIRE(a.ok());
    const std::string printed = print(a.program);
    ParseResult b = parse(printed, name);
    REQUIRE_MESSAGE(b.ok(), printed);
    CHECK(a.program.same_as(b.program));
    CHECK(print(b.program) == printed);
  }
}

TEST_CASE("evaluation is deterministic") {
  for (const auto& p : corpus()) {
    CAPTURE(p);
    auto a = run_file(p);
    auto b = run_file(p);
    REQUIRE_MESSAGE(a.ok(), a.format_diagnostics());
    CHECK(a.glyph.outline == b.glyph.outline);
    CHECK(a.glyph.parameters == b.glyph.parameters);
    CHECK(a.format_diagnostics() == b.format_diagnostics());
  }
}

TEST_CASE("an override equals rewriting the program to assign it first") {
  const std::vector<std::pair<std::string, double>> cases{
      {"thick", 125}, {"thick", 50}, {"condense", 0.8}, {"terminalround", 0.15}, {"u", 80}, {"thin", 0.5}};
  for (const auto& glyph : {"ra", "o", "l", "c", "period"}) {
    fs::path file = kSamples / "glyphs" / (std::string(glyph) + ".mpg");
    ParseResult pr = parse(slurp(file), file.string());
    REQUIRE(pr.ok());
    std::vector<Diagnostic> diags;
    Program flat = resolve_includes(pr.program, file_loader({kSamples}), diags);
    REQUIRE(diags.empty());
    for (const auto& [k, v] : cases) {
      CAPTURE(glyph);
      CAPTURE(k);
      Program rewritten;
      rewritten.files = flat.files;
      Node assign;
      assign.kind = Kind::Assign;
      assign.text = k;
      Node value;
      value.kind = Kind::Number;
      value.number = v;
      assign.kids.push_back(value);
      rewritten.statements.push_back(assign);
      for (const Node& st : flat.statements)
        if (!(st.kind == Kind::Assign && st.text == k)) rewritten.statements.push_back(st);
      GlyphResult a = evaluate(flat, {.overrides = {{k, v}}});
      GlyphResult b = evaluate(rewritten);
      REQUIRE(a.ok());
      REQUIRE(b.ok());
      CHECK(a.outline == b.outline);
    }
  }
}

TEST_CASE("every diagnostic span lies inside its source") {
  std::mt19937 rng(7);
  std::vector<std::string> sources;
  for (const auto& p : corpus()) sources.push_back(slurp(p));
  const std::string noise = "();{}.,=:-+*/%\"\n abz019#é";
  int with_errors = 0;
  for (int trial = 0; trial < 400; ++trial) {
    std::string s = sources[trial % sources.size()];
    const int edits = 1 + static_cast<int>(rng() % 4);
    for (int e = 0; e < edits && !s.empty(); ++e) {
      std::size_t at = rng() % s.size();
      if (rng() % 2) s.erase(at, 1 + rng() % 3);
      else s.insert(at, 1, noise[rng() % noise.size()]);
    }
    std::map<std::string, std::string> files{{"main.mpg", s}};
    auto c = compile(s, "main.mpg", memory_loader(files));
    for (const auto& d : c.diagnostics) {
      CAPTURE(s);
      CAPTURE(d.message);
      REQUIRE(d.span.file < c.program.files.size());
      if (c.program.files[d.span.file] != "main.mpg") continue;
      CHECK(d.span.offset + d.span.length <= s.size());
      // line/column agree with the offset
      std::uint32_t line = 1 + static_cast<std::uint32_t>(std::count(s.begin(), s.begin() + d.span.offset, '\n'));
      CHECK(d.span.line == line);
    }
    with_errors += !c.ok();
  }
  CHECK(with_errors > 100);
}

TEST_CASE("deadline and cancellation stop evaluation") {
  const std::string src = slurp(kData / "terminal_ra.mpg");
  EvalOptions late;
  late.deadline = std::chrono::steady_clock::now() - std::chrono::milliseconds(1);
  auto c = compile(src, "ra.mpg", prelude_loader(), late);
  CHECK_FALSE(c.ok());
  CHECK(c.format_diagnostics().find("timed out") != std::string::npos);
  CHECK(c.glyph.outline.empty());

  std::atomic<bool> cancel{true};
  EvalOptions stop;
  stop.cancel = &cancel;
  auto d = compile(src, "ra.mpg", prelude_loader(), stop);
  CHECK(d.format_diagnostics().find("cancelled") != std::string::npos);
}

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "rnav/expr.hpp"
#include "rnav/scenario.hpp"

using namespace rnav;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string scenario_path(const std::string& name) { return std::string(RNAV_SCENARIO_DIR) + "/" + name + ".json"; }

int quiet_run(const std::string& path, const RunOptions& opt = {}) {
  return run_scenario_file(path, opt, [](const std::string&) {});
}

}  // namespace

TEST_CASE("expressions parse, print and evaluate") {
  const Expr e = Expr::parse("x1^2 + 3*x2 - sin(x1)/2");
  CHECK(e.arity() == 2);
  CHECK(e.eval(Vec<double>{1.0, 2.0}) == doctest::Approx(1.0 + 6.0 - std::sin(1.0) / 2.0));
  const std::string p = e.print();
  CHECK(Expr::parse(p).print() == p);
  const Expr b = Expr::parse("norm2(block(1,2)) - norm2(block(3,4))");
  CHECK(b.arity() == 4);
  CHECK(b.eval(Vec<double>{1.0, 2.0, 0.5, 0.5}) == doctest::Approx(4.5));
  const Expr d = Expr::parse("dot(block(1,2), block(3,4))");
  CHECK(d.eval(Vec<double>{1.0, 2.0, 3.0, 4.0}) == doctest::Approx(11.0));
  const Expr n = Expr::parse("x1^-2");
  CHECK(n.eval(Vec<double>{2.0}) == doctest::Approx(0.25));
}

TEST_CASE("expression fields differentiate") {
  const ScalarField f = Expr::parse("x1*x2^3").to_field(2);
  const Vec<double> g = gradient(f, Vec<double>{2.0, 1.0});
  CHECK(g[0] == doctest::Approx(1.0));
  CHECK(g[1] == doctest::Approx(6.0));
  CHECK_THROWS_AS(Expr::parse("x3").to_field(2), InvalidArgument);
}

TEST_CASE("parse errors carry the column") {
  try {
    Expr::parse("(x1 + x2");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 9);
  }
  CHECK_THROWS_AS(Expr::parse("x1 +* x2"), ParseError);
  CHECK_THROWS_AS(Expr::parse("foo(x1)"), ParseError);
  CHECK_THROWS_AS(Expr::parse("x0"), ParseError);
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(parse_scenario("{"), ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"space": {"dim": 2, "curvature": 0}, "wind": {"kind": "zero"}, "bogus": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"space": {"dim": 2, "curvature": 0}, "wind": {"kind": "zero"},
                                     "suites": ["shift"]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_scenario(R"({"space": {"dim": 9, "curvature": 0}, "wind": {"kind": "zero"}})"), ConfigError);
  const Scenario sc = parse_scenario(
      R"({"space": {"dim": 2, "curvature": 0}, "wind": {"kind": "constant", "e": [0.5, 0]},
          "function": {"expr": "x1"}, "suites": ["direct"]})",
      "inline");
  CHECK(sc.name == "inline");
  CHECK(sc.dim == 2);
  CHECK(!function_catalog_names().empty());
}

TEST_CASE("shipped scenarios exit with their documented codes") {
  CHECK(quiet_run(scenario_path("funk_like_disk")) == kExitPass);
  CHECK(quiet_run(scenario_path("not_homothetic")) == kExitHypothesis);
  CHECK(quiet_run(scenario_path("does_not_exist")) == kExitConfig);
}

TEST_CASE("CSV output is deterministic and well formed") {
  const Scenario sc = load_scenario(scenario_path("funk_like_disk"));
  RunOptions o;
  o.seed = 5;
  const std::string a = scenario_csv(sc, o), b = scenario_csv(sc, o);
  CHECK(a == b);
  std::istringstream in(a);
  std::string header;
  std::getline(in, header);
  CHECK(header == "level,x1,x2,F_grad,finsler_laplacian,h_norm_df,h_laplacian,df_W");
  o.seed = 6;
  CHECK(scenario_csv(sc, o) != a);
}

TEST_CASE("run options override the scenario") {
  const Scenario sc = load_scenario(scenario_path("height_cartesian"));
  RunOptions o;
  o.levels = 3;
  o.samples = 4;
  const std::string csv = scenario_csv(sc, o);
  int rows = 0;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 1 + 3 * 4);
}

TEST_CASE("selftest passes") {
  std::vector<std::string> lines;
  CHECK(selftest({}, [&](const std::string& s) { lines.push_back(s); }) == kExitPass);
  CHECK(lines.size() >= 6u);
}

TEST_CASE("scenario files are valid JSON with a name") {
  const std::string text = slurp(scenario_path("sphere_quadric"));
  CHECK(parse_scenario(text).name == "sphere_quadric");
}

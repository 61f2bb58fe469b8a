#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "rnav/rnav.h"

TEST_CASE("C API: metric handle") {
  const double e[2] = {0.5, 0.0};
  rnav_metric* m = nullptr;
  REQUIRE(rnav_metric_create(2, 0.0, RNAV_WIND_CONSTANT, 0.0, nullptr, 0, e, &m) == RNAV_OK);
  CHECK(rnav_metric_dim(m) == 2);
  const double x[2] = {0.1, 0.2}, y[2] = {1.0, 0.0}, ym[2] = {-1.0, 0.0};
  double F = 0.0;
  CHECK(rnav_metric_F(m, x, y, &F) == RNAV_OK);
  CHECK(F == doctest::Approx(2.0 / 3.0));
  CHECK(rnav_metric_F(m, x, ym, &F) == RNAV_OK);
  CHECK(F == doctest::Approx(2.0));
  double v[2];
  CHECK(rnav_metric_inverse_legendre(m, x, y, v) == RNAV_OK);
  CHECK(v[0] == doctest::Approx(9.0 / 4.0));
  double g[4];
  CHECK(rnav_metric_fundamental_tensor(m, x, y, g) == RNAV_OK);
  CHECK(g[1] == doctest::Approx(g[2]));
  CHECK(rnav_metric_spray(m, x, y, v) == RNAV_OK);
  CHECK(std::fabs(v[0]) + std::fabs(v[1]) < 1e-14);

  rnav_expr* f = nullptr;
  REQUIRE(rnav_expr_parse("x1", &f) == RNAV_OK);
  CHECK(rnav_metric_laplacian(m, f, x, &F) == RNAV_OK);
  CHECK(std::fabs(F) < 1e-12);
  CHECK(rnav_metric_gradient(m, f, x, v) == RNAV_OK);
  CHECK(v[0] == doctest::Approx(9.0 / 4.0));
  rnav_expr_free(f);
  rnav_metric_free(m);
}

TEST_CASE("C API: errors") {
  rnav_metric* m = nullptr;
  const double e[2] = {1.5, 0.0};
  CHECK(rnav_metric_create(2, 0.0, RNAV_WIND_CONSTANT, 0.0, nullptr, 0, e, &m) == RNAV_OK);
  const double x[2] = {0.0, 0.0}, y[2] = {1.0, 0.0};
  double F;
  CHECK(rnav_metric_F(m, x, y, &F) == RNAV_E_DOMAIN);
  CHECK(std::string(rnav_last_error()).size() > 0);
  CHECK(rnav_metric_F(m, x, y, nullptr) == RNAV_E_INVALID_ARGUMENT);
  rnav_metric_free(m);
  CHECK(rnav_metric_create(0, 0.0, RNAV_WIND_ZERO, 0.0, nullptr, 0, nullptr, &m) != RNAV_OK);
  CHECK(m == nullptr);

  rnav_expr* ex = nullptr;
  CHECK(rnav_expr_parse("(x1 + x2", &ex) == RNAV_E_PARSE);
  CHECK(rnav_last_error_column() == 9);
  CHECK(ex == nullptr);
}

TEST_CASE("C API: expressions") {
  rnav_expr* ex = nullptr;
  REQUIRE(rnav_expr_parse("x1*x2 + 1", &ex) == RNAV_OK);
  CHECK(rnav_expr_arity(ex) == 2);
  size_t need = 0;
  CHECK(rnav_expr_print(ex, nullptr, 0, &need) == RNAV_OK);
  std::vector<char> buf(need);
  CHECK(rnav_expr_print(ex, buf.data(), buf.size(), &need) == RNAV_OK);
  char tiny[2];
  CHECK(rnav_expr_print(ex, tiny, sizeof tiny, &need) == RNAV_E_INVALID_ARGUMENT);
  const double x[2] = {2.0, 3.0};
  double out = 0.0;
  CHECK(rnav_expr_eval(ex, x, 2, &out) == RNAV_OK);
  CHECK(out == doctest::Approx(7.0));
  CHECK(rnav_expr_eval(ex, x, 1, &out) != RNAV_OK);
  rnav_expr_free(ex);
}

TEST_CASE("C API: scenario runs and selftest") {
  std::vector<std::string> lines;
  auto sink = [](const char* s, void* u) { static_cast<std::vector<std::string>*>(u)->push_back(s); };
  rnav_run_options opt;
  rnav_run_options_init(&opt);
  int code = -1;
  const std::string path = std::string(RNAV_SCENARIO_DIR) + "/height_cartesian.json";
  CHECK(rnav_run_scenario(path.c_str(), &opt, sink, &lines, &code) == RNAV_OK);
  CHECK(code == 0);
  CHECK(!lines.empty());
  CHECK(lines.back().find("result: PASS") != std::string::npos);
  CHECK(rnav_selftest(1, 0.0, nullptr, nullptr, &code) == RNAV_OK);
  CHECK(code == 0);
}

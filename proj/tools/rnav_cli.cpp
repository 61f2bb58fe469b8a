// Command-line front end; talks to the library only through rnav.h.
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "rnav/rnav.h"

namespace {

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int status_exit(rnav_status st) {
  std::fprintf(stderr, "error: %s\n", rnav_last_error());
  return st == RNAV_E_CONFIG || st == RNAV_E_PARSE || st == RNAV_E_INVALID_ARGUMENT ? 2 : 1;
}

int expr_check(const std::string& text) {
  rnav_expr* e = nullptr;
  const rnav_status st = rnav_expr_parse(text.c_str(), &e);
  if (st != RNAV_OK) {
    std::printf("error: %s\n", rnav_last_error());
    if (rnav_last_error_column() > 0 && text.find('\n') == std::string::npos)
      std::printf("  %s\n  %*s^\n", text.c_str(), rnav_last_error_column() - 1, "");
    return 2;
  }
  size_t need = 0;
  rnav_expr_print(e, nullptr, 0, &need);
  std::string printed(need, '\0');
  rnav_expr_print(e, printed.data(), printed.size(), &need);
  printed.resize(need - 1);

  rnav_expr* again = nullptr;
  bool stable = false;
  if (rnav_expr_parse(printed.c_str(), &again) == RNAV_OK) {
    std::string second(need, '\0');
    rnav_expr_print(again, second.data(), second.size(), &need);
    second.resize(need - 1);
    stable = second == printed;
  }
  std::printf("parsed: %s\n", printed.c_str());
  std::printf("coordinates: %d\n", rnav_expr_arity(e));
  std::printf("round trip: %s\n", stable ? "stable" : "UNSTABLE");
  rnav_expr_free(again);
  rnav_expr_free(e);
  return stable ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randers navigation workbench: scenario verification, selftest, expression checks"};
  app.require_subcommand(1);

  rnav_run_options ro;
  rnav_run_options_init(&ro);
  std::uint64_t seed = 0;
  int levels = 0, samples = 0;
  double tol_abs = 0, tol_rel = 0;
  std::string csv_dir, path;

  auto* verify = app.add_subcommand("verify", "run the suites requested by a scenario file");
  verify->add_option("scenario", path, "scenario JSON file")->required();
  auto* seed_opt = verify->add_option("--seed", seed, "override the sampling seed");
  verify->add_option("--levels", levels, "number of interior levels")->check(CLI::Range(2, 1000));
  verify->add_option("--samples", samples, "points per level and metric-suite samples")->check(CLI::PositiveNumber);
  verify->add_option("--tol-abs", tol_abs, "absolute per-level constancy tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--tol-rel", tol_rel, "relative per-level constancy tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--csv-dir", csv_dir, "directory for per-point CSV output");

  std::uint64_t st_seed = 1;
  double st_tol = 0;
  auto* self = app.add_subcommand("selftest", "run every module suite at reduced sample counts");
  self->add_option("--seed", st_seed, "seed for the suites");
  self->add_option("--tol", st_tol, "replace every pass threshold (negative control)")->check(CLI::PositiveNumber);

  std::string text;
  auto* ec = app.add_subcommand("expr-check", "parse an expression and print its canonical form");
  ec->add_option("text", text, "expression text")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  int exit_code = 0;
  if (*verify) {
    if (*seed_opt) {
      ro.has_seed = 1;
      ro.seed = seed;
    }
    ro.levels = levels;
    ro.samples = samples;
    ro.tol_abs = tol_abs;
    ro.tol_rel = tol_rel;
    ro.csv_dir = csv_dir.empty() ? nullptr : csv_dir.c_str();
    const rnav_status st = rnav_run_scenario(path.c_str(), &ro, print_line, nullptr, &exit_code);
    if (st != RNAV_OK) return status_exit(st);
  } else if (*self) {
    const rnav_status st = rnav_selftest(st_seed, st_tol, print_line, nullptr, &exit_code);
    if (st != RNAV_OK) return status_exit(st);
    std::printf("selftest: %s\n", exit_code == 0 ? "PASS" : "FAIL");
  } else if (*ec) {
    exit_code = expr_check(text);
  }
  std::fflush(stdout);
  return exit_code;
}

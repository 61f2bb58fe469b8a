#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rnav/suites.hpp"

namespace rnav {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitConfig = 2, kExitHypothesis = 3 };

using LineSink = std::function<void(const std::string&)>;

struct WindConfig {
  std::string kind = "zero";  // zero | constant | affine | projective | sphere_rotation | expr
  double k0 = 0.0;
  std::vector<double> q_upper;  // strict upper triangle, row by row
  std::vector<double> e;
  std::vector<std::string> components;  // expr kind
};

struct FunctionConfig {
  std::string kind;  // expr | homogeneous | catalog
  std::string text;
  int degree = 0;
  std::string catalog;
  int m = 1;  // block split for block_quadric
};

struct HypersurfaceConfig {
  std::string catalog;
  CatalogParams params;
  int points = 8;
};

struct Scenario {
  std::string name;
  std::string description;
  int dim = 0;
  double curvature = 0.0;
  WindConfig wind;
  std::optional<FunctionConfig> function;
  std::optional<HypersurfaceConfig> hypersurface;
  std::vector<std::string> suites;
  SamplingOptions sampling;
  MetricSuiteOptions metric;  // field pointer unused here
  Tolerances tol;
  std::map<std::string, std::string> expect;  // criterion -> verdict
};

// Throws ConfigError (bad JSON or validation) or ParseError (expression syntax).
Scenario parse_scenario(const std::string& json_text, const std::string& fallback_name = "scenario");
Scenario load_scenario(const std::string& path);

// Built-in chart and sphere functions: norm2, height, sphere_height, block_quadric.
std::vector<std::string> function_catalog_names();

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> levels;
  std::optional<int> samples;
  std::optional<double> tol_abs;
  std::optional<double> tol_rel;
  std::string csv_dir;
};

// Runs every requested suite, reporting through sink. Returns an ExitCode;
// never throws for library errors.
int run_scenario(const Scenario& sc, const RunOptions& opt, const LineSink& sink);
int run_scenario_file(const std::string& path, const RunOptions& opt, const LineSink& sink);

// CSV text for the sampled points (same bytes the run writes to disk).
std::string scenario_csv(const Scenario& sc, const RunOptions& opt);

struct SelftestOptions {
  std::uint64_t seed = 1;
  std::optional<double> tol;  // replaces every pass threshold
};

// One PASS/FAIL line per module suite; 0 when all pass, 1 otherwise.
int selftest(const SelftestOptions& opt, const LineSink& sink);

}  // namespace rnav

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rnav/randers.hpp"

namespace rnav {

enum class FieldDomain { kChart, kSphere };

// A function under test. Chart functions live on the chart of the space form.
// Sphere functions are restrictions of a degree-k homogeneous Phi on R^(n+1)
// to the unit sphere (the c = 1 stereographic chart is used only for the
// Finsler side and for cross-checks).
class IsoFunction {
 public:
  static IsoFunction chart(ScalarField f);
  // Verifies Phi(tX) = t^k Phi(X) on seeded samples; throws InvalidArgument.
  static IsoFunction sphere(ScalarField phi, int degree, double tol = 1e-9, std::uint64_t seed = 7);

  FieldDomain domain() const { return domain_; }
  int degree() const { return degree_; }
  const ScalarField& field() const { return field_; }
  const std::string& name() const { return field_.name(); }
  // Dimension of the manifold (chart dimension).
  int dim() const { return domain_ == FieldDomain::kChart ? field_.dim() : field_.dim() - 1; }
  // f in chart coordinates (Phi composed with the inverse stereographic map for sphere functions).
  ScalarField chart_field() const;

 private:
  ScalarField field_;
  FieldDomain domain_ = FieldDomain::kChart;
  int degree_ = 0;
};

// max |Phi(tX) - t^k Phi(X)| / max(1, |t^k Phi(X)|) over seeded samples.
double homogeneity_residual(const ScalarField& phi, int degree, int samples, std::uint64_t seed);

struct SamplingOptions {
  int levels = 7;                   // equispaced interior levels of the observed range
  std::vector<double> explicit_levels;
  int count = 32;                   // points per level
  std::uint64_t seed = 1;
  double radius = 1.0;              // chart ball radius (chart functions)
  double max_wind = 0.98;           // points must satisfy |W|_h < max_wind
  int max_newton = 60;
};

struct LevelSample {
  double t = 0.0;
  std::vector<Vec<double>> points;  // chart points, or unit vectors of R^(n+1) for sphere functions
  int excluded = 0;                 // projections that ended at |df|_h < critical_df
  bool irregular = false;           // excluded fraction above the irregular threshold
};

// Levels actually used for the given options (observed range when not explicit).
std::vector<double> choose_levels(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt);

// Newton projection along the h-gradient onto f^{-1}(t); deterministic in seed.
LevelSample sample_level_set(const IsoFunction& f, const RandersMetric& metric, double t, int count,
                             std::uint64_t seed, const SamplingOptions& opt = {});

std::vector<LevelSample> sample_levels(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt);

// Everything the criteria need at one sampled point.
struct PointRecord {
  Vec<double> chart;
  Vec<double> ambient;  // empty for chart functions
  double value = 0.0;
  double F_grad = 0.0;             // F(grad f) = F*(df)
  double finsler_laplacian = 0.0;  // divergence form, cross-checked with the trace form
  double h_norm_df = 0.0;
  double h_laplacian = 0.0;
  double df_W = 0.0;
  double div_W = 0.0;
  double nav_first = 0.0;   // |df|_h + <df, W>
  double nav_second = 0.0;  // Lap_h f/|df|_h + div W + <d<df,W>, df>_h/|df|_h^2
  double sphere_first = 0.0;   // sphere functions: literal homogeneous-form criterion
  double sphere_second = 0.0;
};

struct LevelRecords {
  double t = 0.0;
  std::vector<PointRecord> points;
  int excluded = 0;
  bool irregular = false;
};

// finsler = false skips F(grad f) and the Finsler Laplacian (Riemannian runs).
std::vector<LevelRecords> evaluate_levels(const IsoFunction& f, const RandersMetric& metric,
                                          const std::vector<LevelSample>& samples, bool finsler = true);

struct LevelStat {
  double t = 0.0;
  double mean = 0.0, min = 0.0, max = 0.0;
  double spread = 0.0;
  bool constant = false;
  int count = 0;
};

struct FittedProfile {
  std::vector<LevelStat> levels;
  std::vector<double> poly;        // low-degree least-squares fit of the level means, ascending powers
  double max_deviation = 0.0;      // max |mean - poly(t)|
  std::vector<double> derivative;  // 3-point finite differences of the means across levels
  bool constant_on_levels = false;
};

// Groups (t, value) pairs by level. Throws DomainError on a single level.
FittedProfile fit_profiles(const std::vector<std::pair<double, double>>& samples, double tol_abs = 1e-6,
                           double tol_rel = 1e-6);

enum class Verdict { kIsoparametric, kTransnormal, kNeither };
std::string to_string(Verdict v);

struct IsoparametricReport {
  std::string criterion;
  Verdict verdict = Verdict::kNeither;
  FittedProfile first, second;
  int invalid_levels = 0;
  int excluded_points = 0;
  double max_first_spread = 0.0, max_second_spread = 0.0;
};

// Criteria built from evaluated records.
IsoparametricReport direct_report(const std::vector<LevelRecords>& rec, const Tolerances& tol);
IsoparametricReport riemannian_report(const std::vector<LevelRecords>& rec, const Tolerances& tol);
IsoparametricReport navigation_report(const std::vector<LevelRecords>& rec, const Tolerances& tol);
IsoparametricReport sphere_report(const std::vector<LevelRecords>& rec, const Tolerances& tol);

// One-call versions: sample, evaluate, report.
IsoparametricReport check_direct(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt);
IsoparametricReport check_riemannian(const IsoFunction& f, const SpaceForm& space, const SamplingOptions& opt,
                                     const Tolerances& tol = {});
// When k0 is given (homothetic W), asserts div W = -2 n k0 at every point.
IsoparametricReport check_navigation(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt,
                                     const double* k0 = nullptr);
IsoparametricReport check_sphere_criterion(const IsoFunction& f, const RandersMetric& metric,
                                           const SamplingOptions& opt);

// df(W) = phi(f) for an h-isoparametric f and homothetic W.
struct WindProfileReport {
  bool passes = false;
  FittedProfile phi;
  double a_tilde_residual = 0.0;          // max_t |a~ - (a + phi)| at level means
  double b_tilde_residual = 0.0;          // max_t |b~ - (a + phi)(b/a - 2 n k0 + phi')|
  double b_tilde_literal_residual = 0.0;  // max_t |b~ - (b - a(2 n k0 - phi'))|
  double div_residual = 0.0;              // max |div W + 2 n k0|
  bool direct_isoparametric = false;
};

// Throws HypothesisError when f is not h-isoparametric on the sampled levels.
WindProfileReport check_wind_profile(const std::vector<LevelRecords>& rec, int n, double k0, const Tolerances& tol);

// Extrinsic calculus of a degree-k homogeneous Phi on the unit sphere S^n.
struct SphereCalculus {
  Vec<double> grad;         // nabla^h Phi = nabla^E Phi - k Phi X
  double grad_norm2 = 0.0;  // |nabla^E Phi|^2 - k^2 Phi^2
  double laplacian = 0.0;   // Lap^E Phi - k(k + n - 1) Phi
  // Independent evaluations: tangential projection and the radial split of
  // the Euclidean Laplacian.
  double identity_residual = 0.0;
};

SphereCalculus sphere_calculus(const ScalarField& phi, int degree, const Vec<double>& X);

// Compares sphere_calculus with the chart computation through the
// stereographic pullback (X away from the pole).
double sphere_chart_residual(const ScalarField& phi, int degree, const Vec<double>& X);

}  // namespace rnav

// Acceptance run: one PASS/FAIL line per criterion, thresholds pinned below.
//   acceptance            all criteria
//   acceptance -c 5       only criterion 5
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rnav/expr.hpp"
#include "rnav/scenario.hpp"
#include "rnav/suites.hpp"

using namespace rnav;

namespace {

// Pinned thresholds.
constexpr double kNavRel = 1e-12;
constexpr double kDet = 1e-10;
constexpr double kBh = 1e-10;
constexpr double kMetricTensor = 1e-9;
constexpr double kConnection = 1e-8;
constexpr double kLegendre = 1e-10;
constexpr double kDualNorm = 1e-10;
constexpr double kLapForms = 1e-6;
constexpr double kS = 1e-6;
constexpr double kFlagSpread = 1e-3;
constexpr double kFlagMean = 1e-4;
constexpr double kShift = 1e-6;
constexpr double kAngle = 1e-4;
constexpr double kNormalDerivative = 1e-6;
constexpr double kConformal = 1e-8;
constexpr double kProfileA = 1e-5;
constexpr double kProfileB = 1e-4;
constexpr double kTildeA = 1e-6;
constexpr double kTildeB = 1e-4;
constexpr double kFd = 1e-6;

constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void need(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back((ok ? "ok   " : "BAD  ") + what);
  }
  void below(double value, double limit, const std::string& what) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %.3e (tol %.0e)", what.c_str(), value, limit);
    need(std::isfinite(value) && value < limit, buf);
  }
};

Mat<double> rot(int n, int i, int j, double a) {
  Mat<double> q(n, n);
  q(i, j) = a;
  q(j, i) = -a;
  return q;
}

Mat<double> rot2(int n, double a, double b) {
  Mat<double> q = rot(n, 0, 1, a);
  if (n >= 4) {
    q(2, 3) = b;
    q(3, 2) = -b;
  } else {
    q(1, 2) = b;
    q(2, 1) = -b;
  }
  return q;
}

RandersMetric metric(int n, double c, VectorFieldSpec w) { return RandersMetric(NavigationSpec(SpaceForm(n, c), std::move(w))); }

struct Named {
  std::string name;
  RandersMetric m;
  double radius;
};

std::vector<Named> algebra_scenarios() {
  return {
      {"E2, W = -x/2 + xQ + e", metric(2, 0.0, VectorFieldSpec::affine(2, 0.25, rot(2, 0, 1, 0.3), {0.1, -0.05})), 1.0},
      {"E3, W = e", metric(3, 0.0, VectorFieldSpec::constant({0.3, 0.2, -0.1})), 1.0},
      {"H3 ball, rotation", metric(3, -1.0, VectorFieldSpec::affine(3, 0.0, rot2(3, 0.4, 0.2), Vec<double>(3))), 0.8},
      {"S3 chart, ambient rotation", metric(3, 1.0, VectorFieldSpec::sphere_rotation(3, 1.0, rot2(4, 0.3, 0.2))), 0.9},
      {"S2 chart, projective field",
       metric(2, 1.0, VectorFieldSpec::projective(2, 1.0, rot(2, 0, 1, 0.2), {0.1, 0.05})), 0.8},
  };
}

const char* kCorpus[] = {
    "x1^2 + x2^2",
    "x1",
    "x1^2 - x2",
    "x1*x2 + sin(x2) - exp(x1)/3",
    "sqrt(1 + x1^2 + 2*x2^2) + log(2 + x1)",
    "dot(block(1,1),block(1,1)) - dot(block(2,2),block(2,2)) + cos(x1*x2)",
    "x1^3 - 3*x1*x2^2 + x2/(2 + x1)",
};

Outcome criterion1() {
  Outcome o;
  for (const auto& s : algebra_scenarios()) {
    MetricSuiteOptions opt;
    opt.samples = 1000;
    opt.seed = kSeed;
    opt.radius = s.radius;
    opt.curvature = false;
    const MetricSuiteReport r = run_metric_suite(s.m, opt);
    o.need(r.samples >= 1000, s.name + ": " + std::to_string(r.samples) + " samples");
    o.below(r.navigation_vs_alpha_beta, kNavRel, s.name + ": |F_nav - (alpha + beta)| / F");
    o.below(r.alpha_determinant, kDet, s.name + ": det(a) lambda^(n+1) / det(h) - 1");
    o.below(r.bh_density, kBh, s.name + ": sigma_BH vs sqrt(det h)");
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  double g = 0, n = 0, l = 0, d = 0, lap = 0;
  int points = 0;
  for (const auto& s : algebra_scenarios()) {
    for (const char* text : kCorpus) {
      const ScalarField f = Expr::parse(text).to_field(s.m.dim(), text);
      MetricSuiteOptions opt;
      opt.samples = 100;
      opt.seed = kSeed;
      opt.radius = std::min(s.radius, 0.8);
      opt.field = &f;
      opt.curvature = false;
      const MetricSuiteReport r = run_metric_suite(s.m, opt);
      g = std::max(g, r.fundamental_tensor);
      n = std::max(n, r.nonlinear_connection);
      l = std::max(l, r.legendre_roundtrip);
      d = std::max(d, r.gradient_dual);
      lap = std::max(lap, r.laplacian_forms);
      points += r.field_points;
    }
  }
  o.need(points > 0, std::to_string(points) + " field points over 5 metrics x corpus");
  o.below(g, kMetricTensor, "g closed form vs autodiff Hessian");
  o.below(n, kConnection, "N closed form vs dG/dy");
  o.below(l, kLegendre, "Legendre round trips");
  o.below(d, kDualNorm, "F(grad f) vs F*(df)");
  o.below(lap, kLapForms, "Laplacian divergence vs trace form");
  return o;
}

Outcome criterion3() {
  Outcome o;
  Rng rng(kSeed);
  for (double k0 : {0.0, 0.25, 0.45}) {
    const RandersMetric m = metric(3, 0.0, VectorFieldSpec::affine(3, k0, rot2(3, 0.3, 0.1), {0.05, -0.1, 0.08}));
    const auto pts = sample_navigation_points(m.space(), m.wind(), 500, 1.0, rng);
    double worst = 0.0;
    for (const auto& x : pts) {
      const Vec<double> y = rng.unit_vector(3);
      worst = std::max(worst, std::fabs(m.s_curvature(x, y) - 4.0 * k0 * m.F(x, y)));
    }
    char name[96];
    std::snprintf(name, sizeof name, "k0 = %.2f: max |S - (n+1) k0 F| over %zu samples", k0, pts.size());
    o.need(pts.size() >= 500, std::to_string(pts.size()) + " samples for k0 case");
    o.below(worst, kS, name);
  }
  for (int n : {2, 3}) {
    const Mat<double> q = n == 2 ? rot(3, 0, 2, 0.35) : rot2(4, 0.3, 0.2);
    const RandersMetric m = metric(n, 1.0, VectorFieldSpec::sphere_rotation(n, 1.0, q));
    const auto pts = sample_navigation_points(m.space(), m.wind(), 500, 1.5, rng);
    double worst = 0.0;
    for (const auto& x : pts) worst = std::max(worst, std::fabs(m.s_curvature(x, rng.unit_vector(n))));
    o.below(worst, kS, "Killing W on the S^" + std::to_string(n) + " stereographic chart: max |S|");
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  struct Case {
    std::string name;
    RandersMetric m;
    double radius, expected;
  };
  const std::vector<Case> cases = {
      {"E2, k0 = 1/4", metric(2, 0.0, VectorFieldSpec::affine(2, 0.25, rot(2, 0, 1, 0.3), {0.1, 0.0})), 1.0,
       -0.0625},
      {"E3, k0 = 0.45", metric(3, 0.0, VectorFieldSpec::affine(3, 0.45, rot2(3, 0.2, 0.1), Vec<double>(3))), 0.8,
       -0.2025},
      {"E3 Killing", metric(3, 0.0, VectorFieldSpec::affine(3, 0.0, rot2(3, 0.3, 0.2), {0.1, 0.1, 0.0})), 1.0, 0.0},
      {"H3 Killing", metric(3, -1.0, VectorFieldSpec::affine(3, 0.0, rot2(3, 0.4, 0.2), Vec<double>(3))), 0.8, -1.0},
      {"S3 Killing", metric(3, 1.0, VectorFieldSpec::sphere_rotation(3, 1.0, rot2(4, 0.3, 0.2))), 0.9, 1.0},
  };
  for (const auto& c : cases) {
    MetricSuiteOptions opt;
    opt.samples = 20;
    opt.flag_samples = 200;
    opt.seed = kSeed;
    opt.radius = c.radius;
    const MetricSuiteReport r = run_metric_suite(c.m, opt);
    o.need(r.curvature_checked, c.name + ": curvature checked");
    o.below(r.flag_spread, kFlagSpread, c.name + ": spread of K over 200 flags");
    o.below(std::fabs(r.flag_mean - c.expected), kFlagMean, c.name + ": |mean K - expected|");
  }
  return o;
}

struct GridCell {
  std::string name;
  Immersion M;
  RandersMetric m;
  double k0;
};

// Euclidean cells use the three wind types directly. On the Clifford torus
// (sphere chart) constant and radial fields are not homothetic, so three
// ambient rotations stand in for them.
std::vector<GridCell> shift_grid() {
  std::vector<GridCell> out;
  const SpaceForm e3(3, 0.0), s3(3, 1.0);
  struct W {
    std::string name;
    VectorFieldSpec w;
    double k0;
  };
  const std::vector<W> winds = {
      {"W = e", VectorFieldSpec::constant({0.3, -0.2, 0.1}), 0.0},
      {"W = -x/2", VectorFieldSpec::affine(3, 0.25, Mat<double>(3, 3), Vec<double>(3)), 0.25},
      {"W = xQ", VectorFieldSpec::affine(3, 0.0, rot2(3, 0.4, 0.2), Vec<double>(3)), 0.0},
  };
  CatalogParams plane, half, unit, cyl;
  plane.offset = 0.2;
  half.radius = 0.5;
  unit.radius = 1.0;
  cyl.radius = 0.6;
  cyl.m = 1;
  const std::vector<std::pair<std::string, CatalogParams>> surfaces = {
      {"hyperplane", plane}, {"hypersphere", half}, {"hypersphere", unit}, {"cylinder", cyl}};
  for (const auto& [id, p] : surfaces)
    for (const auto& w : winds) {
      std::string label = id;
      if (id == "hypersphere") label += p.radius < 0.75 ? " r = 1/2" : " r = 1";
      out.push_back({label + ", " + w.name, catalog(id, p, e3), RandersMetric(NavigationSpec(e3, w.w)), w.k0});
    }
  CatalogParams tor;
  tor.radius = std::sqrt(0.5);
  tor.m = 1;
  const std::vector<std::pair<std::string, Mat<double>>> rots = {
      {"rotation (12)", rot(4, 0, 1, 0.3)}, {"rotation (12)+(34)", rot2(4, 0.3, 0.2)}, {"rotation (13)", rot(4, 0, 2, 0.25)}};
  for (const auto& [name, q] : rots)
    out.push_back({"Clifford torus, " + name, catalog("clifford_torus", tor, s3),
                   RandersMetric(NavigationSpec(s3, VectorFieldSpec::sphere_rotation(3, 1.0, q))), 0.0});
  return out;
}

Outcome criterion5() {
  Outcome o;
  for (const auto& c : shift_grid()) {
    const ShiftSuiteReport r = run_shift_suite(c.M, c.m, c.k0, 8, kSeed);
    o.need(r.points > 0, c.name + ": " + std::to_string(r.points) + " points x 2 orientations");
    o.below(r.shift, kShift, c.name + ": max |lambda - lambda_bar - k0|");
    o.below(r.principal_angle, kAngle, c.name + ": principal angles");
    o.below(r.normal_derivative, kNormalDerivative, c.name + ": pointwise normal derivative");
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const auto& c : shift_grid()) {
    const ShiftSuiteReport r = run_shift_suite(c.M, c.m, c.k0, 8, kSeed);
    o.below(r.conformal, kConformal, c.name + ": induced metric vs h_bar / (1 + <n_h, W>)");
  }
  const RandersMetric m = metric(2, 0.0, VectorFieldSpec::constant({0.5, 0.0}));
  const Immersion M = catalog("hyperplane", {}, m.space());
  const InducedMetric im = induced_metric(unit_normals(M, m, {0.3}), m);
  o.below(std::fabs(im.factor - 2.0 / 3.0), 1e-14, "hyperplane x1 = 0 with W = (1/2, 0): factor - 2/3");
  o.below(im.residual, kConformal, "hyperplane x1 = 0 with W = (1/2, 0): residual");
  return o;
}

struct IsoCase {
  std::string name;
  IsoFunction f;
  RandersMetric m;
  SamplingOptions opt;
  bool homothetic;
  double k0;
};

SamplingOptions sampling(double radius = 1.0) {
  SamplingOptions s;
  s.levels = 7;
  s.count = 32;
  s.seed = kSeed;
  s.radius = radius;
  return s;
}

IsoFunction sphere_fn(const std::string& text, int n, int degree) {
  return IsoFunction::sphere(Expr::parse(text).to_field(n + 1, text), degree);
}
IsoFunction chart_fn(const std::string& text, int n) { return IsoFunction::chart(Expr::parse(text).to_field(n, text)); }

std::vector<IsoCase> iso_cases() {
  return {
      {"S^3 height X4, rotation fixing e4", sphere_fn("x4", 3, 1),
       metric(3, 1.0, VectorFieldSpec::sphere_rotation(3, 1.0, rot2(4, 0.3, 0.0))), sampling(), true, 0.0},
      {"S^2 quadric X1^2 - X2^2 - X3^2, rotation in (X2, X3)",
       sphere_fn("dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))", 2, 2),
       metric(2, 1.0, VectorFieldSpec::sphere_rotation(2, 1.0, rot(3, 1, 2, 0.4))), sampling(), true, 0.0},
      {"S^3 Clifford quadric, rotations in (12)+(34)", sphere_fn("norm2(block(1,2)) - norm2(block(3,4))", 3, 2),
       metric(3, 1.0, VectorFieldSpec::sphere_rotation(3, 1.0, rot2(4, 0.3, 0.2))), sampling(), true, 0.0},
      {"x1 with W = (1/2, 0)", chart_fn("x1", 2), metric(2, 0.0, VectorFieldSpec::constant({0.5, 0.0})),
       sampling(1.5), true, 0.0},
      {"|x|^2 with W = -x/2", chart_fn("x1^2 + x2^2", 2),
       metric(2, 0.0, VectorFieldSpec::affine(2, 0.25, Mat<double>(2, 2), Vec<double>(2))), sampling(1.5), true,
       0.25},
      {"x3 with W = xQ + e", chart_fn("x3", 3),
       metric(3, 0.0, VectorFieldSpec::affine(3, 0.0, rot(3, 0, 1, 0.4), {0.1, -0.2, 0.3})), sampling(), true, 0.0},
      {"control: x1^2 - x2 with W = (0.2, 0.1)", chart_fn("x1^2 - x2", 2),
       metric(2, 0.0, VectorFieldSpec::constant({0.2, 0.1})), sampling(1.5), false, 0.0},
      {"control: |x|^2 with W = e", chart_fn("x1^2 + x2^2 + x3^2", 3),
       metric(3, 0.0, VectorFieldSpec::constant({0.3, 0.2, -0.1})), sampling(1.5), false, 0.0},
      {"control: X1 X2 X3 on S^2", sphere_fn("x1*x2*x3", 2, 3),
       metric(2, 1.0, VectorFieldSpec::sphere_rotation(2, 1.0, rot2(3, 0.3, 0.2))), sampling(), false, 0.0},
  };
}

Outcome criterion7() {
  Outcome o;
  const Tolerances tol;
  int cases = 0;
  for (const auto& c : iso_cases()) {
    const auto rec = evaluate_levels(c.f, c.m, sample_levels(c.f, c.m, c.opt));
    const Verdict d = direct_report(rec, tol).verdict;
    const Verdict n = navigation_report(rec, tol).verdict;
    std::string line = c.name + ": direct " + to_string(d) + ", navigation " + to_string(n);
    bool same = d == n;
    if (c.f.domain() == FieldDomain::kSphere) {
      const Verdict s = sphere_report(rec, tol).verdict;
      line += ", sphere " + to_string(s);
      same = same && s == d;
    }
    const bool want_iso = c.homothetic;
    o.need(same && (d == Verdict::kIsoparametric) == want_iso, line);
    ++cases;
  }
  o.need(cases >= 6, std::to_string(cases) + " scenarios");

  const IsoCase q = iso_cases()[1];
  const auto rec = evaluate_levels(q.f, q.m, sample_levels(q.f, q.m, q.opt));
  const IsoparametricReport rr = riemannian_report(rec, tol);
  double a = 0.0, b = 0.0;
  for (std::size_t l = 0; l < rr.first.levels.size(); ++l) {
    const double t = rr.first.levels[l].t;
    a = std::max(a, std::fabs(rr.first.levels[l].mean - 2.0 * std::sqrt(1.0 - t * t)));
    b = std::max(b, std::fabs(rr.second.levels[l].mean - (-2.0 - 6.0 * t)));
  }
  o.below(a, kProfileA, "S^2 quadric: a(f) vs 2 sqrt(1 - f^2)");
  o.below(b, kProfileB, "S^2 quadric: b(f) vs -2 - 6 f");
  return o;
}

// b~ = b - a(2 n k0 - phi') as stated. The identity that holds with a wind
// profile phi != 0 carries an extra factor (a + phi); that residual is
// printed alongside for reference but is not what this criterion asserts.
Outcome criterion8() {
  Outcome o;
  const Tolerances tol;
  for (const auto& c : iso_cases()) {
    if (!c.homothetic) continue;
    const auto rec = evaluate_levels(c.f, c.m, sample_levels(c.f, c.m, c.opt));
    if (direct_report(rec, tol).verdict != Verdict::kIsoparametric) continue;
    const WindProfileReport w = check_wind_profile(rec, c.m.dim(), c.k0, tol);
    o.below(w.a_tilde_residual, kTildeA, c.name + ": a~ vs a + phi");
    o.below(w.b_tilde_literal_residual, kTildeB, c.name + ": b~ vs b - a(2 n k0 - phi')");
    char buf[160];
    std::snprintf(buf, sizeof buf, "info %s: b~ vs (a + phi)(b/a - 2 n k0 + phi') %.3e", c.name.c_str(),
                  w.b_tilde_residual);
    o.notes.push_back(buf);
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  SelftestOptions so;
  so.seed = kSeed;
  std::vector<std::string> lines;
  const int code = selftest(so, [&](const std::string& s) { lines.push_back(s); });
  o.need(code == 0, "selftest exit " + std::to_string(code));
  for (const auto& l : lines)
    if (l.rfind("FAIL", 0) == 0) o.notes.push_back("  " + l);

  const Scenario sc = load_scenario(std::string(RNAV_SCENARIO_DIR) + "/funk_like_disk.json");
  RunOptions ro;
  ro.seed = kSeed;
  const std::string a = scenario_csv(sc, ro), b = scenario_csv(sc, ro);
  o.need(!a.empty() && a == b, "identical seeds give byte-identical CSV (" + std::to_string(a.size()) + " bytes)");

  Rng rng(kSeed);
  double fd = 0.0;
  for (int n : {2, 3})
    for (const char* text : kCorpus) {
      const ScalarField f = Expr::parse(text).to_field(n, text);
      for (int k = 0; k < 50; ++k) fd = std::max(fd, fd_check(f, rng.in_ball(n, 0.8), 1e-5).max_error());
    }
  o.below(fd, kFd, "autodiff vs finite differences on the corpus");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  bool verbose = false;
  app.add_option("-c,--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  app.add_flag("-v,--verbose", verbose, "print every sub-check");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"navigation algebra (F, det a, BH density)", criterion1},
      {"calculus identities (g, N, Legendre, gradient, Laplacian)", criterion2},
      {"S-curvature of homothetic and Killing winds", criterion3},
      {"flag curvature constant c - k0^2", criterion4},
      {"principal curvature shift on the catalog grid", criterion5},
      {"induced metric conformal factor", criterion6},
      {"isoparametric criteria agree, S^2 quadric profiles", criterion7},
      {"Finsler profile reconstruction b~ = b - a(2 n k0 - phi')", criterion8},
      {"determinism and finite-difference oracles", criterion9},
  };
  bool ok = true;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    Outcome out;
    try {
      out = all[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.notes.push_back(std::string("BAD  exception: ") + e.what());
    }
    std::printf("%s  criterion %zu: %s\n", out.pass ? "PASS" : "FAIL", i + 1, all[i].first.c_str());
    for (const auto& n : out.notes)
      if (verbose || !out.pass || n.rfind("info", 0) == 0) std::printf("      %s\n", n.c_str());
    ok = ok && out.pass;
  }
  return ok ? 0 : 1;
}

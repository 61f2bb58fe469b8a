#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rnav/expr.hpp"
#include "rnav/scenario.hpp"

namespace rnav {

namespace {

// Collects named residuals for one module; a suite passes when every
// residual is below its limit (or below the override, when one is set).
class Suite {
 public:
  Suite(std::string name, const std::optional<double>& over) : name_(std::move(name)), over_(over) {}

  void check(const std::string& what, double value, double limit) {
    const double lim = over_ ? *over_ : limit;
    if (!(std::isfinite(value) && value < lim)) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s %.3e (tol %.1e)", what.c_str(), value, lim);
      failed_.push_back(buf);
    }
  }
  void require(const std::string& what, bool ok) {
    if (!ok) failed_.push_back(what);
  }
  void error(const std::string& what) { failed_.push_back("error: " + what); }

  bool report(const LineSink& sink) const {
    const bool ok = failed_.empty();
    std::string line = (ok ? "PASS  " : "FAIL  ") + name_;
    if (!ok) {
      line += ":";
      for (std::size_t i = 0; i < failed_.size(); ++i) line += (i ? "; " : " ") + failed_[i];
    }
    if (sink) sink(line);
    return ok;
  }

 private:
  std::string name_;
  std::optional<double> over_;
  std::vector<std::string> failed_;
};

template <class Body>
bool run_suite(const std::string& name, const SelftestOptions& opt, const LineSink& sink, Body&& body) {
  Suite s(name, opt.tol);
  try {
    body(s);
  } catch (const std::exception& e) {
    s.error(e.what());
  }
  return s.report(sink);
}

Mat<double> rot(int n, int i, int j, double a) {
  Mat<double> q(n, n);
  q(i, j) = a;
  q(j, i) = -a;
  return q;
}

const char* kCorpus[] = {
    "x1^2 + x2^2",
    "x1",
    "x1^2 - x2",
    "x1*x2 + sin(x2) - exp(x1)/3",
    "sqrt(1 + x1^2 + 2*x2^2) + log(2 + x1)",
    "dot(block(1,1),block(1,1)) - dot(block(2,2),block(2,2)) + cos(x1*x2)",
};

}  // namespace

int selftest(const SelftestOptions& opt, const LineSink& sink) {
  bool ok = true;
  const Tolerances tol;

  ok &= run_suite("geometry_core (autodiff vs finite differences, chart geometry)", opt, sink, [&](Suite& s) {
    Rng rng = Rng::split(opt.seed, 1);
    double fd = 0.0;
    for (const char* text : kCorpus) {
      const ScalarField f = Expr::parse(text).to_field(2, text);
      for (int k = 0; k < 20; ++k) fd = std::max(fd, fd_check(f, rng.in_ball(2, 0.7), 1e-5).max_error());
    }
    s.check("fd_check on the expression corpus", fd, tol.gradient);
    double sec = 0.0, comp = 0.0, stereo = 0.0;
    for (double c : {0.0, -1.0, 1.0}) {
      const SpaceForm sp(3, c);
      for (int k = 0; k < 10; ++k) {
        const Vec<double> x = rng.in_ball(3, 0.6);
        sec = std::max(sec, std::fabs(sectional_curvature(sp, x, rng.unit_vector(3), rng.unit_vector(3)) - c));
        comp = std::max(comp, metric_compatibility_residual(sp, x));
        if (c > 0) stereo = std::max(stereo, max_abs(stereographic(inverse_stereographic(x, c), c) - x));
      }
    }
    s.check("sectional curvature vs c", sec, tol.identity);
    s.check("metric compatibility", comp, tol.identity);
    s.check("stereographic round trip", stereo, 1e-12);
  });

  ok &= run_suite("riemannian (Killing / homothetic classification)", opt, sink, [&](Suite& s) {
    const SpaceForm e3(3, 0.0), h3(3, -1.0), s3(3, 1.0);
    const FieldClass a = classify_field(e3, VectorFieldSpec::affine(3, 0.25, rot(3, 0, 1, 0.3), {0.1, 0.0, -0.2}),
                                        0.8, opt.seed);
    s.require("affine W is homothetic", a.kind == FieldClassKind::kHomothetic);
    s.check("affine k0", std::fabs(a.k0 - 0.25), tol.identity);
    const FieldClass b = classify_field(h3, VectorFieldSpec::affine(3, 0.0, rot(3, 1, 2, 0.4), Vec<double>(3)), 0.8,
                                        opt.seed);
    s.require("rotation of the ball is Killing", b.kind == FieldClassKind::kKilling);
    s.check("rotation k0", std::fabs(b.k0), tol.identity);
    const FieldClass r = classify_field(s3, VectorFieldSpec::sphere_rotation(3, 1.0, rot(4, 0, 3, 0.3)), 0.8, opt.seed);
    s.require("sphere rotation is Killing", r.kind == FieldClassKind::kKilling);
    const FieldClass n = classify_field(
        e3, VectorFieldSpec::custom(VectorMap::make(3, 3, [](const auto& x) {
          using T = std::decay_t<decltype(x[0])>;
          Vec<T> w(3);
          w[0] = 0.2 * x[0] * x[0];
          return w;
        }), "x1^2 e1"),
        0.8, opt.seed);
    s.require("x1^2 e1 is neither", n.kind == FieldClassKind::kNeither);
  });

  ok &= run_suite("randers (navigation algebra, spray, curvature)", opt, sink, [&](Suite& s) {
    struct Case {
      SpaceForm space;
      VectorFieldSpec wind;
    };
    const std::vector<Case> cases = {
        {SpaceForm(3, 0.0), VectorFieldSpec::affine(3, 0.25, rot(3, 0, 1, 0.3), {0.1, 0.05, -0.1})},
        {SpaceForm(3, -1.0), VectorFieldSpec::affine(3, 0.0, rot(3, 1, 2, 0.4), Vec<double>(3))},
        {SpaceForm(3, 1.0), VectorFieldSpec::sphere_rotation(3, 1.0, rot(4, 0, 3, 0.3))},
    };
    const ScalarField f = Expr::parse(kCorpus[3]).to_field(3, kCorpus[3]);
    for (const auto& cs : cases) {
      const RandersMetric m(NavigationSpec(cs.space, cs.wind));
      MetricSuiteOptions o;
      o.samples = 60;
      o.flag_samples = 20;
      o.seed = opt.seed;
      o.radius = 0.8;
      o.field = &f;
      const MetricSuiteReport r = run_metric_suite(m, o);
      s.check("navigation", r.navigation_vs_alpha_beta, tol.navigation);
      s.check("determinant", r.alpha_determinant, tol.determinant);
      s.check("volume", r.bh_density, tol.volume);
      s.check("fundamental tensor", r.fundamental_tensor, tol.metric_tensor);
      s.check("nonlinear connection", r.nonlinear_connection, tol.connection);
      s.check("spray", r.spray, tol.identity);
      s.check("chern", r.chern_contraction, tol.identity);
      s.check("legendre", r.legendre_roundtrip, tol.legendre);
      s.check("gradient dual", r.gradient_dual, tol.dual_norm);
      s.check("laplacian forms", r.laplacian_forms, tol.laplacian);
      s.require("curvature identities ran", r.curvature_checked);
      s.check("S-curvature", r.s_curvature, tol.s_curvature);
      s.check("flag spread", r.flag_spread, tol.flag_spread);
      s.check("flag mean", std::fabs(r.flag_mean - r.flag_expected), tol.flag_mean);
    }
  });

  ok &= run_suite("hypersurfaces (principal curvature shift, conformal factor)", opt, sink, [&](Suite& s) {
    const SpaceForm e2(2, 0.0), e3(3, 0.0), s3(3, 1.0);
    struct Case {
      Immersion M;
      RandersMetric metric;
      double k0;
    };
    const std::vector<Case> cases = {
        {catalog("hyperplane", {}, e3), RandersMetric(NavigationSpec(e3, VectorFieldSpec::constant({0.3, 0.1, 0.0}))),
         0.0},
        {catalog("hypersphere", {0.5, 1, 0.0}, e3),
         RandersMetric(NavigationSpec(e3, VectorFieldSpec::affine(3, 0.25, Mat<double>(3, 3), Vec<double>(3)))), 0.25},
        {catalog("cylinder", {0.5, 1, 0.0}, e3),
         RandersMetric(NavigationSpec(e3, VectorFieldSpec::affine(3, 0.0, rot(3, 0, 1, 0.4), Vec<double>(3)))), 0.0},
        {catalog("clifford_torus", {std::sqrt(0.5), 1, 0.0}, s3),
         RandersMetric(NavigationSpec(s3, VectorFieldSpec::sphere_rotation(3, 1.0, rot(4, 0, 1, 0.3)))), 0.0},
    };
    for (const auto& cs : cases) {
      const ShiftSuiteReport r = run_shift_suite(cs.M, cs.metric, cs.k0, 3, opt.seed);
      s.check(cs.M.catalog_id() + " shift", r.shift, tol.shift);
      s.check(cs.M.catalog_id() + " angle", r.principal_angle, tol.principal_angle);
      s.check(cs.M.catalog_id() + " normal derivative", r.normal_derivative, tol.shift);
      s.check(cs.M.catalog_id() + " conformal", r.conformal, tol.conformal);
    }
    // Hand instance: line x1 = 0 in the plane, W = (1/2, 0): factor 1/(1 + 1/2).
    const RandersMetric m(NavigationSpec(e2, VectorFieldSpec::constant({0.5, 0.0})));
    const Immersion line = catalog("hyperplane", {}, e2);
    const CurvatureReport c = verify_shift(line, m, Vec<double>{0.1}, 0.0);
    s.check("hyperplane conformal factor 2/3", std::fabs(c.conformal_factor - 2.0 / 3.0), 1e-12);
  });

  ok &= run_suite("isoparametric (criteria agreement, sphere calculus, profiles)", opt, sink, [&](Suite& s) {
    SamplingOptions so;
    so.count = 12;
    so.levels = 5;
    so.seed = opt.seed;
    so.radius = 1.5;
    const SpaceForm e2(2, 0.0), s2(2, 1.0);
    const auto verdicts = [&](const IsoFunction& f, const RandersMetric& m, Verdict want) {
      const auto rec = evaluate_levels(f, m, sample_levels(f, m, so), true);
      const Verdict d = direct_report(rec, m.tolerances()).verdict;
      const Verdict n = navigation_report(rec, m.tolerances()).verdict;
      s.require(f.name() + ": direct " + to_string(d) + " vs navigation " + to_string(n), d == n);
      s.require(f.name() + ": expected " + to_string(want) + ", got " + to_string(d), d == want);
      if (f.domain() == FieldDomain::kSphere) {
        const Verdict sp = sphere_report(rec, m.tolerances()).verdict;
        s.require(f.name() + ": sphere criterion " + to_string(sp), sp == d);
      }
      return rec;
    };
    const RandersMetric funk(NavigationSpec(e2, VectorFieldSpec::affine(2, 0.25, Mat<double>(2, 2), Vec<double>(2))));
    const auto rec = verdicts(IsoFunction::chart(Expr::parse("x1^2 + x2^2").to_field(2, "|x|^2")), funk,
                              Verdict::kIsoparametric);
    const WindProfileReport w = check_wind_profile(rec, 2, 0.25, funk.tolerances());
    s.require("funk wind profile", w.passes);
    s.check("funk a~ = a + phi", w.a_tilde_residual, tol.profile_first);
    s.check("funk b~ reconstruction", w.b_tilde_residual, tol.profile_identity);

    const RandersMetric shear(NavigationSpec(e2, VectorFieldSpec::constant({0.3, 0.2})));
    verdicts(IsoFunction::chart(Expr::parse("x1^2 + x2^2").to_field(2, "|x|^2 (W = e)")), shear, Verdict::kNeither);

    const RandersMetric rot2(NavigationSpec(s2, VectorFieldSpec::sphere_rotation(2, 1.0, rot(3, 1, 2, 0.4))));
    const IsoFunction quad = IsoFunction::sphere(
        Expr::parse("dot(block(1,1),block(1,1)) - dot(block(2,3),block(2,3))").to_field(3, "block quadric"), 2);
    const auto qrec = verdicts(quad, rot2, Verdict::kIsoparametric);
    const IsoparametricReport rr = riemannian_report(qrec, rot2.tolerances());
    double a_err = 0.0, b_err = 0.0;
    for (std::size_t l = 0; l < rr.first.levels.size(); ++l) {
      const double t = rr.first.levels[l].t;
      a_err = std::max(a_err, std::fabs(rr.first.levels[l].mean - 2.0 * std::sqrt(1.0 - t * t)));
      b_err = std::max(b_err, std::fabs(rr.second.levels[l].mean - (-2.0 - 6.0 * t)));
    }
    s.check("S^2 quadric a(f) = 2 sqrt(1 - f^2)", a_err, 1e-5);
    s.check("S^2 quadric b(f) = -2 - 6 f", b_err, 1e-4);

    Rng rng = Rng::split(opt.seed, 9);
    double calc = 0.0, chart = 0.0;
    for (int k = 0; k < 10; ++k) {
      Vec<double> X = rng.unit_vector(3);
      if (X[2] > 0.5) X[2] = -X[2];
      calc = std::max(calc, sphere_calculus(quad.field(), 2, X).identity_residual);
      chart = std::max(chart, sphere_chart_residual(quad.field(), 2, X));
    }
    s.check("sphere calculus two routes", calc, tol.identity);
    s.check("sphere calculus vs chart pullback", chart, 1e-7);
  });

  ok &= run_suite("cli (expression round trip, scenario CSV determinism)", opt, sink, [&](Suite& s) {
    for (const char* text : kCorpus) {
      const Expr e = Expr::parse(text);
      const std::string p = e.print();
      s.require(std::string("round trip of ") + text, Expr::parse(p).print() == p);
    }
    bool threw = false;
    try {
      Expr::parse("(x1 + x2");
    } catch (const ParseError& e) {
      threw = e.column() == 9;
    }
    s.require("'(x1 + x2' reports column 9", threw);
    const Scenario sc = parse_scenario(R"({
      "name": "selftest_csv",
      "space": {"dim": 2, "curvature": 0},
      "wind": {"kind": "affine", "k0": 0.25},
      "function": {"expr": "x1^2 + x2^2"},
      "suites": ["direct"],
      "sampling": {"levels": 3, "count": 4, "radius": 1.5}
    })");
    RunOptions ro;
    ro.seed = opt.seed;
    s.require("identical seeds give identical CSV", scenario_csv(sc, ro) == scenario_csv(sc, ro));
  });

  return ok ? 0 : 1;
}

}  // namespace rnav

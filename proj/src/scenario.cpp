#include "rnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rnav/expr.hpp"

namespace rnav {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kSuites = {"metric", "shift", "direct", "riemannian", "navigation", "wind_profile",
                                          "sphere"};
const std::set<std::string> kNeedsFunction = {"direct", "riemannian", "navigation", "wind_profile", "sphere"};

const std::pair<const char*, double Tolerances::*> kTolFields[] = {
    {"gradient", &Tolerances::gradient},
    {"identity", &Tolerances::identity},
    {"eigen_residual", &Tolerances::eigen_residual},
    {"eigen_cluster", &Tolerances::eigen_cluster},
    {"positive_definite", &Tolerances::positive_definite},
    {"navigation", &Tolerances::navigation},
    {"determinant", &Tolerances::determinant},
    {"volume", &Tolerances::volume},
    {"dual_norm", &Tolerances::dual_norm},
    {"metric_tensor", &Tolerances::metric_tensor},
    {"connection", &Tolerances::connection},
    {"legendre", &Tolerances::legendre},
    {"laplacian", &Tolerances::laplacian},
    {"normal", &Tolerances::normal},
    {"conformal", &Tolerances::conformal},
    {"s_curvature", &Tolerances::s_curvature},
    {"flag_spread", &Tolerances::flag_spread},
    {"flag_mean", &Tolerances::flag_mean},
    {"shift", &Tolerances::shift},
    {"principal_angle", &Tolerances::principal_angle},
    {"level_abs", &Tolerances::level_abs},
    {"level_rel", &Tolerances::level_rel},
    {"profile_first", &Tolerances::profile_first},
    {"profile_identity", &Tolerances::profile_identity},
    {"level_membership", &Tolerances::level_membership},
    {"critical_df", &Tolerances::critical_df},
    {"irregular_fraction", &Tolerances::irregular_fraction},
    {"homogeneity", &Tolerances::homogeneity},
};

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- config parsing ------------------------------------------------------

void allow_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys) ok = ok || it.key() == k;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

double get_num(const json& j, const char* key, const std::string& where, std::optional<double> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + "." + key + " is required");
  }
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(where + "." + key + " must be finite");
  return d;
}

int get_int(const json& j, const char* key, const std::string& where, std::optional<int> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + "." + key + " is required");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string get_str(const json& j, const char* key, const std::string& where, std::optional<std::string> def = {}) {
  if (!j.contains(key)) {
    if (def) return *def;
    throw ConfigError(where + "." + key + " is required");
  }
  const json& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> get_nums(const json& j, const char* key, const std::string& where) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array of numbers");
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(where + "." + key + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Accepts either "q_upper" (strict upper triangle) or a full antisymmetric "q".
std::vector<double> read_q(const json& j, int size, const std::string& where) {
  if (j.contains("q_upper") && j.contains("q")) throw ConfigError(where + ": give either q or q_upper, not both");
  if (j.contains("q_upper")) {
    auto u = get_nums(j, "q_upper", where);
    if (static_cast<int>(u.size()) != size * (size - 1) / 2)
      throw ConfigError(fmt("%s.q_upper needs %d entries for a %dx%d matrix, got %zu", where.c_str(),
                            size * (size - 1) / 2, size, size, u.size()));
    return u;
  }
  if (!j.contains("q")) return {};
  const json& q = j.at("q");
  if (!q.is_array() || static_cast<int>(q.size()) != size) throw ConfigError(where + fmt(".q must be %dx%d", size, size));
  std::vector<std::vector<double>> rows;
  for (const auto& r : q) {
    if (!r.is_array() || static_cast<int>(r.size()) != size) throw ConfigError(where + fmt(".q must be %dx%d", size, size));
    std::vector<double> row;
    for (const auto& x : r) {
      if (!x.is_number()) throw ConfigError(where + ".q entries must be numbers");
      row.push_back(x.get<double>());
    }
    rows.push_back(row);
  }
  std::vector<double> upper;
  for (int i = 0; i < size; ++i)
    for (int k = 0; k < size; ++k) {
      if (std::fabs(rows[i][k] + rows[k][i]) > 1e-14 * std::max(1.0, std::fabs(rows[i][k])))
        throw ConfigError(fmt("%s.q is not antisymmetric at (%d,%d)", where.c_str(), i + 1, k + 1));
      if (k > i) upper.push_back(rows[i][k]);
    }
  return upper;
}

bool valid_verdict(const std::string& s) {
  return s == "isoparametric" || s == "transnormal" || s == "neither";
}

// ---- building ------------------------------------------------------------

IsoFunction make_function(const FunctionConfig& fc, int n, double c) {
  if (fc.kind == "expr") {
    const Expr e = Expr::parse(fc.text);
    if (e.arity() > n) throw ConfigError(fmt("function uses x%d but the space has dimension %d", e.arity(), n));
    return IsoFunction::chart(e.to_field(n, fc.text));
  }
  if (fc.kind == "homogeneous") {
    if (c != 1.0) throw ConfigError("homogeneous sphere functions need the unit sphere (curvature 1)");
    const Expr e = Expr::parse(fc.text);
    if (e.arity() > n + 1)
      throw ConfigError(fmt("function uses x%d but the ambient space has dimension %d", e.arity(), n + 1));
    return IsoFunction::sphere(e.to_field(n + 1, fc.text), fc.degree);
  }
  const std::string& id = fc.catalog;
  if (id == "norm2") {
    return IsoFunction::chart(ScalarField::make(
        n, [](const auto& x) { return dot(x, x); }, "norm2"));
  }
  if (id == "height") {
    return IsoFunction::chart(ScalarField::make(
        n, [n](const auto& x) { return x[n - 1]; }, "height"));
  }
  if (c != 1.0) throw ConfigError("catalog function '" + id + "' lives on the unit sphere (curvature 1)");
  if (id == "sphere_height") {
    return IsoFunction::sphere(ScalarField::make(
                                   n + 1, [n](const auto& x) { return x[n]; }, "sphere_height"),
                               1);
  }
  if (id == "block_quadric") {
    const int m = fc.m;
    if (m < 1 || m > n) throw ConfigError(fmt("block_quadric needs 1 <= m <= %d", n));
    return IsoFunction::sphere(ScalarField::make(
                                   n + 1,
                                   [m, n](const auto& x) {
                                     using T = std::decay_t<decltype(x[0])>;
                                     T s(0.0);
                                     for (int i = 0; i <= n; ++i) s += (i < m ? 1.0 : -1.0) * x[i] * x[i];
                                     return s;
                                   },
                                   fmt("block_quadric(m=%d)", m)),
                               2);
  }
  throw ConfigError("unknown catalog function '" + id + "'");
}

VectorFieldSpec make_wind(const WindConfig& w, int n, double c) {
  auto vec = [&](const std::vector<double>& v) {
    if (v.empty()) return Vec<double>(n);
    if (static_cast<int>(v.size()) != n) throw ConfigError(fmt("wind.e must have %d entries", n));
    Vec<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = v[i];
    return out;
  };
  if (w.kind == "zero") return VectorFieldSpec::zero(n);
  if (w.kind == "constant") return VectorFieldSpec::constant(vec(w.e));
  if (w.kind == "affine") return VectorFieldSpec::affine(n, w.k0, antisymmetric_from_upper(n, w.q_upper), vec(w.e));
  if (w.kind == "projective") return VectorFieldSpec::projective(n, c, antisymmetric_from_upper(n, w.q_upper), vec(w.e));
  if (w.kind == "sphere_rotation") return VectorFieldSpec::sphere_rotation(n, c, antisymmetric_from_upper(n + 1, w.q_upper));
  if (w.kind == "expr") {
    if (static_cast<int>(w.components.size()) != n) throw ConfigError(fmt("wind.components needs %d expressions", n));
    std::vector<Expr> ex;
    std::string desc;
    for (const auto& s : w.components) {
      ex.push_back(Expr::parse(s));
      if (ex.back().arity() > n) throw ConfigError("wind component '" + s + "' uses coordinates beyond the dimension");
      desc += (desc.empty() ? "(" : ", ") + ex.back().print();
    }
    desc += ")";
    auto fn = [ex, n](const auto& x) {
      using T = std::decay_t<decltype(x[0])>;
      Vec<T> out(n);
      for (int i = 0; i < n; ++i) out[i] = ex[i].eval(x);
      return out;
    };
    return VectorFieldSpec::custom(VectorMap::make(n, n, fn, "wind"), desc);
  }
  throw ConfigError("unknown wind kind '" + w.kind + "'");
}

struct Context {
  SpaceForm space;
  VectorFieldSpec wind;
  RandersMetric metric;
  std::optional<IsoFunction> fn;
  std::optional<Immersion> M;
  FieldClass cls;

  explicit Context(const Scenario& sc)
      : space(sc.dim, sc.curvature),
        wind(make_wind(sc.wind, sc.dim, sc.curvature)),
        metric(NavigationSpec(space, wind), sc.tol) {
    if (sc.function) fn = make_function(*sc.function, sc.dim, sc.curvature);
    if (sc.hypersurface) M = catalog(sc.hypersurface->catalog, sc.hypersurface->params, space);
    cls = classify_field(space, wind, std::min(sc.sampling.radius, 0.95 * space.chart_radius()), sc.sampling.seed, 64,
                         sc.tol.identity);
  }
};

Scenario effective(const Scenario& in, const RunOptions& opt) {
  Scenario sc = in;
  if (opt.seed) {
    sc.sampling.seed = *opt.seed;
    sc.metric.seed = *opt.seed;
  }
  if (opt.levels) {
    if (*opt.levels < 2) throw ConfigError("--levels must be at least 2");
    sc.sampling.levels = *opt.levels;
    sc.sampling.explicit_levels.clear();
  }
  if (opt.samples) {
    if (*opt.samples < 1) throw ConfigError("--samples must be positive");
    sc.sampling.count = *opt.samples;
    sc.metric.samples = *opt.samples;
  }
  if (opt.tol_abs) sc.tol.level_abs = *opt.tol_abs;
  if (opt.tol_rel) sc.tol.level_rel = *opt.tol_rel;
  return sc;
}

// ---- reporting -----------------------------------------------------------

class Report {
 public:
  explicit Report(const LineSink& sink) : sink_(sink) {}

  void line(const std::string& s) const {
    if (sink_) sink_(s);
  }
  bool check(const std::string& what, double value, double limit) {
    const bool ok = std::isfinite(value) && value < limit;
    line(fmt("  %s  %-52s %.3e  (tol %.1e)", ok ? "PASS" : "FAIL", what.c_str(), value, limit));
    if (!ok) ++fails_;
    return ok;
  }
  void fail(const std::string& msg) {
    line("  FAIL  " + msg);
    ++fails_;
  }
  void hypothesis(const std::string& msg) {
    line("  HYPOTHESIS  " + msg);
    ++hypotheses_;
  }
  int fails() const { return fails_; }
  int code() const { return fails_ ? kExitFail : hypotheses_ ? kExitHypothesis : kExitPass; }

 private:
  const LineSink& sink_;
  int fails_ = 0;
  int hypotheses_ = 0;
};

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt("%.6g", x);
  return "[" + s + "]";
}

void suite_metric(const Scenario& sc, const Context& c, Report& r) {
  r.line("[metric] navigation algebra, calculus and curvature identities");
  MetricSuiteOptions o = sc.metric;
  std::optional<ScalarField> f;
  if (c.fn) f = c.fn->chart_field();
  o.field = f ? &*f : nullptr;
  o.radius = std::min(o.radius, 0.95 * c.space.chart_radius());
  const MetricSuiteReport m = run_metric_suite(c.metric, o);
  const Tolerances& t = sc.tol;
  r.line(fmt("  %d seeded (x, y) samples", m.samples));
  r.check("navigation F vs alpha + beta (relative)", m.navigation_vs_alpha_beta, t.navigation);
  r.check("det(a) lambda^(n+1) / det(h) - 1", m.alpha_determinant, t.determinant);
  r.check("Busemann-Hausdorff density vs sqrt(det h)", m.bh_density, t.volume);
  r.check("fundamental tensor closed form vs Hessian", m.fundamental_tensor, t.metric_tensor);
  r.check("nonlinear connection closed form vs dG/dy", m.nonlinear_connection, t.connection);
  r.check("spray closed form vs metric formula", m.spray, t.identity);
  r.check("Chern connection contracted with y vs N", m.chern_contraction, t.identity);
  r.check("Legendre round trips", m.legendre_roundtrip, t.legendre);
  r.check("sectional curvature of h vs c", m.sectional_curvature, t.identity);
  r.check("metric compatibility of the Levi-Civita connection", m.metric_compatibility, t.identity);
  if (m.has_field) {
    r.line(fmt("  %d non-critical points of f", m.field_points));
    r.check("F(grad f) vs dual norm of df", m.gradient_dual, t.dual_norm);
    r.check("Laplacian divergence form vs trace form", m.laplacian_forms, t.laplacian);
    r.check("autodiff vs central differences of f", m.finite_difference, t.gradient);
  }
  r.line(fmt("  wind class: %s, k0 = %.12g (residual %.2e)", to_string(m.field_class.kind).c_str(), m.field_class.k0,
             m.field_class.residual));
  if (!m.curvature_checked) {
    r.line("  INFO  W is neither Killing nor homothetic; S- and flag-curvature identities not applicable");
    return;
  }
  r.check("S-curvature vs (n+1) k0 F", m.s_curvature, t.s_curvature);
  if (c.space.dim() >= 2) {
    r.line(fmt("  flag curvature mean %.12g, expected c - k0^2 = %.12g", m.flag_mean, m.flag_expected));
    r.check("flag curvature spread over flags", m.flag_spread, t.flag_spread);
    r.check("flag curvature mean vs c - k0^2", std::fabs(m.flag_mean - m.flag_expected), t.flag_mean);
  }
}

void suite_shift(const Scenario& sc, const Context& c, Report& r) {
  r.line("[shift] principal curvatures of the F-normal vs the h-normal");
  if (c.cls.kind == FieldClassKind::kNeither)
    throw HypothesisError(fmt("shift verification needs W Killing or homothetic (isotropic S-curvature); "
                              "r_ij + 2 k0 h_ij residual is %.3e",
                              c.cls.residual));
  const ShiftSuiteReport s = run_shift_suite(*c.M, c.metric, c.cls.k0, sc.hypersurface->points, sc.sampling.seed);
  const Tolerances& t = sc.tol;
  r.line(fmt("  %s, %d parameter points x 2 orientations, k0 = %.12g", c.M->catalog_id().c_str(), s.points, s.k0));
  r.line("  first point: h-principal " + join(s.first.principal_h) + ", F-principal " + join(s.first.principal_F) +
         fmt(", conformal factor %.12g", s.first.conformal_factor));
  r.check("shift residual max |lambda - lambda_bar - k0|", s.shift, t.shift);
  r.check("principal subspace angle (sine)", s.principal_angle, t.principal_angle);
  r.check("normal derivative vs Riemannian derivative - k0 phi_a", s.normal_derivative, t.shift);
  r.check("induced metric vs h_bar / (1 + <n_h, W>)", s.conformal, t.conformal);
  r.check("shape operator self-adjointness", s.self_adjoint, t.identity);
  r.check("unit normal (F(n) = 1, Legendre, n = n_h + W)", s.normal, t.normal);
}

void print_criterion(Report& r, const IsoparametricReport& rep) {
  r.line(fmt("  %-10s verdict %-13s first spread %.2e, second spread %.2e, irregular levels %d, excluded %d",
             rep.criterion.c_str(), to_string(rep.verdict).c_str(), rep.max_first_spread, rep.max_second_spread,
             rep.invalid_levels, rep.excluded_points));
  for (std::size_t l = 0; l < rep.first.levels.size(); ++l)
    r.line(fmt("    t = %-12.8g first %-20.14g second %-20.14g", rep.first.levels[l].t, rep.first.levels[l].mean,
               rep.second.levels[l].mean));
}

std::vector<LevelRecords> evaluate(const Scenario& sc, const Context& c) {
  return evaluate_levels(*c.fn, c.metric, sample_levels(*c.fn, c.metric, sc.sampling), true);
}

void suite_criteria(const Scenario& sc, const Context& c, const std::vector<LevelRecords>& rec, Report& r) {
  auto wants = [&](const char* s) { return std::find(sc.suites.begin(), sc.suites.end(), s) != sc.suites.end(); };
  const Tolerances& t = sc.tol;
  std::map<std::string, Verdict> got;
  int points = 0;
  for (const auto& lv : rec) points += static_cast<int>(lv.points.size());
  r.line(fmt("[isoparametric] f = %s, %zu levels, %d points", c.fn->name().c_str(), rec.size(), points));

  auto record = [&](const std::string& key, const IsoparametricReport& rep) {
    print_criterion(r, rep);
    got[key] = rep.verdict;
    auto it = sc.expect.find(key);
    if (it != sc.expect.end() && it->second != to_string(rep.verdict))
      r.fail(key + " verdict is " + to_string(rep.verdict) + ", expected " + it->second);
  };

  if (wants("direct")) record("direct", direct_report(rec, t));
  if (wants("riemannian")) record("riemannian", riemannian_report(rec, t));
  if (wants("navigation")) {
    if (c.cls.kind != FieldClassKind::kNeither) {
      const double expect = -2.0 * c.space.dim() * c.cls.k0;
      double worst = 0.0;
      for (const auto& lv : rec)
        for (const auto& p : lv.points) worst = std::max(worst, std::fabs(p.div_W - expect));
      r.check("divergence of W vs -2 n k0", worst, t.identity);
    }
    record("navigation", navigation_report(rec, t));
  }
  if (wants("sphere")) record("sphere", sphere_report(rec, t));

  // The Finsler and navigation criteria are equivalent; so is the homogeneous
  // sphere form when it applies.
  if (got.count("direct") && got.count("navigation")) {
    if (got["direct"] != got["navigation"])
      r.fail("direct and navigation criteria disagree");
    else
      r.line("  PASS  direct and navigation criteria agree");
  }
  if (got.count("sphere")) {
    const char* other = got.count("direct") ? "direct" : got.count("navigation") ? "navigation" : nullptr;
    if (other && got[other] != got["sphere"])
      r.fail(std::string("sphere criterion disagrees with ") + other);
    else if (other)
      r.line(std::string("  PASS  sphere criterion agrees with ") + other);
  }
}

void suite_wind_profile(const Scenario& sc, const Context& c, const std::vector<LevelRecords>& rec, Report& r) {
  r.line("[wind_profile] df(W) as a function of f and the reconstructed Finsler profiles");
  if (c.cls.kind == FieldClassKind::kNeither)
    throw HypothesisError(fmt("wind profile check needs W homothetic; r_ij + 2 k0 h_ij residual is %.3e", c.cls.residual));
  const Tolerances& t = sc.tol;
  const WindProfileReport w = check_wind_profile(rec, c.space.dim(), c.cls.k0, t);
  std::vector<double> means;
  for (const auto& l : w.phi.levels) means.push_back(l.mean);
  r.line("  phi at level means " + join(means) + ", fitted coefficients " + join(w.phi.poly));
  const std::string expected = sc.expect.count("wind_profile") ? sc.expect.at("wind_profile") : "pass";
  const std::string verdict = w.passes ? "pass" : "fail";
  r.line("  df(W) constant on levels: " + std::string(w.passes ? "yes" : "no"));
  if (verdict != expected) r.fail("wind profile verdict is " + verdict + ", expected " + expected);
  r.check("divergence of W vs -2 n k0", w.div_residual, t.identity);
  if (!w.passes) return;
  if (!w.direct_isoparametric) r.fail("df(W) = phi(f) holds but f is not isoparametric for F");
  r.check("a~ vs a + phi at level means", w.a_tilde_residual, t.profile_first);
  r.check("b~ vs (a + phi)(b/a - 2 n k0 + phi')", w.b_tilde_residual, t.profile_identity);
  r.line(fmt("  INFO  b~ vs b - a(2 n k0 - phi') (form without the a + phi factor): %.3e", w.b_tilde_literal_residual));
}

void write_csv(std::ostream& os, const std::vector<LevelRecords>& rec, int n) {
  os << "level";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << ",F_grad,finsler_laplacian,h_norm_df,h_laplacian,df_W\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    os << buf;
  };
  for (const auto& lv : rec)
    for (const auto& p : lv.points) {
      std::snprintf(buf, sizeof buf, "%.17g", lv.t);
      os << buf;
      for (int i = 0; i < n; ++i) put(p.chart[i]);
      put(p.F_grad);
      put(p.finsler_laplacian);
      put(p.h_norm_df);
      put(p.h_laplacian);
      put(p.df_W);
      os << "\n";
    }
}

std::string describe_wind(const WindConfig& w) {
  std::string s = w.kind;
  if (w.kind == "affine") s += fmt(" k0 = %g", w.k0);
  if (!w.q_upper.empty()) s += " Q_upper = " + join(w.q_upper);
  if (!w.e.empty()) s += " e = " + join(w.e);
  for (const auto& comp : w.components) s += " " + comp;
  return s;
}

}  // namespace

// ---- public --------------------------------------------------------------

std::vector<std::string> function_catalog_names() { return {"norm2", "height", "sphere_height", "block_quadric"}; }

Scenario parse_scenario(const std::string& text, const std::string& fallback_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
  }
  Scenario sc;
  try {
    allow_keys(j,
               {"name", "description", "space", "wind", "function", "hypersurface", "suites", "sampling", "metric",
                "tolerances", "expect"},
               "scenario");
    sc.name = get_str(j, "name", "scenario", fallback_name);
    sc.description = get_str(j, "description", "scenario", "");
    if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("scenario name must be a plain file stem");

    if (!j.contains("space")) throw ConfigError("scenario.space is required");
    const json& sp = j.at("space");
    allow_keys(sp, {"dim", "curvature", "chart"}, "space");
    sc.dim = get_int(sp, "dim", "space");
    sc.curvature = get_num(sp, "curvature", "space", 0.0);
    if (sc.dim < 1 || sc.dim > kMaxDim) throw ConfigError(fmt("space.dim must be in [1, %d]", kMaxDim));
    if (sp.contains("chart")) {
      const std::string want = get_str(sp, "chart", "space");
      const Chart chart = sc.curvature == 0.0 ? Chart::kCartesian
                          : sc.curvature < 0.0 ? Chart::kPoincareBall
                                               : Chart::kStereographic;
      if (want != to_string(chart))
        throw ConfigError("space.chart '" + want + "' does not match curvature (" + to_string(chart) + ")");
    }

    if (j.contains("wind")) {
      const json& w = j.at("wind");
      allow_keys(w, {"kind", "k0", "q_upper", "q", "e", "components"}, "wind");
      sc.wind.kind = get_str(w, "kind", "wind");
      const std::set<std::string> kinds = {"zero", "constant", "affine", "projective", "sphere_rotation", "expr"};
      if (!kinds.count(sc.wind.kind)) throw ConfigError("unknown wind kind '" + sc.wind.kind + "'");
      sc.wind.k0 = get_num(w, "k0", "wind", 0.0);
      if (sc.wind.k0 != 0.0 && sc.wind.kind != "affine") throw ConfigError("wind.k0 only applies to the affine kind");
      sc.wind.q_upper = read_q(w, sc.wind.kind == "sphere_rotation" ? sc.dim + 1 : sc.dim, "wind");
      sc.wind.e = get_nums(w, "e", "wind");
      if (!sc.wind.e.empty() && static_cast<int>(sc.wind.e.size()) != sc.dim)
        throw ConfigError(fmt("wind.e must have %d entries", sc.dim));
      if (sc.wind.kind == "constant" && sc.wind.e.empty()) throw ConfigError("constant wind needs wind.e");
      if (w.contains("components")) {
        if (!w.at("components").is_array()) throw ConfigError("wind.components must be an array of strings");
        for (const auto& s : w.at("components")) {
          if (!s.is_string()) throw ConfigError("wind.components must be an array of strings");
          sc.wind.components.push_back(s.get<std::string>());
        }
      }
      if (sc.wind.kind == "sphere_rotation" && sc.curvature <= 0.0)
        throw ConfigError("sphere_rotation wind needs positive curvature");
    }

    if (j.contains("function")) {
      const json& f = j.at("function");
      allow_keys(f, {"expr", "homogeneous", "degree", "catalog", "m"}, "function");
      const int given = int(f.contains("expr")) + int(f.contains("homogeneous")) + int(f.contains("catalog"));
      if (given != 1) throw ConfigError("function needs exactly one of expr, homogeneous, catalog");
      FunctionConfig fc;
      if (f.contains("expr")) {
        fc.kind = "expr";
        fc.text = get_str(f, "expr", "function");
      } else if (f.contains("homogeneous")) {
        fc.kind = "homogeneous";
        fc.text = get_str(f, "homogeneous", "function");
        fc.degree = get_int(f, "degree", "function");
      } else {
        fc.kind = "catalog";
        fc.catalog = get_str(f, "catalog", "function");
        const auto names = function_catalog_names();
        if (std::find(names.begin(), names.end(), fc.catalog) == names.end())
          throw ConfigError("unknown catalog function '" + fc.catalog + "'");
        fc.m = get_int(f, "m", "function", 1);
      }
      if (f.contains("m") && fc.kind != "catalog") throw ConfigError("function.m is for catalog functions");
      sc.function = fc;
    }

    if (j.contains("hypersurface")) {
      const json& h = j.at("hypersurface");
      allow_keys(h, {"catalog", "radius", "m", "offset", "points"}, "hypersurface");
      HypersurfaceConfig hc;
      hc.catalog = get_str(h, "catalog", "hypersurface");
      const auto names = catalog_names();
      if (std::find(names.begin(), names.end(), hc.catalog) == names.end())
        throw ConfigError("unknown hypersurface catalog entry '" + hc.catalog + "'");
      hc.params.radius = get_num(h, "radius", "hypersurface", 1.0);
      hc.params.m = get_int(h, "m", "hypersurface", 1);
      hc.params.offset = get_num(h, "offset", "hypersurface", 0.0);
      hc.points = get_int(h, "points", "hypersurface", 8);
      if (hc.points < 1) throw ConfigError("hypersurface.points must be positive");
      if (sc.dim < 2) throw ConfigError("hypersurfaces need dimension at least 2");
      sc.hypersurface = hc;
    }

    if (!j.contains("suites") || !j.at("suites").is_array() || j.at("suites").empty())
      throw ConfigError("scenario.suites must be a nonempty array");
    for (const auto& s : j.at("suites")) {
      if (!s.is_string()) throw ConfigError("scenario.suites entries must be strings");
      const std::string name = s.get<std::string>();
      if (std::find(kSuites.begin(), kSuites.end(), name) == kSuites.end())
        throw ConfigError("unknown suite '" + name + "'");
      if (std::find(sc.suites.begin(), sc.suites.end(), name) != sc.suites.end())
        throw ConfigError("suite '" + name + "' listed twice");
      sc.suites.push_back(name);
      if (kNeedsFunction.count(name) && !sc.function) throw ConfigError("suite '" + name + "' needs a function");
      if (name == "shift" && !sc.hypersurface) throw ConfigError("suite 'shift' needs a hypersurface");
      if (name == "sphere" && sc.function->kind == "expr")
        throw ConfigError("suite 'sphere' needs a homogeneous (sphere) function");
    }

    if (j.contains("sampling")) {
      const json& s = j.at("sampling");
      allow_keys(s, {"levels", "values", "count", "seed", "radius"}, "sampling");
      sc.sampling.levels = get_int(s, "levels", "sampling", sc.sampling.levels);
      sc.sampling.explicit_levels = get_nums(s, "values", "sampling");
      sc.sampling.count = get_int(s, "count", "sampling", sc.sampling.count);
      if (s.contains("seed")) {
        if (!s.at("seed").is_number_unsigned()) throw ConfigError("sampling.seed must be a nonnegative integer");
        sc.sampling.seed = s.at("seed").get<std::uint64_t>();
      }
      sc.sampling.radius = get_num(s, "radius", "sampling", sc.sampling.radius);
      if (sc.sampling.levels < 2 && sc.sampling.explicit_levels.empty())
        throw ConfigError("sampling.levels must be at least 2");
      if (sc.sampling.count < 1) throw ConfigError("sampling.count must be positive");
      if (!(sc.sampling.radius > 0.0)) throw ConfigError("sampling.radius must be positive");
    }
    sc.metric.seed = sc.sampling.seed;
    sc.metric.radius = sc.sampling.radius;
    if (j.contains("metric")) {
      const json& m = j.at("metric");
      allow_keys(m, {"samples", "flag_samples", "radius"}, "metric");
      sc.metric.samples = get_int(m, "samples", "metric", sc.metric.samples);
      sc.metric.flag_samples = get_int(m, "flag_samples", "metric", sc.metric.flag_samples);
      sc.metric.radius = get_num(m, "radius", "metric", sc.metric.radius);
      if (sc.metric.samples < 1 || sc.metric.flag_samples < 1) throw ConfigError("metric sample counts must be positive");
    }

    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      if (!t.is_object()) throw ConfigError("tolerances must be an object");
      for (auto it = t.begin(); it != t.end(); ++it) {
        bool found = false;
        for (const auto& [key, ptr] : kTolFields)
          if (it.key() == key) {
            found = true;
            const double v = get_num(t, key, "tolerances");
            if (!(v > 0.0)) throw ConfigError(std::string("tolerances.") + key + " must be positive");
            sc.tol.*ptr = v;
          }
        if (!found) throw ConfigError("unknown tolerance '" + it.key() + "'");
      }
    }

    if (j.contains("expect")) {
      const json& e = j.at("expect");
      if (!e.is_object()) throw ConfigError("expect must be an object");
      for (auto it = e.begin(); it != e.end(); ++it) {
        if (!it.value().is_string()) throw ConfigError("expect values must be strings");
        const std::string v = it.value().get<std::string>();
        if (it.key() == "wind_profile") {
          if (v != "pass" && v != "fail") throw ConfigError("expect.wind_profile must be pass or fail");
        } else if (it.key() == "direct" || it.key() == "riemannian" || it.key() == "navigation" ||
                   it.key() == "sphere") {
          if (!valid_verdict(v)) throw ConfigError("expect." + it.key() + " must be isoparametric, transnormal or neither");
        } else {
          throw ConfigError("expect has no criterion '" + it.key() + "'");
        }
        if (std::find(sc.suites.begin(), sc.suites.end(), it.key()) == sc.suites.end())
          throw ConfigError("expect." + it.key() + " refers to a suite that is not requested");
        sc.expect[it.key()] = v;
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).stem().string());
}

int run_scenario(const Scenario& base, const RunOptions& opt, const LineSink& sink) {
  Report r(sink);
  std::optional<Scenario> scn;
  std::optional<Context> ctx;
  try {
    scn = effective(base, opt);
    ctx.emplace(*scn);
  } catch (const Error& e) {
    r.line("scenario " + base.name);
    r.line("CONFIG ERROR: " + std::string(e.what()));
    r.line("result: CONFIG ERROR (exit 2)");
    return kExitConfig;
  }
  const Scenario& sc = *scn;
  const Context& c = *ctx;

  r.line("scenario " + sc.name + (sc.description.empty() ? "" : ": " + sc.description));
  r.line(fmt("  space: dim %d, curvature %g (%s chart)", sc.dim, sc.curvature, to_string(c.space.chart()).c_str()));
  r.line("  wind: " + describe_wind(sc.wind) +
         fmt("; class %s, k0 = %.12g (residual %.2e)", to_string(c.cls.kind).c_str(), c.cls.k0, c.cls.residual));
  if (c.fn) r.line("  function: " + c.fn->name() + (c.fn->domain() == FieldDomain::kSphere ? fmt(" (homogeneous of degree %d on the sphere)", c.fn->degree()) : ""));
  if (c.M) r.line("  hypersurface: " + c.M->catalog_id() + fmt(" (radius %g, m %d, offset %g)", sc.hypersurface->params.radius, sc.hypersurface->params.m, sc.hypersurface->params.offset));
  r.line(fmt("  seed %llu", static_cast<unsigned long long>(sc.sampling.seed)));

  auto guarded = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const HypothesisError& e) {
      r.hypothesis(std::string(name) + ": " + e.what());
    } catch (const Error& e) {
      r.fail(std::string(name) + ": " + e.what());
    } catch (const std::exception& e) {
      r.fail(std::string(name) + ": unexpected error: " + e.what());
    }
  };
  auto wants = [&](const char* s) { return std::find(sc.suites.begin(), sc.suites.end(), s) != sc.suites.end(); };

  if (wants("metric")) guarded("metric", [&] { suite_metric(sc, c, r); });
  if (wants("shift")) guarded("shift", [&] { suite_shift(sc, c, r); });

  const bool criteria = wants("direct") || wants("riemannian") || wants("navigation") || wants("sphere");
  if (c.fn && (criteria || wants("wind_profile") || !opt.csv_dir.empty())) {
    std::optional<std::vector<LevelRecords>> rec;
    guarded("sampling", [&] { rec = evaluate(sc, c); });
    if (rec) {
      if (criteria) guarded("isoparametric", [&] { suite_criteria(sc, c, *rec, r); });
      if (wants("wind_profile")) guarded("wind_profile", [&] { suite_wind_profile(sc, c, *rec, r); });
      if (!opt.csv_dir.empty()) {
        guarded("csv", [&] {
          std::filesystem::create_directories(opt.csv_dir);
          const std::string path = (std::filesystem::path(opt.csv_dir) / (sc.name + ".csv")).string();
          std::ofstream out(path, std::ios::binary);
          if (!out) throw IoError("cannot write '" + path + "'");
          write_csv(out, *rec, sc.dim);
          if (!out) throw IoError("write to '" + path + "' failed");
          r.line("  csv: " + path);
        });
      }
    }
  }

  const int code = r.code();
  const char* word = code == kExitPass ? "PASS" : code == kExitFail ? "FAIL" : "HYPOTHESIS NOT MET";
  r.line(fmt("result: %s (exit %d)", word, code));
  return code;
}

int run_scenario_file(const std::string& path, const RunOptions& opt, const LineSink& sink) {
  Scenario sc;
  try {
    sc = load_scenario(path);
  } catch (const Error& e) {
    if (sink) {
      sink("scenario " + path);
      sink("CONFIG ERROR: " + std::string(e.what()));
      sink("result: CONFIG ERROR (exit 2)");
    }
    return kExitConfig;
  }
  return run_scenario(sc, opt, sink);
}

std::string scenario_csv(const Scenario& base, const RunOptions& opt) {
  const Scenario sc = effective(base, opt);
  const Context c(sc);
  if (!c.fn) throw ConfigError("scenario has no function to sample");
  std::ostringstream os;
  write_csv(os, evaluate(sc, c), sc.dim);
  return os.str();
}

}  // namespace rnav

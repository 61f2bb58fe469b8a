#include "rnav/isoparametric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace rnav {

namespace {

// Sampled sphere points must keep away from the projection pole.
constexpr double kPoleCap = 0.5;

ScalarField compose_inverse_stereographic(const ScalarField& phi) {
  const int n = phi.dim() - 1;
  return ScalarField::make(
      n, [phi](const auto& x) { return phi(inverse_stereographic(x, 1.0)); }, phi.name());
}

// Ambient rotation Q for W = XQ restricted to the sphere (zero wind allowed).
Mat<double> ambient_rotation_of(const VectorFieldSpec& w) {
  if (w.ambient_rotation()) return *w.ambient_rotation();
  const int n = w.dim();
  if (w.kind() == FieldKind::kAffine && w.k0() == 0.0 && max_abs(w.q()) == 0.0 && max_abs(w.e()) == 0.0)
    return Mat<double>(n + 1, n + 1);
  throw InvalidArgument("sphere functions need W = XQ (a sphere rotation) or W = 0");
}

void require_sphere_space(const IsoFunction& f, const SpaceForm& space) {
  if (f.domain() != FieldDomain::kSphere) return;
  if (space.chart() != Chart::kStereographic || space.curvature() != 1.0)
    throw InvalidArgument("sphere functions live on the unit sphere (stereographic chart with curvature 1)");
  if (space.dim() != f.dim()) throw InvalidArgument("sphere function and space form dimensions differ");
}

struct Sampler {
  const IsoFunction& f;
  const RandersMetric& metric;
  const SamplingOptions& opt;
  ScalarField chart_f;
  double r_eff = 1.0;

  Sampler(const IsoFunction& fn, const RandersMetric& m, const SamplingOptions& o)
      : f(fn), metric(m), opt(o), chart_f(fn.chart_field()) {
    require_sphere_space(f, metric.space());
    if (f.domain() == FieldDomain::kChart && f.dim() != metric.dim())
      throw InvalidArgument("function and metric dimensions differ");
    r_eff = std::min(opt.radius, 0.95 * metric.space().chart_radius());
    if (!(r_eff > 0.0)) throw InvalidArgument("sampling radius must be positive");
  }

  bool sphere() const { return f.domain() == FieldDomain::kSphere; }

  Vec<double> chart_of(const Vec<double>& p) const { return sphere() ? stereographic(p, 1.0) : p; }

  bool admissible(const Vec<double>& p) const {
    if (sphere()) {
      if (p[p.size() - 1] > kPoleCap) return false;
    } else {
      if (!metric.space().in_domain(p) || norm(p) > r_eff) return false;
    }
    const Vec<double> x = chart_of(p);
    return metric.nav().wind_norm2(x) < opt.max_wind * opt.max_wind;
  }

  Vec<double> candidate(Rng& rng) const {
    return sphere() ? rng.unit_vector(f.dim() + 1) : rng.in_ball(f.dim(), r_eff);
  }

  double value(const Vec<double>& p) const { return f.field()(p); }

  // |df|_h at p
  double df_norm(const Vec<double>& p) const {
    if (sphere()) {
      const Vec<double> g = gradient(f.field(), p);
      return std::sqrt(std::max(0.0, dot(g, g) - dot(p, g) * dot(p, g)));
    }
    const Vec<double> df = gradient(f.field(), p);
    return std::sqrt(bilinear(inverse(metric.space().metric(p)), df, df));
  }

  // One Newton step along the h-gradient; false at a critical point.
  bool step(Vec<double>& p, double t) const {
    const double v = value(p) - t;
    const Vec<double> df = gradient(f.field(), p);
    if (sphere()) {
      const Vec<double> g = df - dot(p, df) * p;
      const double g2 = dot(g, g);
      if (!(g2 > 0.0)) return false;
      p = p - (v / g2) * g;
      p = (1.0 / norm(p)) * p;
    } else {
      const Vec<double> g = inverse(metric.space().metric(p)) * df;
      const double g2 = dot(df, g);
      if (!(g2 > 0.0)) return false;
      p = p - (v / g2) * g;
    }
    return true;
  }
};

PointRecord eval_chart_point(const ScalarField& f, const RandersMetric& m, const Vec<double>& x, bool finsler) {
  const SpaceForm& space = m.space();
  const int n = space.dim();
  PointRecord r;
  r.chart = x;
  const RiemannianDerivatives rd = riem_grad_hess_lap(space, f, x);
  r.value = rd.value;
  r.h_norm_df = rd.df_norm;
  r.h_laplacian = rd.laplacian;
  const Vec<double> W = m.wind()(x);
  r.df_W = dot(rd.df, W);

  const CovariantData<double> cd = covariant_data(space, m.wind(), x);
  double div = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) div += cd.hinv(i, j) * cd.w_cov(i, j);
  r.div_W = div;

  // d(df(W))
  Vec<double> dpsi(n);
  for (int j = 0; j < n; ++j) {
    const Vec<D1> xj = seed(x, Vec<double>::unit(n, j));
    dpsi[j] = dot(gradient(f, xj), m.wind()(xj)).d;
  }
  const double n2 = rd.df_norm * rd.df_norm;
  r.nav_first = rd.df_norm + r.df_W;
  r.nav_second = rd.laplacian / rd.df_norm + div + dot(dpsi, rd.grad) / n2;
  if (finsler) {
    r.F_grad = m.dual_norm(x, rd.df);
    r.finsler_laplacian = m.laplacian(f, x);
  }
  return r;
}

PointRecord eval_sphere_point(const IsoFunction& fn, const ScalarField& chart_f, const RandersMetric& m,
                              const Mat<double>& Q, const Vec<double>& X, bool finsler) {
  const ScalarField& phi = fn.field();
  const int k = fn.degree();
  const int N = X.size();  // n + 1
  const int n = N - 1;
  PointRecord r;
  r.ambient = X;
  r.chart = stereographic(X, 1.0);

  const Jet2 jet = eval_jet2(phi, X);
  const SphereCalculus sc = sphere_calculus(phi, k, X);
  r.value = jet.value;
  r.h_norm_df = std::sqrt(std::max(0.0, sc.grad_norm2));
  r.h_laplacian = sc.laplacian;

  auto rot = [&](const auto& v) {
    using T = std::decay_t<decltype(v[0])>;
    Vec<T> out(N);
    for (int j = 0; j < N; ++j) {
      T s(0.0);
      for (int i = 0; i < N; ++i) s += v[i] * Q(i, j);
      out[j] = s;
    }
    return out;
  };
  const Vec<double> XQ = rot(X);
  const double psi = dot(jet.grad, XQ);
  Vec<double> dpsi(N);
  for (int j = 0; j < N; ++j) {
    const Vec<D1> Xj = seed(X, Vec<double>::unit(N, j));
    dpsi[j] = dot(gradient(phi, Xj), rot(Xj)).d;
  }
  r.df_W = dot(sc.grad, XQ);
  // tangential divergence of X -> XQ: tr Q - X^T Q X
  double div = 0.0;
  for (int i = 0; i < N; ++i) div += Q(i, i);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) div -= X[i] * Q(i, j) * X[j];
  r.div_W = div;

  r.nav_first = r.h_norm_df + r.df_W;
  r.nav_second = sc.laplacian / r.h_norm_df + div + dot(dpsi, sc.grad) / sc.grad_norm2;

  // Literal homogeneous-form criterion (Euclidean inner products throughout).
  double lapE = 0.0;
  for (int i = 0; i < N; ++i) lapE += jet.hess(i, i);
  const Vec<double> gk = jet.grad - (k * jet.value) * X;
  r.sphere_first = norm(gk) + psi;
  r.sphere_second = (lapE - k * (k + n - 1) * jet.value) / norm(gk) +
                    dot(dpsi, jet.grad) / (dot(jet.grad, jet.grad) - k * k * jet.value * jet.value);

  if (finsler) {
    const Vec<double> df = gradient(chart_f, r.chart);
    r.F_grad = m.dual_norm(r.chart, df);
    r.finsler_laplacian = m.laplacian(chart_f, r.chart);
  }
  return r;
}

using Getter = double (*)(const PointRecord&);

IsoparametricReport build_report(const std::string& name, const std::vector<LevelRecords>& rec, Getter first,
                                 Getter second, const Tolerances& tol) {
  IsoparametricReport rep;
  rep.criterion = name;
  std::vector<std::pair<double, double>> a, b;
  for (const auto& lv : rec) {
    rep.excluded_points += lv.excluded;
    if (lv.irregular || lv.points.empty()) {
      ++rep.invalid_levels;
      continue;
    }
    for (const auto& p : lv.points) {
      a.emplace_back(lv.t, first(p));
      b.emplace_back(lv.t, second(p));
    }
  }
  if (a.empty()) throw DomainError(name + ": every sampled level is irregular");
  rep.first = fit_profiles(a, tol.level_abs, tol.level_rel);
  rep.second = fit_profiles(b, tol.level_abs, tol.level_rel);
  for (const auto& l : rep.first.levels) rep.max_first_spread = std::max(rep.max_first_spread, l.spread);
  for (const auto& l : rep.second.levels) rep.max_second_spread = std::max(rep.max_second_spread, l.spread);
  if (rep.first.constant_on_levels && rep.second.constant_on_levels) {
    rep.verdict = Verdict::kIsoparametric;
  } else if (rep.first.constant_on_levels) {
    rep.verdict = Verdict::kTransnormal;
  } else {
    rep.verdict = Verdict::kNeither;
  }
  return rep;
}

// Derivative of the interpolating parabola through three nodes, at node `at`.
double lagrange_slope(const double* t, const double* y, int at) {
  const double t0 = t[0], t1 = t[1], t2 = t[2];
  const double x = t[at];
  const double l0 = ((x - t1) + (x - t2)) / ((t0 - t1) * (t0 - t2));
  const double l1 = ((x - t0) + (x - t2)) / ((t1 - t0) * (t1 - t2));
  const double l2 = ((x - t0) + (x - t1)) / ((t2 - t0) * (t2 - t1));
  return y[0] * l0 + y[1] * l1 + y[2] * l2;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kIsoparametric: return "isoparametric";
    case Verdict::kTransnormal: return "transnormal";
    case Verdict::kNeither: return "neither";
  }
  return "?";
}

IsoFunction IsoFunction::chart(ScalarField f) {
  if (!f.valid()) throw InvalidArgument("empty scalar field");
  IsoFunction out;
  out.field_ = std::move(f);
  out.domain_ = FieldDomain::kChart;
  return out;
}

IsoFunction IsoFunction::sphere(ScalarField phi, int degree, double tol, std::uint64_t seed) {
  if (!phi.valid()) throw InvalidArgument("empty scalar field");
  if (phi.dim() < 3) throw InvalidArgument("sphere functions need an ambient dimension of at least 3 (S^n, n >= 2)");
  if (degree < 0) throw InvalidArgument("homogeneity degree must be non-negative");
  const double res = homogeneity_residual(phi, degree, 16, seed);
  if (res > tol) {
    std::ostringstream os;
    os << "'" << phi.name() << "' is not homogeneous of degree " << degree << " (residual " << res << ")";
    throw InvalidArgument(os.str());
  }
  IsoFunction out;
  out.field_ = std::move(phi);
  out.domain_ = FieldDomain::kSphere;
  out.degree_ = degree;
  return out;
}

ScalarField IsoFunction::chart_field() const {
  return domain_ == FieldDomain::kChart ? field_ : compose_inverse_stereographic(field_);
}

double homogeneity_residual(const ScalarField& phi, int degree, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec<double> X = rng.unit_vector(phi.dim());
    const double t = rng.uniform(0.5, 2.0);
    const double ref = std::pow(t, degree) * phi(X);
    const double got = phi(t * X);
    worst = std::max(worst, std::fabs(got - ref) / std::max(1.0, std::fabs(ref)));
  }
  return worst;
}

std::vector<double> choose_levels(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt) {
  if (!opt.explicit_levels.empty()) {
    std::vector<double> lv = opt.explicit_levels;
    std::sort(lv.begin(), lv.end());
    return lv;
  }
  if (opt.levels < 2) throw InvalidArgument("at least two levels are needed to fit profiles");
  const Sampler s(f, metric, opt);
  Rng rng = Rng::split(opt.seed, 0);
  double lo = 0.0, hi = 0.0;
  int found = 0;
  for (int attempt = 0; attempt < 100000 && found < 256; ++attempt) {
    const Vec<double> p = s.candidate(rng);
    if (!s.admissible(p)) continue;
    const double v = s.value(p);
    lo = found == 0 ? v : std::min(lo, v);
    hi = found == 0 ? v : std::max(hi, v);
    ++found;
  }
  if (found < 16) throw DomainError("could not find admissible points to estimate the range of f");
  if (!(hi - lo > 1e-9 * std::max(1.0, std::fabs(hi)))) throw DomainError("f is constant on the sampled region");
  std::vector<double> lv;
  for (int k = 0; k < opt.levels; ++k) lv.push_back(lo + (k + 1) * (hi - lo) / (opt.levels + 1));
  return lv;
}

LevelSample sample_level_set(const IsoFunction& f, const RandersMetric& metric, double t, int count,
                             std::uint64_t seed, const SamplingOptions& opt) {
  if (count < 1) throw InvalidArgument("sample count must be positive");
  const Sampler s(f, metric, opt);
  const Tolerances& tol = metric.tolerances();
  Rng rng(seed);
  LevelSample out;
  out.t = t;
  const long max_attempts = 200L * count;
  long attempts = 0;
  while (static_cast<int>(out.points.size()) < count) {
    if (++attempts > max_attempts) {
      std::ostringstream os;
      os << "level " << t << ": Newton projection failed to converge (" << out.points.size() << " of " << count
         << " points after " << max_attempts << " attempts)";
      throw NumericalError(os.str());
    }
    Vec<double> p = s.candidate(rng);
    if (!s.admissible(p)) continue;
    bool ok = true;
    for (int it = 0; it < opt.max_newton; ++it) {
      if (std::fabs(s.value(p) - t) <= 1e-14 * std::max(1.0, std::fabs(t))) break;
      if (!s.step(p, t)) {
        ok = false;
        break;
      }
      if (s.sphere() ? false : !metric.space().in_domain(p)) {
        ok = false;
        break;
      }
    }
    if (!ok || !s.admissible(p)) continue;
    if (!(std::fabs(s.value(p) - t) < tol.level_membership)) continue;
    if (s.df_norm(p) < tol.critical_df) {
      ++out.excluded;
      continue;
    }
    out.points.push_back(p);
  }
  const double total = static_cast<double>(out.points.size() + out.excluded);
  out.irregular = out.excluded > tol.irregular_fraction * total;
  return out;
}

std::vector<LevelSample> sample_levels(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt) {
  const std::vector<double> lv = choose_levels(f, metric, opt);
  std::vector<LevelSample> out;
  for (std::size_t i = 0; i < lv.size(); ++i) {
    Rng r = Rng::split(opt.seed, i + 1);
    const std::uint64_t level_seed = static_cast<std::uint64_t>(r.uniform() * 9007199254740992.0);
    out.push_back(sample_level_set(f, metric, lv[i], opt.count, level_seed, opt));
  }
  return out;
}

std::vector<LevelRecords> evaluate_levels(const IsoFunction& f, const RandersMetric& metric,
                                          const std::vector<LevelSample>& samples, bool finsler) {
  require_sphere_space(f, metric.space());
  const ScalarField chart_f = f.chart_field();
  Mat<double> Q;
  if (f.domain() == FieldDomain::kSphere) Q = ambient_rotation_of(metric.wind());
  std::vector<LevelRecords> out;
  for (const auto& ls : samples) {
    LevelRecords lr;
    lr.t = ls.t;
    lr.excluded = ls.excluded;
    lr.irregular = ls.irregular;
    for (const auto& p : ls.points)
      lr.points.push_back(f.domain() == FieldDomain::kChart ? eval_chart_point(chart_f, metric, p, finsler)
                                                            : eval_sphere_point(f, chart_f, metric, Q, p, finsler));
    out.push_back(std::move(lr));
  }
  return out;
}

FittedProfile fit_profiles(const std::vector<std::pair<double, double>>& samples, double tol_abs, double tol_rel) {
  std::map<double, std::vector<double>> by_level;
  for (const auto& [t, v] : samples) by_level[t].push_back(v);
  if (by_level.size() < 2) throw DomainError("profiles need at least two levels");
  FittedProfile out;
  out.constant_on_levels = true;
  for (const auto& [t, vs] : by_level) {
    LevelStat s;
    s.t = t;
    s.count = static_cast<int>(vs.size());
    s.min = *std::min_element(vs.begin(), vs.end());
    s.max = *std::max_element(vs.begin(), vs.end());
    double sum = 0.0;
    for (double v : vs) sum += v;
    s.mean = sum / s.count;
    s.spread = s.max - s.min;
    s.constant = std::isfinite(s.spread) && s.spread < tol_abs + tol_rel * std::fabs(s.mean);
    out.constant_on_levels = out.constant_on_levels && s.constant;
    out.levels.push_back(s);
  }

  const int L = static_cast<int>(out.levels.size());
  std::vector<double> ts, ys;
  for (const auto& s : out.levels) {
    ts.push_back(s.t);
    ys.push_back(s.mean);
  }
  // least squares in the shifted variable t - t0 keeps the normal equations tame
  const int deg = std::min(2, L - 1);
  const double t0 = ts[0];
  Mat<double> A(deg + 1, deg + 1);
  Vec<double> rhs(deg + 1);
  for (int l = 0; l < L; ++l) {
    std::array<double, 3> pw{1.0, ts[l] - t0, (ts[l] - t0) * (ts[l] - t0)};
    for (int i = 0; i <= deg; ++i) {
      rhs[i] += pw[i] * ys[l];
      for (int j = 0; j <= deg; ++j) A(i, j) += pw[i] * pw[j];
    }
  }
  const Vec<double> c = solve(A, rhs);
  // expand back to powers of t
  std::vector<double> poly(deg + 1, 0.0);
  poly[0] = c[0];
  if (deg >= 1) {
    poly[0] -= c[1] * t0;
    poly[1] = c[1];
  }
  if (deg >= 2) {
    poly[0] += c[2] * t0 * t0;
    poly[1] -= 2.0 * c[2] * t0;
    poly[2] = c[2];
  }
  out.poly = poly;
  for (int l = 0; l < L; ++l) {
    const double u = ts[l] - t0;
    double p = c[0];
    if (deg >= 1) p += c[1] * u;
    if (deg >= 2) p += c[2] * u * u;
    out.max_deviation = std::max(out.max_deviation, std::fabs(p - ys[l]));
  }

  out.derivative.resize(L);
  if (L == 2) {
    const double d = (ys[1] - ys[0]) / (ts[1] - ts[0]);
    out.derivative = {d, d};
  } else {
    for (int l = 0; l < L; ++l) {
      const int base = std::clamp(l - 1, 0, L - 3);
      out.derivative[l] = lagrange_slope(&ts[base], &ys[base], l - base);
    }
  }
  return out;
}

IsoparametricReport direct_report(const std::vector<LevelRecords>& rec, const Tolerances& tol) {
  return build_report(
      "direct", rec, [](const PointRecord& p) { return p.F_grad; },
      [](const PointRecord& p) { return p.finsler_laplacian; }, tol);
}

IsoparametricReport riemannian_report(const std::vector<LevelRecords>& rec, const Tolerances& tol) {
  return build_report(
      "riemannian", rec, [](const PointRecord& p) { return p.h_norm_df; },
      [](const PointRecord& p) { return p.h_laplacian; }, tol);
}

IsoparametricReport navigation_report(const std::vector<LevelRecords>& rec, const Tolerances& tol) {
  return build_report(
      "navigation", rec, [](const PointRecord& p) { return p.nav_first; },
      [](const PointRecord& p) { return p.nav_second; }, tol);
}

IsoparametricReport sphere_report(const std::vector<LevelRecords>& rec, const Tolerances& tol) {
  for (const auto& lv : rec)
    for (const auto& p : lv.points)
      if (p.ambient.size() == 0) throw InvalidArgument("the homogeneous sphere criterion needs a sphere function");
  return build_report(
      "sphere", rec, [](const PointRecord& p) { return p.sphere_first; },
      [](const PointRecord& p) { return p.sphere_second; }, tol);
}

IsoparametricReport check_direct(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt) {
  return direct_report(evaluate_levels(f, metric, sample_levels(f, metric, opt), true), metric.tolerances());
}

IsoparametricReport check_riemannian(const IsoFunction& f, const SpaceForm& space, const SamplingOptions& opt,
                                     const Tolerances& tol) {
  const RandersMetric flat(NavigationSpec(space, VectorFieldSpec::zero(space.dim())), tol);
  return riemannian_report(evaluate_levels(f, flat, sample_levels(f, flat, opt), false), tol);
}

IsoparametricReport check_navigation(const IsoFunction& f, const RandersMetric& metric, const SamplingOptions& opt,
                                     const double* k0) {
  const auto rec = evaluate_levels(f, metric, sample_levels(f, metric, opt), false);
  if (k0) {
    const double expect = -2.0 * metric.dim() * *k0;
    for (const auto& lv : rec)
      for (const auto& p : lv.points)
        if (std::fabs(p.div_W - expect) > 1e-9 * std::max(1.0, std::fabs(expect))) {
          std::ostringstream os;
          os << "div W = " << p.div_W << " differs from -2 n k0 = " << expect;
          throw VerificationError(os.str());
        }
  }
  return navigation_report(rec, metric.tolerances());
}

IsoparametricReport check_sphere_criterion(const IsoFunction& f, const RandersMetric& metric,
                                           const SamplingOptions& opt) {
  if (f.domain() != FieldDomain::kSphere) throw InvalidArgument("the homogeneous sphere criterion needs a sphere function");
  return sphere_report(evaluate_levels(f, metric, sample_levels(f, metric, opt), false), metric.tolerances());
}

WindProfileReport check_wind_profile(const std::vector<LevelRecords>& rec, int n, double k0, const Tolerances& tol) {
  const IsoparametricReport riem = riemannian_report(rec, tol);
  if (riem.verdict != Verdict::kIsoparametric)
    throw HypothesisError("wind profile check needs f isoparametric for h; the Riemannian verdict is " +
                          to_string(riem.verdict));
  WindProfileReport out;
  std::vector<std::pair<double, double>> phi;
  for (const auto& lv : rec) {
    if (lv.irregular) continue;
    for (const auto& p : lv.points) {
      phi.emplace_back(lv.t, p.df_W);
      out.div_residual = std::max(out.div_residual, std::fabs(p.div_W + 2.0 * n * k0));
    }
  }
  out.phi = fit_profiles(phi, tol.level_abs, tol.level_rel);
  out.passes = out.phi.constant_on_levels;
  if (!out.passes) return out;

  const IsoparametricReport direct = direct_report(rec, tol);
  out.direct_isoparametric = direct.verdict == Verdict::kIsoparametric;
  const std::size_t L = out.phi.levels.size();
  for (std::size_t l = 0; l < L; ++l) {
    const double a = riem.first.levels[l].mean;
    const double b = riem.second.levels[l].mean;
    const double at = direct.first.levels[l].mean;
    const double bt = direct.second.levels[l].mean;
    const double ph = out.phi.levels[l].mean;
    const double dph = out.phi.derivative[l];
    out.a_tilde_residual = std::max(out.a_tilde_residual, std::fabs(at - (a + ph)));
    out.b_tilde_residual = std::max(out.b_tilde_residual, std::fabs(bt - (a + ph) * (b / a - 2.0 * n * k0 + dph)));
    out.b_tilde_literal_residual =
        std::max(out.b_tilde_literal_residual, std::fabs(bt - (b - a * (2.0 * n * k0 - dph))));
  }
  return out;
}

SphereCalculus sphere_calculus(const ScalarField& phi, int degree, const Vec<double>& X) {
  if (std::fabs(norm(X) - 1.0) > 1e-9) throw DomainError("sphere calculus needs |X| = 1");
  const int N = X.size();
  const int n = N - 1;
  const int k = degree;
  const Jet2 jet = eval_jet2(phi, X);
  double lapE = 0.0;
  for (int i = 0; i < N; ++i) lapE += jet.hess(i, i);
  SphereCalculus out;
  out.grad = jet.grad - (k * jet.value) * X;
  out.grad_norm2 = dot(jet.grad, jet.grad) - k * k * jet.value * jet.value;
  out.laplacian = lapE - k * (k + n - 1) * jet.value;

  // Tangential projection and Lap_E = d_rr + (n/r) d_r + Lap_S / r^2 at r = 1.
  const double dr = dot(X, jet.grad);
  const Vec<double> proj = jet.grad - dr * X;
  const double lapS = lapE - bilinear(jet.hess, X, X) - n * dr;
  out.identity_residual = std::max(
      {max_abs(proj - out.grad), std::fabs(dot(proj, proj) - out.grad_norm2), std::fabs(lapS - out.laplacian)});
  return out;
}

double sphere_chart_residual(const ScalarField& phi, int degree, const Vec<double>& X) {
  const int n = X.size() - 1;
  if (X[n] > 1.0 - 1e-3) throw DomainError("point too close to the projection pole");
  const SphereCalculus sc = sphere_calculus(phi, degree, X);
  const SpaceForm sphere(n, 1.0);
  const Vec<double> x = stereographic(X, 1.0);
  const RiemannianDerivatives rd = riem_grad_hess_lap(sphere, compose_inverse_stereographic(phi), x);
  const Vec<double> pushed = stereographic_push(X, sc.grad, 1.0);
  return std::max({std::fabs(rd.df_norm * rd.df_norm - sc.grad_norm2), std::fabs(rd.laplacian - sc.laplacian),
                   max_abs(rd.grad - pushed)});
}

}  // namespace rnav

#include "rnav/suites.hpp"

#include <algorithm>
#include <cmath>

namespace rnav {

namespace {

double rel(double err, double scale) { return err / std::max(1.0, std::fabs(scale)); }

// Positive root of h(y - F W, y - F W) = F^2, i.e. lambda F^2 + 2 <y,W> F - |y|^2 = 0.
double navigation_root(const Mat<double>& h, const Vec<double>& W, const Vec<double>& y) {
  const double lam = 1.0 - bilinear(h, W, W);
  const double yw = bilinear(h, y, W);
  const double yy = bilinear(h, y, y);
  // numerically stable form of (-yw + sqrt(yw^2 + lam yy)) / lam
  const double disc = std::sqrt(yw * yw + lam * yy);
  return yw <= 0.0 ? (disc - yw) / lam : yy / (disc + yw);
}

}  // namespace

MetricSuiteReport run_metric_suite(const RandersMetric& m, const MetricSuiteOptions& opt) {
  const SpaceForm& space = m.space();
  const int n = m.dim();
  MetricSuiteReport rep;
  Rng rng = Rng::split(opt.seed, 101);
  const std::vector<Vec<double>> pts = sample_navigation_points(space, m.wind(), opt.samples, opt.radius, rng);
  rep.samples = static_cast<int>(pts.size());

  for (const auto& x : pts) {
    const Vec<double> y = rng.normal() >= 0.0 ? rng.unit_vector(n) : rng.uniform(0.2, 3.0) * rng.unit_vector(n);
    const Mat<double> h = space.metric(x);
    const Vec<double> W = m.wind()(x);

    const double Fr = navigation_root(h, W, y);
    const double Fab = m.F_alpha_beta(x, y);
    rep.navigation_vs_alpha_beta = std::max(rep.navigation_vs_alpha_beta, std::fabs(Fab - Fr) / Fr);

    const AlphaBeta ab = m.alpha_beta(x);
    const double lam = ab.lambda;
    rep.alpha_determinant =
        std::max(rep.alpha_determinant, std::fabs(determinant(ab.a) * std::pow(lam, n + 1) / determinant(h) - 1.0));
    const double bb = bilinear(inverse(ab.a), ab.b, ab.b);
    const double sigma = std::pow(1.0 - bb, 0.5 * (n + 1)) * std::sqrt(determinant(ab.a));
    const double sdh = std::sqrt(determinant(h));
    rep.bh_density = std::max(rep.bh_density, std::fabs(sigma - sdh) / sdh);

    const Mat<double> g = m.fundamental_tensor(x, y);
    rep.fundamental_tensor =
        std::max(rep.fundamental_tensor, rel(max_abs(g - m.fundamental_tensor_autodiff(x, y)), max_abs(g)));
    const Mat<double> N = m.nonlinear_connection(x, y);
    const Mat<double> Nad = m.nonlinear_connection_autodiff(x, y);
    rep.nonlinear_connection = std::max(rep.nonlinear_connection, rel(max_abs(N - Nad), max_abs(Nad)));
    const Vec<double> G = m.spray(x, y);
    rep.spray = std::max(rep.spray, rel(max_abs(G - m.spray_from_metric(x, y)), max_abs(G)));
    const Tensor3<double> gamma = m.chern_connection(x, y);
    Mat<double> gy(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) gy(i, j) += gamma(i, j, k) * y[k];
    rep.chern_contraction = std::max(rep.chern_contraction, rel(max_abs(gy - N), max_abs(N)));

    const Vec<double> xi = m.legendre(x, y);
    const double back = norm(m.inverse_legendre(x, xi) - y) / norm(y);
    Vec<double> eta = rng.unit_vector(n);
    const double fwd = norm(m.legendre(x, m.inverse_legendre(x, eta)) - eta) / norm(eta);
    rep.legendre_roundtrip = std::max({rep.legendre_roundtrip, back, fwd});
  }

  // Riemannian background on a handful of points.
  for (int s = 0; s < std::min(rep.samples, 20); ++s) {
    const Vec<double>& x = pts[s];
    rep.metric_compatibility = std::max(rep.metric_compatibility, metric_compatibility_residual(space, x));
    if (n >= 2) {
      const Vec<double> u = rng.unit_vector(n), v = rng.unit_vector(n);
      rep.sectional_curvature =
          std::max(rep.sectional_curvature, std::fabs(sectional_curvature(space, x, u, v) - space.curvature()));
    }
  }

  if (opt.field) {
    rep.has_field = true;
    const ScalarField& f = *opt.field;
    for (const auto& x : pts) {
      const Vec<double> df = gradient(f, x);
      if (std::sqrt(bilinear(inverse(space.metric(x)), df, df)) < 1e-6) continue;
      ++rep.field_points;
      const Vec<double> grad = m.gradient(f, x);
      rep.gradient_dual = std::max(rep.gradient_dual, std::fabs(m.F(x, grad) - m.dual_norm(x, df)));
      const LaplacianForms lf = m.laplacian_forms(f, x);
      rep.laplacian_forms = std::max(rep.laplacian_forms, rel(std::fabs(lf.divergence - lf.trace), lf.divergence));
      rep.finite_difference = std::max(rep.finite_difference, fd_check(f, x, 1e-5).max_error());
    }
  }

  rep.field_class = classify_field(space, m.wind(), pts, m.tolerances().identity);
  if (opt.curvature && rep.field_class.kind != FieldClassKind::kNeither) {
    rep.curvature_checked = true;
    const double k0 = rep.field_class.k0;
    for (const auto& x : pts) {
      const Vec<double> y = rng.unit_vector(n);
      rep.s_curvature = std::max(rep.s_curvature, std::fabs(m.s_curvature(x, y) - (n + 1) * k0 * m.F(x, y)));
    }
    rep.flag_expected = space.curvature() - k0 * k0;
    if (n >= 2) {
      double lo = 0.0, hi = 0.0, sum = 0.0;
      const int count = std::max(1, opt.flag_samples);
      for (int s = 0; s < count; ++s) {
        const Vec<double>& x = pts[s % pts.size()];
        const Vec<double> y = rng.unit_vector(n);
        Vec<double> v = rng.unit_vector(n);
        v = v - dot(v, y) * y;  // keep the flag well away from degenerate
        v = (1.0 / norm(v)) * v;
        const double K = m.flag_curvature(x, y, v);
        lo = s == 0 ? K : std::min(lo, K);
        hi = s == 0 ? K : std::max(hi, K);
        sum += K;
      }
      rep.flag_mean = sum / count;
      rep.flag_spread = hi - lo;
    }
  }
  return rep;
}

ShiftSuiteReport run_shift_suite(const Immersion& M, const RandersMetric& metric, double k0, int points,
                                 std::uint64_t seed) {
  ShiftSuiteReport rep;
  rep.k0 = k0;
  Rng rng = Rng::split(seed, 202);
  int attempts = 0;
  while (rep.points < points) {
    if (++attempts > 200 * std::max(points, 1))
      throw DomainError("no admissible parameter points on '" + M.catalog_id() + "' (|W|_h < 1 fails)");
    const Vec<double> u = M.sample(rng);
    if (!metric.nav().admissible(M(u))) continue;
    for (int o : {1, -1}) {
      const CurvatureReport c = verify_shift(M, metric, u, k0, o);
      if (rep.points == 0 && o == 1) rep.first = c;
      rep.shift = std::max(rep.shift, c.shift_residual);
      rep.principal_angle = std::max(rep.principal_angle, c.principal_angle);
      rep.normal_derivative = std::max(rep.normal_derivative, c.normal_derivative_residual);
      rep.conformal = std::max(rep.conformal, c.conformal_residual);
      rep.self_adjoint = std::max(rep.self_adjoint, c.self_adjoint_residual);
      rep.normal = std::max(rep.normal, c.normal_residual);
    }
    ++rep.points;
  }
  return rep;
}

}  // namespace rnav

#include "rnav/randers.hpp"

#include <cmath>
#include <sstream>

namespace rnav {

namespace {

// Pointwise navigation data without derivatives.
template <class T>
struct NavPoint {
  Mat<T> h, hinv;
  Vec<T> w_up, w_low;
  T lambda{};
};

template <class T>
NavPoint<T> nav_point(const NavigationSpec& nav, const Vec<T>& x) {
  NavPoint<T> p;
  p.h = nav.space().metric(x);
  p.hinv = inverse(p.h);
  p.w_up = nav.wind()(x);
  p.w_low = p.h * p.w_up;
  p.lambda = 1.0 - dot(p.w_up, p.w_low);
  return p;
}

template <class T>
NavPoint<T> nav_point(const CovariantData<T>& cd) {
  return {cd.h, cd.hinv, cd.w_up, cd.w_low, cd.lambda};
}

template <class T>
T F_nav(const NavPoint<T>& p, const Vec<T>& y) {
  const T h2 = bilinear(p.h, y, y);
  const T w0 = dot(p.w_low, y);
  return (sqrt(p.lambda * h2 + w0 * w0) - w0) / p.lambda;
}

template <class T>
void alpha_beta_of(const NavPoint<T>& p, Mat<T>& a, Vec<T>& b) {
  const int n = p.h.rows();
  a = Mat<T>(n, n);
  b = Vec<T>(n);
  const T l2 = p.lambda * p.lambda;
  for (int i = 0; i < n; ++i) {
    b[i] = -p.w_low[i] / p.lambda;
    for (int j = 0; j < n; ++j) a(i, j) = (p.lambda * p.h(i, j) + p.w_low[i] * p.w_low[j]) / l2;
  }
}

// g_ij = F/alpha (a_ij - alpha_i alpha_j) + F_i F_j, with F = alpha + beta.
template <class T>
Mat<T> g_closed(const NavPoint<T>& p, const Vec<T>& y) {
  const int n = y.size();
  Mat<T> a;
  Vec<T> b;
  alpha_beta_of(p, a, b);
  const Vec<T> ay = a * y;
  const T alpha = sqrt(dot(y, ay));
  const T F = alpha + dot(b, y);
  Mat<T> g(n, n);
  for (int i = 0; i < n; ++i) {
    const T ai = ay[i] / alpha;
    const T Fi = ai + b[i];
    for (int j = 0; j < n; ++j) {
      const T aj = ay[j] / alpha;
      const T Fj = aj + b[j];
      g(i, j) = F / alpha * (a(i, j) - ai * aj) + Fi * Fj;
    }
  }
  return g;
}

template <class T>
Vec<T> F_dy_closed(const NavPoint<T>& p, const Vec<T>& y) {
  Mat<T> a;
  Vec<T> b;
  alpha_beta_of(p, a, b);
  const Vec<T> ay = a * y;
  const T alpha = sqrt(dot(y, ay));
  Vec<T> out(y.size());
  for (int i = 0; i < y.size(); ++i) out[i] = ay[i] / alpha + b[i];
  return out;
}

// G^i = Gbar^i - F s^i_0 - F^2/2 (r^i + s^i) + 1/2 (y^i/F - w^i)(2F r_0 - r_00 - F^2 r)
template <class T>
Vec<T> spray_closed(const CovariantData<T>& cd, const Vec<T>& y) {
  const int n = y.size();
  const T F = F_nav(nav_point(cd), y);
  const Vec<T> gbar = contract(cd.gamma, y, y);
  const Vec<T> s_i0 = cd.s_mixed * y;
  const T r0 = dot(cd.r_vec, y);
  const T r00 = bilinear(cd.r, y, y);
  const T bracket = 2.0 * F * r0 - r00 - F * F * cd.r_scalar;
  Vec<T> G(n);
  for (int i = 0; i < n; ++i) {
    G[i] = 0.5 * gbar[i] - F * s_i0[i] - 0.5 * F * F * (cd.r_up[i] + cd.s_up[i]) +
           0.5 * (y[i] / F - cd.w_up[i]) * bracket;
  }
  return G;
}

template <class T>
Vec<T> spray_at(const NavigationSpec& nav, const Vec<T>& x, const Vec<T>& y) {
  return spray_closed(covariant_data(nav.space(), nav.wind(), x), y);
}

template <class T>
T bh_density_at(const NavPoint<T>& p) {
  const int n = p.h.rows();
  Mat<T> a;
  Vec<T> b;
  alpha_beta_of(p, a, b);
  const T bb = dot(b, inverse(a) * b);
  return rpow(1.0 - bb, 0.5 * (n + 1)) * sqrt(determinant(a));
}

template <class T>
Vec<T> finsler_gradient(const NavPoint<T>& p, const Vec<T>& df) {
  const Vec<T> hdf = p.hinv * df;
  const T hstar = sqrt(dot(df, hdf));
  const T fstar = hstar + dot(p.w_up, df);
  Vec<T> out(df.size());
  for (int i = 0; i < df.size(); ++i) out[i] = fstar * (hdf[i] / hstar + p.w_up[i]);
  return out;
}

// Nested seeds for second derivatives: outer tangent `outer`, inner tangent `inner`.
Vec<D2> seed2(const Vec<double>& x, const Vec<double>& inner, const Vec<double>& outer) {
  Vec<D2> out(x.size());
  for (int i = 0; i < x.size(); ++i) out[i] = D2(D1(x[i], inner[i]), D1(outer[i], 0.0));
  return out;
}

void require_nonzero(const Vec<double>& y, const char* what) {
  if (max_abs(y) == 0.0) throw DomainError(std::string(what) + ": undefined direction (zero vector)");
}

}  // namespace

NavigationSpec::NavigationSpec(SpaceForm space, VectorFieldSpec wind) : space_(space), wind_(std::move(wind)) {
  if (space_.dim() != wind_.dim()) throw InvalidArgument("navigation data: W and h have different dimensions");
}

double NavigationSpec::wind_norm2(const Vec<double>& x) const {
  const Vec<double> w = wind_(x);
  return bilinear(space_.metric(x), w, w);
}

bool NavigationSpec::admissible(const Vec<double>& x) const {
  return space_.in_domain(x) && wind_norm2(x) < 1.0;
}

RandersMetric::RandersMetric(NavigationSpec nav, Tolerances tol) : nav_(std::move(nav)), tol_(tol) {}

void RandersMetric::require_admissible(const Vec<double>& x) const {
  space().require_domain(x);
  const double b2 = nav_.wind_norm2(x);
  if (!(b2 < 1.0)) {
    std::ostringstream os;
    os << "navigation domain violated: |W|_h = " << std::sqrt(b2) << " >= 1";
    throw DomainError(os.str());
  }
}

AlphaBeta RandersMetric::alpha_beta(const Vec<double>& x) const {
  require_admissible(x);
  const NavPoint<double> p = nav_point(nav_, x);
  AlphaBeta ab;
  alpha_beta_of(p, ab.a, ab.b);
  ab.lambda = p.lambda;
  return ab;
}

double RandersMetric::F_alpha_beta(const Vec<double>& x, const Vec<double>& y) const {
  const AlphaBeta ab = alpha_beta(x);
  return std::sqrt(bilinear(ab.a, y, y)) + dot(ab.b, y);
}

double RandersMetric::F(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "F");
  const double nav = F_nav(nav_point(nav_, x), y);
  const double ab = F_alpha_beta(x, y);
  if (std::fabs(nav - ab) > tol_.navigation * std::fabs(nav)) {
    std::ostringstream os;
    os.precision(17);
    os << "F: navigation form " << nav << " disagrees with alpha+beta " << ab;
    throw VerificationError(os.str());
  }
  return nav;
}

Vec<double> RandersMetric::F_dy(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "F_dy");
  return F_dy_closed(nav_point(nav_, x), y);
}

Mat<double> RandersMetric::fundamental_tensor(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "fundamental_tensor");
  return g_closed(nav_point(nav_, x), y);
}

Mat<double> RandersMetric::fundamental_tensor_autodiff(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "fundamental_tensor_autodiff");
  const int n = dim();
  const NavPoint<D2> p = nav_point(nav_, lift<D2>(x));
  Mat<double> g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const Vec<D2> yy = seed2(y, Vec<double>::unit(n, i), Vec<double>::unit(n, j));
      const D2 f = F_nav(p, yy);
      g(i, j) = g(j, i) = (0.5 * f * f).d.d;
    }
  return g;
}

Tensor3<double> RandersMetric::cartan_tensor(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "cartan_tensor");
  const int n = dim();
  const NavPoint<D1> p = nav_point(nav_, lift<D1>(x));
  Tensor3<double> c(n);
  for (int k = 0; k < n; ++k) {
    const Mat<double> dg = tangent(g_closed(p, seed(y, Vec<double>::unit(n, k))));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j, k) = 0.5 * dg(i, j);
  }
  return c;
}

double RandersMetric::dual_norm(const Vec<double>& x, const Vec<double>& xi) const {
  require_admissible(x);
  require_nonzero(xi, "dual_norm");
  const NavPoint<double> p = nav_point(nav_, x);
  return std::sqrt(bilinear(p.hinv, xi, xi)) + dot(p.w_up, xi);
}

Vec<double> RandersMetric::legendre(const Vec<double>& x, const Vec<double>& y) const {
  const double f = F(x, y);
  return f * F_dy(x, y);
}

Vec<double> RandersMetric::inverse_legendre(const Vec<double>& x, const Vec<double>& xi) const {
  const double fstar = dual_norm(x, xi);
  if (!(fstar > 0.0)) throw DomainError("inverse_legendre: covector outside the dual cone (F* <= 0)");
  return finsler_gradient(nav_point(nav_, x), xi);
}

Vec<double> RandersMetric::spray(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "spray");
  return spray_at(nav_, x, y);
}

Vec<double> RandersMetric::spray_from_metric(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "spray_from_metric");
  const int n = dim();
  const Vec<double> zero(n);
  Vec<double> rhs(n);
  for (int l = 0; l < n; ++l) {
    // y^k d_{x^k} d_{y^l} F^2
    const Vec<D2> xx = seed2(x, zero, y);
    const Vec<D2> yy = seed2(y, Vec<double>::unit(n, l), zero);
    const D2 f = F_nav(nav_point(nav_, xx), yy);
    const double mixed = (f * f).d.d;
    // d_{x^l} F^2
    const D1 fl = F_nav(nav_point(nav_, seed(x, Vec<double>::unit(n, l))), lift<D1>(y));
    rhs[l] = mixed - (fl * fl).d;
  }
  const Mat<double> ginv = inverse(fundamental_tensor(x, y));
  return 0.25 * (ginv * rhs);
}

Mat<double> RandersMetric::nonlinear_connection(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "nonlinear_connection");
  const int n = dim();
  const CovariantData<double> cd = covariant_data(space(), wind(), x);
  const NavPoint<double> p = nav_point(cd);
  const double F = F_nav(p, y);
  const Vec<double> Fy = F_dy_closed(p, y);
  const Vec<double> s_i0 = cd.s_mixed * y;
  const double r0 = dot(cd.r_vec, y);
  const double r00 = bilinear(cd.r, y, y);
  const double r = cd.r_scalar;
  const double bracket = 2.0 * F * r0 - r00 - F * F * r;
  const Vec<double> r_j0 = cd.r * y;
  Mat<double> N(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double nbar = 0.0;
      for (int k = 0; k < n; ++k) nbar += cd.gamma(i, j, k) * y[k];
      const double delta = i == j ? 1.0 : 0.0;
      N(i, j) = nbar - Fy[j] * s_i0[i] - F * cd.s_mixed(i, j) - F * Fy[j] * (cd.r_up[i] + cd.s_up[i]) +
                0.5 * (delta / F - y[i] * Fy[j] / (F * F)) * bracket +
                0.5 * (y[i] / F - cd.w_up[i]) *
                    (2.0 * Fy[j] * r0 + 2.0 * F * cd.r_vec[j] - 2.0 * r_j0[j] - 2.0 * F * Fy[j] * r);
    }
  return N;
}

Mat<double> RandersMetric::nonlinear_connection_autodiff(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "nonlinear_connection_autodiff");
  const int n = dim();
  Mat<double> N(n, n);
  const Vec<D1> xx = lift<D1>(x);
  for (int j = 0; j < n; ++j) N.set_col(j, tangent(spray_at(nav_, xx, seed(y, Vec<double>::unit(n, j)))));
  return N;
}

Tensor3<double> RandersMetric::chern_connection(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "chern_connection");
  const int n = dim();
  const Mat<double> g = fundamental_tensor(x, y);
  const Mat<double> ginv = inverse(g);
  const Mat<double> N = nonlinear_connection(x, y);
  std::array<Mat<double>, kMaxDim> dgx, dgy;
  const NavPoint<D1> px = nav_point(nav_, lift<D1>(x));
  for (int k = 0; k < n; ++k) {
    dgx[k] = tangent(g_closed(nav_point(nav_, seed(x, Vec<double>::unit(n, k))), lift<D1>(y)));
    dgy[k] = tangent(g_closed(px, seed(y, Vec<double>::unit(n, k))));
  }
  // delta_j g_lk = d_{x^j} g_lk - N^m_j d_{y^m} g_lk
  auto delta = [&](int j, int l, int k) {
    double s = dgx[j](l, k);
    for (int m = 0; m < n; ++m) s -= N(m, j) * dgy[m](l, k);
    return s;
  };
  Tensor3<double> gamma(n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      Vec<double> low(n);
      for (int l = 0; l < n; ++l) low[l] = 0.5 * (delta(j, l, k) + delta(k, j, l) - delta(l, j, k));
      const Vec<double> up = ginv * low;
      for (int i = 0; i < n; ++i) {
        gamma(i, j, k) = up[i];
        gamma(i, k, j) = up[i];
      }
    }
  return gamma;
}

SprayData RandersMetric::spray_and_connections(const Vec<double>& x, const Vec<double>& y) const {
  SprayData out;
  out.G = spray(x, y);
  out.N = nonlinear_connection(x, y);
  const Mat<double> Nad = nonlinear_connection_autodiff(x, y);
  const double err = max_abs(out.N - Nad);
  const double scale = std::max(1.0, max_abs(Nad));
  if (err > tol_.connection * scale) {
    std::ostringstream os;
    os << "nonlinear connection closed form disagrees with dG/dy by " << err;
    throw VerificationError(os.str());
  }
  out.gamma = chern_connection(x, y);
  return out;
}

Vec<double> RandersMetric::covariant_derivative(const Vec<double>& x, const Vec<double>& w_ref,
                                                const Vec<double>& v, const VectorMap& field) const {
  require_admissible(x);
  if (max_abs(w_ref) == 0.0) throw DomainError("covariant_derivative: zero reference vector");
  const Tensor3<double> gamma = chern_connection(x, w_ref);
  const Vec<double> X = field(x);
  const Vec<double> dX = tangent(field(seed(x, v)));
  return dX + contract(gamma, v, X);
}

double RandersMetric::s_curvature(const Vec<double>& x, const Vec<double>& y) const {
  require_admissible(x);
  require_nonzero(y, "s_curvature");
  const int n = dim();
  const Vec<D1> xx = lift<D1>(x);
  double div = 0.0;
  for (int i = 0; i < n; ++i) div += spray_at(nav_, xx, seed(y, Vec<double>::unit(n, i)))[i].d;
  const D1 sigma = bh_density_at(nav_point(nav_, seed(x, y)));
  return div - sigma.d / sigma.v;
}

double RandersMetric::bh_density(const Vec<double>& x) const {
  require_admissible(x);
  const NavPoint<double> p = nav_point(nav_, x);
  const double sigma = bh_density_at(p);
  const double ref = std::sqrt(determinant(p.h));
  if (std::fabs(sigma - ref) > 1e-10 * ref) {
    std::ostringstream os;
    os.precision(17);
    os << "Busemann-Hausdorff density " << sigma << " differs from sqrt(det h) " << ref;
    throw VerificationError(os.str());
  }
  return sigma;
}

double RandersMetric::flag_curvature(const Vec<double>& x, const Vec<double>& y, const Vec<double>& v) const {
  require_admissible(x);
  require_nonzero(y, "flag_curvature");
  const int n = dim();
  const Mat<double> g = fundamental_tensor(x, y);
  const double yy = bilinear(g, y, y), vv = bilinear(g, v, v), yv = bilinear(g, y, v);
  const double den = yy * vv - yv * yv;
  if (!(den > 1e-12 * yy * vv)) throw DomainError("flag_curvature: degenerate flag (v parallel to y)");

  const Vec<double> zero(n);
  const Vec<double> G = spray_at(nav_, x, y);
  // d_x G [v]
  const Vec<double> gx_v = tangent(spray_at(nav_, seed(x, v), lift<D1>(y)));
  // d_x[y] d_y[v] G
  const Vec<D2> xs = seed2(x, zero, y);
  const Vec<double> gxy = tangent(tangent(spray_at(nav_, xs, seed2(y, v, zero))));
  // d_y[G] d_y[v] G
  const Vec<double> gyy = tangent(tangent(spray_at(nav_, lift<D2>(x), seed2(y, v, G))));
  // d_y G [d_y G [v]]
  const Vec<D1> xl = lift<D1>(x);
  const Vec<double> gy_v = tangent(spray_at(nav_, xl, seed(y, v)));
  const Vec<double> gy_gy_v = tangent(spray_at(nav_, xl, seed(y, gy_v)));

  Vec<double> rv(n);
  for (int i = 0; i < n; ++i) rv[i] = 2.0 * gx_v[i] - gxy[i] + 2.0 * gyy[i] - gy_gy_v[i];
  return bilinear(g, rv, v) / den;
}

Vec<double> RandersMetric::gradient(const ScalarField& f, const Vec<double>& x) const {
  require_admissible(x);
  const NavPoint<double> p = nav_point(nav_, x);
  const Vec<double> df = rnav::gradient(f, x);
  if (std::sqrt(bilinear(p.hinv, df, df)) < tol_.critical_df)
    throw DomainError("finsler gradient: critical point (x not in N_f)");
  return finsler_gradient(p, df);
}

LaplacianForms RandersMetric::laplacian_forms(const ScalarField& f, const Vec<double>& x) const {
  require_admissible(x);
  const int n = dim();
  const Vec<double> V = gradient(f, x);
  Mat<double> J(n, n);  // J(i, j) = d_j V^i
  double div_sigma = 0.0;
  double sigma0 = 0.0;
  for (int j = 0; j < n; ++j) {
    const Vec<D1> xj = seed(x, Vec<double>::unit(n, j));
    const NavPoint<D1> p = nav_point(nav_, xj);
    const Vec<D1> Vj = finsler_gradient(p, rnav::gradient(f, xj));
    const D1 sigma = bh_density_at(p);
    sigma0 = sigma.v;
    div_sigma += (sigma * Vj[j]).d;
    J.set_col(j, tangent(Vj));
  }
  LaplacianForms out;
  out.divergence = div_sigma / sigma0;

  const Tensor3<double> gamma = chern_connection(x, V);
  double tr = 0.0;
  for (int i = 0; i < n; ++i) {
    tr += J(i, i);
    for (int k = 0; k < n; ++k) tr += gamma(i, i, k) * V[k];
  }
  out.trace = tr - s_curvature(x, V);
  return out;
}

double RandersMetric::laplacian(const ScalarField& f, const Vec<double>& x) const {
  const LaplacianForms lf = laplacian_forms(f, x);
  const double scale = std::max(1.0, std::fabs(lf.divergence));
  if (std::fabs(lf.divergence - lf.trace) > tol_.laplacian * scale) {
    std::ostringstream os;
    os.precision(17);
    os << "finsler laplacian: divergence form " << lf.divergence << " disagrees with trace form " << lf.trace;
    throw VerificationError(os.str());
  }
  return lf.divergence;
}

}  // namespace rnav

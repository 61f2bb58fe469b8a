#pragma once

#include <string>

#include "rnav/core.hpp"
#include "rnav/field.hpp"

namespace rnav {

enum class Chart { kCartesian, kPoincareBall, kStereographic };

std::string to_string(Chart c);

// Constant-curvature Riemannian metric h on a conformal chart:
//   curvature 0      -> cartesian, h = |dx|^2
//   curvature c != 0 -> h = 4 |dx|^2 / (1 + c |x|^2)^2
// (Poincare ball for c < 0 on |x|^2 < 1/|c|, stereographic for c > 0).
class SpaceForm {
 public:
  SpaceForm(int dim, double curvature);

  int dim() const { return dim_; }
  double curvature() const { return c_; }
  Chart chart() const { return chart_; }

  bool in_domain(const Vec<double>& x) const;
  void require_domain(const Vec<double>& x) const;

  // Largest Euclidean chart radius inside the domain (infinity when unbounded).
  double chart_radius() const;

  template <class T>
  T conformal_factor(const Vec<T>& x) const {
    if (chart_ == Chart::kCartesian) return T(1.0);
    T den = 1.0 + c_ * dot(x, x);
    return 4.0 / (den * den);
  }

  template <class T>
  Mat<T> metric(const Vec<T>& x) const {
    const T f = conformal_factor(x);
    Mat<T> h(dim_, dim_);
    for (int i = 0; i < dim_; ++i) h(i, i) = f;
    return h;
  }

 private:
  int dim_;
  double c_;
  Chart chart_;
};

// Levi-Civita symbols Gamma^i_jk (upper index first) from autodiff of h.
template <class T>
Tensor3<T> christoffel(const SpaceForm& space, const Vec<T>& x) {
  const int n = space.dim();
  const Mat<T> h = space.metric(x);
  const Mat<T> hinv = inverse(h);
  // dh(k)(i,j) = d_k h_ij
  std::array<Mat<T>, kMaxDim> dh;
  for (int k = 0; k < n; ++k) dh[k] = tangent(space.metric(seed(x, Vec<T>::unit(n, k))));
  Tensor3<T> gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        T s(0.0);
        for (int l = 0; l < n; ++l) s += hinv(i, l) * (dh[j](l, k) + dh[k](l, j) - dh[l](j, k));
        gamma(i, j, k) = 0.5 * s;
        gamma(i, k, j) = gamma(i, j, k);
      }
  return gamma;
}

// Gamma^i_jk u^j v^k
template <class T>
Vec<T> contract(const Tensor3<T>& g, const Vec<T>& u, const Vec<T>& v) {
  const int n = g.dim();
  Vec<T> out(n);
  for (int i = 0; i < n; ++i) {
    T s(0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += g(i, j, k) * u[j] * v[k];
    out[i] = s;
  }
  return out;
}

struct RiemannianDerivatives {
  double value = 0.0;
  Vec<double> df;        // covector
  Vec<double> grad;      // h^{-1} df
  Mat<double> hess;      // covariant Hessian
  double laplacian = 0.0;
  double df_norm = 0.0;  // |df|_h
};

RiemannianDerivatives riem_grad_hess_lap(const SpaceForm& space, const ScalarField& f, const Vec<double>& x);

// Sectional curvature of the plane span(u, v) from the Riemann tensor of h.
double sectional_curvature(const SpaceForm& space, const Vec<double>& x, const Vec<double>& u,
                           const Vec<double>& v);

// Max over k of |h_{ij|k}| (metric compatibility residual).
double metric_compatibility_residual(const SpaceForm& space, const Vec<double>& x);

// Stereographic chart of the round sphere of radius 1/sqrt(c) in R^{n+1},
// projecting from the pole (0, ..., 0, 1/sqrt(c)).
template <class T>
Vec<T> inverse_stereographic(const Vec<T>& x, double c) {
  const int n = x.size();
  const double sc = std::sqrt(c);
  T r2 = c * dot(x, x);
  T den = r2 + 1.0;
  Vec<T> out(n + 1);
  for (int i = 0; i < n; ++i) out[i] = 2.0 * x[i] / den;
  out[n] = (r2 - 1.0) / (sc * den);
  return out;
}

template <class T>
Vec<T> stereographic(const Vec<T>& p, double c) {
  const int n = p.size() - 1;
  const double sc = std::sqrt(c);
  T den = 1.0 - sc * p[n];
  Vec<T> out(n);
  for (int i = 0; i < n; ++i) out[i] = p[i] / den;
  return out;
}

// Chart components of an ambient tangent vector v at the sphere point p.
template <class T>
Vec<T> stereographic_push(const Vec<T>& p, const Vec<T>& v, double c) {
  const int n = p.size() - 1;
  const double sc = std::sqrt(c);
  T den = 1.0 - sc * p[n];
  Vec<T> out(n);
  for (int i = 0; i < n; ++i) out[i] = v[i] / den + sc * p[i] * v[n] / (den * den);
  return out;
}

}  // namespace rnav

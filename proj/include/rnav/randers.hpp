#pragma once

#include "rnav/tolerances.hpp"
#include "rnav/vector_field.hpp"

namespace rnav {

// Zermelo navigation data (h, W) on a space-form chart.
class NavigationSpec {
 public:
  NavigationSpec(SpaceForm space, VectorFieldSpec wind);

  const SpaceForm& space() const { return space_; }
  const VectorFieldSpec& wind() const { return wind_; }
  int dim() const { return space_.dim(); }

  // |W|_h^2 at x.
  double wind_norm2(const Vec<double>& x) const;
  // True when x is in the chart and |W|_h < 1.
  bool admissible(const Vec<double>& x) const;

 private:
  SpaceForm space_;
  VectorFieldSpec wind_;
};

// alpha = sqrt(a_ij y^i y^j), beta = b_i y^i.
struct AlphaBeta {
  Mat<double> a;
  Vec<double> b;
  double lambda = 1.0;
};

struct SprayData {
  Vec<double> G;         // geodesic coefficients G^i
  Mat<double> N;         // N^i_j = dG^i/dy^j (closed form)
  Tensor3<double> gamma; // Chern coefficients Gamma^i_jk, symmetric in j,k
};

struct LaplacianForms {
  double divergence = 0.0;  // (1/sigma) d_i (sigma grad f^i)
  double trace = 0.0;       // tr(D^{grad f} grad f) - S(grad f)
};

// The forward Randers metric F = alpha + beta solving the navigation problem
// h(y - F W, y - F W) = F^2. Every method validates x (chart domain, |W|_h < 1)
// and throws DomainError otherwise.
class RandersMetric {
 public:
  explicit RandersMetric(NavigationSpec nav, Tolerances tol = {});

  const NavigationSpec& nav() const { return nav_; }
  const SpaceForm& space() const { return nav_.space(); }
  const VectorFieldSpec& wind() const { return nav_.wind(); }
  const Tolerances& tolerances() const { return tol_; }
  int dim() const { return nav_.dim(); }

  AlphaBeta alpha_beta(const Vec<double>& x) const;

  // Navigation form; checked against alpha + beta.
  double F(const Vec<double>& x, const Vec<double>& y) const;
  double F_alpha_beta(const Vec<double>& x, const Vec<double>& y) const;
  Vec<double> F_dy(const Vec<double>& x, const Vec<double>& y) const;

  // Closed form g_ij = F/alpha (a_ij - alpha_i alpha_j) + F_i F_j.
  Mat<double> fundamental_tensor(const Vec<double>& x, const Vec<double>& y) const;
  // Oracle: Hessian of F^2/2 in y by nested autodiff of the navigation form.
  Mat<double> fundamental_tensor_autodiff(const Vec<double>& x, const Vec<double>& y) const;
  // C_ijk = 1/2 dg_ij/dy^k.
  Tensor3<double> cartan_tensor(const Vec<double>& x, const Vec<double>& y) const;

  // F*(xi) = |xi|_{h*} + W(xi).
  double dual_norm(const Vec<double>& x, const Vec<double>& xi) const;
  Vec<double> legendre(const Vec<double>& x, const Vec<double>& y) const;
  Vec<double> inverse_legendre(const Vec<double>& x, const Vec<double>& xi) const;

  // Geodesic coefficients from the covariant data of W.
  Vec<double> spray(const Vec<double>& x, const Vec<double>& y) const;
  // Oracle: G^i = 1/4 g^il ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}).
  Vec<double> spray_from_metric(const Vec<double>& x, const Vec<double>& y) const;
  Mat<double> nonlinear_connection(const Vec<double>& x, const Vec<double>& y) const;
  Mat<double> nonlinear_connection_autodiff(const Vec<double>& x, const Vec<double>& y) const;
  Tensor3<double> chern_connection(const Vec<double>& x, const Vec<double>& y) const;
  // G, N (closed form, cross-checked against autodiff) and Chern symbols.
  SprayData spray_and_connections(const Vec<double>& x, const Vec<double>& y) const;

  // D^w_v X = v^j dX^i/dx^j + Gamma^i_jk(w) v^j X^k.
  Vec<double> covariant_derivative(const Vec<double>& x, const Vec<double>& w_ref, const Vec<double>& v,
                                   const VectorMap& field) const;

  double s_curvature(const Vec<double>& x, const Vec<double>& y) const;
  // Busemann-Hausdorff density (1 - |b|_a^2)^((n+1)/2) sqrt(det a), checked
  // against sqrt(det h).
  double bh_density(const Vec<double>& x) const;
  double flag_curvature(const Vec<double>& x, const Vec<double>& y, const Vec<double>& v) const;

  Vec<double> gradient(const ScalarField& f, const Vec<double>& x) const;
  // Divergence form, cross-checked against the trace form.
  double laplacian(const ScalarField& f, const Vec<double>& x) const;
  LaplacianForms laplacian_forms(const ScalarField& f, const Vec<double>& x) const;

  void require_admissible(const Vec<double>& x) const;

 private:
  NavigationSpec nav_;
  Tolerances tol_;
};

}  // namespace rnav

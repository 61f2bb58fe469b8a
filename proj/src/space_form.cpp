#include "rnav/space_form.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rnav {

std::string to_string(Chart c) {
  switch (c) {
    case Chart::kCartesian: return "cartesian";
    case Chart::kPoincareBall: return "poincare_ball";
    case Chart::kStereographic: return "stereographic";
  }
  return "?";
}

SpaceForm::SpaceForm(int dim, double curvature) : dim_(dim), c_(curvature) {
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("space form dimension must be in [1, 6]");
  if (!std::isfinite(curvature)) throw InvalidArgument("space form curvature must be finite");
  chart_ = curvature == 0.0 ? Chart::kCartesian : (curvature < 0.0 ? Chart::kPoincareBall : Chart::kStereographic);
}

double SpaceForm::chart_radius() const {
  if (chart_ == Chart::kPoincareBall) return 1.0 / std::sqrt(-c_);
  return std::numeric_limits<double>::infinity();
}

bool SpaceForm::in_domain(const Vec<double>& x) const {
  if (x.size() != dim_) return false;
  for (double v : x)
    if (!std::isfinite(v)) return false;
  if (chart_ == Chart::kPoincareBall) return 1.0 + c_ * dot(x, x) > 0.0;
  return true;
}

void SpaceForm::require_domain(const Vec<double>& x) const {
  if (x.size() != dim_) throw InvalidArgument("point dimension does not match the space form");
  if (!in_domain(x)) {
    std::ostringstream os;
    os << "point outside the " << to_string(chart_) << " chart domain (|x| = " << norm(x) << ")";
    throw DomainError(os.str());
  }
}

RiemannianDerivatives riem_grad_hess_lap(const SpaceForm& space, const ScalarField& f, const Vec<double>& x) {
  space.require_domain(x);
  const int n = space.dim();
  const Jet2 jet = eval_jet2(f, x);
  const Mat<double> h = space.metric(x);
  const Mat<double> hinv = inverse(h);
  const Tensor3<double> gamma = christoffel(space, x);

  RiemannianDerivatives out;
  out.value = jet.value;
  out.df = jet.grad;
  out.grad = hinv * jet.grad;
  out.df_norm = std::sqrt(std::max(0.0, dot(jet.grad, out.grad)));
  out.hess = Mat<double>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = jet.hess(i, j);
      for (int k = 0; k < n; ++k) s -= gamma(k, i, j) * jet.grad[k];
      out.hess(i, j) = s;
    }
  double lap = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lap += hinv(i, j) * out.hess(i, j);
  out.laplacian = lap;
  return out;
}

double sectional_curvature(const SpaceForm& space, const Vec<double>& x, const Vec<double>& u,
                           const Vec<double>& v) {
  space.require_domain(x);
  const int n = space.dim();
  const Tensor3<double> g = christoffel(space, x);
  std::array<Tensor3<double>, kMaxDim> dg;  // dg[k](i,j,l) = d_k Gamma^i_jl
  for (int k = 0; k < n; ++k) {
    const Tensor3<D1> gk = christoffel(space, seed(x, Vec<double>::unit(n, k)));
    dg[k] = Tensor3<double>(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) dg[k](i, j, l) = gk(i, j, l).d;
  }
  // R^i_jkl = d_k G^i_lj - d_l G^i_kj + G^i_km G^m_lj - G^i_lm G^m_kj ; R(u,v)v = R^i_jkl v^j u^k v^l
  Vec<double> rv(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double r = dg[k](i, l, j) - dg[l](i, k, j);
          for (int m = 0; m < n; ++m) r += g(i, k, m) * g(m, l, j) - g(i, l, m) * g(m, k, j);
          s += r * v[j] * u[k] * v[l];
        }
    rv[i] = s;
  }
  const Mat<double> h = space.metric(x);
  const double uu = bilinear(h, u, u), vv = bilinear(h, v, v), uv = bilinear(h, u, v);
  const double den = uu * vv - uv * uv;
  if (!(den > 1e-14 * uu * vv)) throw DomainError("sectional_curvature: degenerate plane");
  return bilinear(h, u, rv) / den;
}

double metric_compatibility_residual(const SpaceForm& space, const Vec<double>& x) {
  space.require_domain(x);
  const int n = space.dim();
  const Mat<double> h = space.metric(x);
  const Tensor3<double> g = christoffel(space, x);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const Mat<double> dh = tangent(space.metric(seed(x, Vec<double>::unit(n, k))));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double r = dh(i, j);
        for (int m = 0; m < n; ++m) r -= g(m, k, i) * h(m, j) + g(m, k, j) * h(i, m);
        worst = std::max(worst, std::fabs(r));
      }
  }
  return worst;
}

}  // namespace rnav

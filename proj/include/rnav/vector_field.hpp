#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rnav/random.hpp"
#include "rnav/space_form.hpp"

namespace rnav {

enum class FieldKind { kAffine, kProjective, kCustom };

std::string to_string(FieldKind k);

// Builds the antisymmetric matrix whose strict upper triangle is given
// row by row (n(n-1)/2 entries).
Mat<double> antisymmetric_from_upper(int n, const std::vector<double>& upper);

// A vector field W on a chart, written with the row-vector convention
// (xQ)_j = sum_i x_i Q_ij.
//   affine:     W = -2 k0 x + xQ + e
//   projective: W = xQ + e + c <e, x> x
//   custom:     arbitrary chart components
class VectorFieldSpec {
 public:
  static VectorFieldSpec affine(int dim, double k0, const Mat<double>& q, const Vec<double>& e);
  static VectorFieldSpec projective(int dim, double curvature, const Mat<double>& q, const Vec<double>& e);
  static VectorFieldSpec custom(VectorMap components, std::string description);
  static VectorFieldSpec zero(int dim);
  static VectorFieldSpec constant(const Vec<double>& e);

  // Chart pushforward of the rotation field X -> XQ restricted to the round
  // sphere of curvature c (Q is (dim+1)x(dim+1) antisymmetric).
  static VectorFieldSpec sphere_rotation(int dim, double curvature, const Mat<double>& q_ambient);

  FieldKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double k0() const { return k0_; }
  double curvature() const { return c_; }
  const Mat<double>& q() const { return q_; }
  const Vec<double>& e() const { return e_; }
  const std::optional<Mat<double>>& ambient_rotation() const { return ambient_q_; }
  const std::string& description() const { return description_; }

  template <class T>
  Vec<T> operator()(const Vec<T>& x) const {
    if (x.size() != dim_) throw InvalidArgument("vector field dimension mismatch");
    if (kind_ == FieldKind::kCustom) return custom_(x);
    Vec<T> w(dim_);
    for (int j = 0; j < dim_; ++j) {
      T s(e_[j]);
      for (int i = 0; i < dim_; ++i) s += x[i] * q_(i, j);
      w[j] = s;
    }
    if (kind_ == FieldKind::kAffine) {
      for (int j = 0; j < dim_; ++j) w[j] += (-2.0 * k0_) * x[j];
    } else {
      T ex(0.0);
      for (int i = 0; i < dim_; ++i) ex += e_[i] * x[i];
      for (int j = 0; j < dim_; ++j) w[j] += c_ * ex * x[j];
    }
    return w;
  }

 private:
  VectorFieldSpec() = default;

  FieldKind kind_ = FieldKind::kAffine;
  int dim_ = 0;
  double k0_ = 0.0;
  double c_ = 0.0;
  Mat<double> q_;
  Vec<double> e_;
  VectorMap custom_;
  std::optional<Mat<double>> ambient_q_;
  std::string description_;
};

// Pointwise Riemannian data of (h, W): metric, Christoffel symbols and the
// covariant derivative of W split into symmetric and antisymmetric parts.
// All indices are lowered/raised with h.
template <class T>
struct CovariantData {
  Mat<T> h, hinv;
  Tensor3<T> gamma;  // Gamma^i_jk of h
  Vec<T> w_up, w_low;
  T b2{}, lambda{};  // |W|_h^2 and 1 - |W|_h^2
  Mat<T> w_cov;      // w_{i|j}
  Mat<T> r, s;       // r_ij, s_ij
  Vec<T> r_vec, s_vec;  // r_j = w^i r_ij, s_j = w^i s_ij
  T r_scalar{};         // r = r_j w^j
  Vec<T> r_up, s_up;    // r^i, s^i
  Mat<T> s_mixed;       // s^i_j = h^ik s_kj
};

template <class T>
CovariantData<T> covariant_data(const SpaceForm& space, const VectorFieldSpec& field, const Vec<T>& x) {
  const int n = space.dim();
  CovariantData<T> cd;
  cd.h = space.metric(x);
  cd.hinv = inverse(cd.h);
  cd.w_up = field(x);
  cd.w_low = cd.h * cd.w_up;
  cd.b2 = dot(cd.w_up, cd.w_low);
  cd.lambda = 1.0 - cd.b2;

  std::array<Mat<T>, kMaxDim> dh;
  Mat<T> dw(n, n);  // dw(i, k) = d_k w_i
  for (int k = 0; k < n; ++k) {
    const Vec<Dual<T>> xk = seed(x, Vec<T>::unit(n, k));
    const Mat<Dual<T>> hk = space.metric(xk);
    const Vec<Dual<T>> wk = hk * field(xk);
    dh[k] = tangent(hk);
    for (int i = 0; i < n; ++i) dw(i, k) = wk[i].d;
  }
  cd.gamma = Tensor3<T>(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        T s(0.0);
        for (int l = 0; l < n; ++l) s += cd.hinv(i, l) * (dh[j](l, k) + dh[k](l, j) - dh[l](j, k));
        cd.gamma(i, j, k) = 0.5 * s;
        cd.gamma(i, k, j) = cd.gamma(i, j, k);
      }

  cd.w_cov = Mat<T>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      T s = dw(i, j);
      for (int k = 0; k < n; ++k) s -= cd.gamma(k, i, j) * cd.w_low[k];
      cd.w_cov(i, j) = s;
    }
  cd.r = Mat<T>(n, n);
  cd.s = Mat<T>(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      cd.r(i, j) = 0.5 * (cd.w_cov(i, j) + cd.w_cov(j, i));
      cd.s(i, j) = 0.5 * (cd.w_cov(i, j) - cd.w_cov(j, i));
    }
  cd.r_vec = Vec<T>(n);
  cd.s_vec = Vec<T>(n);
  for (int j = 0; j < n; ++j) {
    T a(0.0), b(0.0);
    for (int i = 0; i < n; ++i) {
      a += cd.w_up[i] * cd.r(i, j);
      b += cd.w_up[i] * cd.s(i, j);
    }
    cd.r_vec[j] = a;
    cd.s_vec[j] = b;
  }
  cd.r_scalar = dot(cd.r_vec, cd.w_up);
  cd.r_up = cd.hinv * cd.r_vec;
  cd.s_up = cd.hinv * cd.s_vec;
  cd.s_mixed = cd.hinv * cd.s;
  return cd;
}

enum class FieldClassKind { kKilling, kHomothetic, kNeither };

std::string to_string(FieldClassKind k);

struct FieldClass {
  FieldClassKind kind = FieldClassKind::kNeither;
  double k0 = 0.0;        // least-squares dilation: r_ij ~ -2 k0 h_ij
  double residual = 0.0;  // max |r_ij + 2 k0 h_ij| over the samples
  int samples = 0;
};

// Random chart points in a ball (clipped to the chart) where |W|_h < 1.
std::vector<Vec<double>> sample_navigation_points(const SpaceForm& space, const VectorFieldSpec& field, int count,
                                                  double radius, Rng& rng, double max_wind = 0.98);

FieldClass classify_field(const SpaceForm& space, const VectorFieldSpec& field, const std::vector<Vec<double>>& points,
                          double tol = 1e-8);

// Samples at least 64 points of the ball of the given radius and classifies.
FieldClass classify_field(const SpaceForm& space, const VectorFieldSpec& field, double radius, std::uint64_t seed,
                          int samples = 64, double tol = 1e-8);

}  // namespace rnav

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rnav/randers.hpp"

namespace rnav {

// A parametrized hypersurface phi: U subset R^(n-1) -> chart of N^n.
class Immersion {
 public:
  struct Range {
    double lo, hi;
  };

  // `outward` gives a chart vector at phi(u) used only to orient the normal
  // (the chosen h-normal has positive Euclidean pairing with it).
  Immersion(VectorMap map, VectorMap outward, std::vector<Range> ranges, std::string catalog_id);

  int param_dim() const { return map_.in_dim(); }
  int dim() const { return map_.out_dim(); }
  const std::string& catalog_id() const { return id_; }
  const std::vector<Range>& ranges() const { return ranges_; }

  template <class T>
  Vec<T> operator()(const Vec<T>& u) const {
    return map_(u);
  }
  // n x m matrix with columns phi_a = d phi / d u^a.
  Mat<double> differential(const Vec<double>& u) const { return jacobian(map_, u); }
  Vec<double> outward(const Vec<double>& u) const { return outward_(u); }
  const VectorMap& map() const { return map_; }

  // Uniform draw from the parameter box.
  Vec<double> sample(Rng& rng) const;

 private:
  VectorMap map_;
  VectorMap outward_;
  std::vector<Range> ranges_;
  std::string id_;
};

struct CatalogParams {
  double radius = 1.0;  // sphere / cylinder radius, or r of the torus
  int m = 1;            // sphere factor dimension for cylinder and torus
  double offset = 0.0;  // hyperplane x^1 = offset
};

// Catalog entries: "hyperplane", "hypersphere", "cylinder", "clifford_torus".
// Spheres and the torus use hyperspherical angles. The torus lives on the
// round sphere of the c > 0 chart and is composed with the stereographic map.
Immersion catalog(const std::string& id, const CatalogParams& params, const SpaceForm& space);
std::vector<std::string> catalog_names();

struct NormalPair {
  Vec<double> x;          // phi(u)
  Mat<double> dphi;       // n x m
  Vec<double> n_h;        // h-unit normal
  Vec<double> n_F;        // F-unit normal, n_h + W
  double F_value = 0.0;   // F(n_F)
  double legendre_residual = 0.0;  // max_a |L(n_F)(phi_a)|
  double relation_residual = 0.0;  // |L^{-1}(nu)/F*(nu) - (n_h + W)|
};

// orientation = +1 picks the outward h-normal, -1 the opposite one.
NormalPair unit_normals(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, int orientation = 1);

struct InducedMetric {
  Mat<double> g_hat;  // g_ij(n_F) phi^i_a phi^j_b
  Mat<double> h_bar;  // h_ij phi^i_a phi^j_b
  double factor = 1.0;      // 1 / (1 + <n_h, W>_h)
  double residual = 0.0;    // max |g_hat - factor h_bar|
};

InducedMetric induced_metric(const NormalPair& np, const RandersMetric& metric);

struct ShapeOperator {
  Mat<double> matrix;     // A^b_a in the basis d/du^a (column a = A(d/du^a))
  Mat<double> form;       // symmetrized -g(D_a n, phi_b)
  Mat<double> metric;     // g_hat (Finsler) or h_bar (Riemannian)
  double self_adjoint_residual = 0.0;
  GeneralizedEigen eig;
};

// A_n X = -(D^n_X n)^T in g_n, with D^n_X n = d_X n + N(n) dphi X.
ShapeOperator shape_operator(const Immersion& M, const RandersMetric& metric, const Vec<double>& u,
                             int orientation = 1, double cluster_tol = 1e-7);
// Levi-Civita shape operator of h with the h-unit normal.
ShapeOperator riemannian_shape_operator(const Immersion& M, const SpaceForm& space, const Vec<double>& u,
                                        int orientation = 1, double cluster_tol = 1e-7);

// max_a |D^n_a n - (nabla^h_a n_h - k0 phi_a)|
double normal_derivative_residual(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, double k0,
                                  int orientation = 1);

struct CurvatureReport {
  std::vector<double> principal_F;  // ascending
  std::vector<double> principal_h;  // ascending
  double mean_F = 0.0;
  std::vector<int> multiplicities_F, multiplicities_h;
  double k0 = 0.0;
  double shift_residual = 0.0;      // max_a |lambda_a - lambda_bar_a - k0|
  double principal_angle = 0.0;     // max sine over matched eigenspaces
  double self_adjoint_residual = 0.0;
  double normal_derivative_residual = 0.0;
  double conformal_residual = 0.0;
  double conformal_factor = 1.0;
  double normal_residual = 0.0;     // max of F(n)-1, Legendre and relation residuals
};

// Throws HypothesisError unless W is Killing or homothetic.
FieldClass require_isotropic_s(const RandersMetric& metric, double radius, std::uint64_t seed, double tol = 1e-8);

CurvatureReport verify_shift(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, double k0,
                             int orientation = 1, double cluster_tol = 1e-7);

}  // namespace rnav

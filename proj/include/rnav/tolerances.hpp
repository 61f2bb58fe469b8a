#pragma once

namespace rnav {

// Single source for every numerical threshold used by the checkers.
struct Tolerances {
  double gradient = 1e-6;        // autodiff vs finite differences
  double identity = 1e-8;        // algebraic identities (default)
  double eigen_residual = 1e-10; // relative ||Av - lambda Bv|| / ||A||
  double eigen_cluster = 1e-7;   // eigenvalues closer than this share a class
  double positive_definite = 1e-12;

  double navigation = 1e-12;     // F_nav vs alpha+beta, relative
  double determinant = 1e-10;    // det(a) lambda^(n+1) / det(h) - 1
  double volume = 1e-10;         // sigma_BH vs sqrt(det h)
  double dual_norm = 1e-10;      // F(grad f) vs F*(df)
  double metric_tensor = 1e-9;   // closed-form g vs autodiff Hessian
  double connection = 1e-8;      // N closed form vs dG/dy
  double legendre = 1e-10;
  double laplacian = 1e-6;       // divergence form vs trace form
  double normal = 1e-9;
  double conformal = 1e-8;       // induced metric vs h_bar / (1 + <n_h, W>)
  double s_curvature = 1e-6;     // |S - (n+1) k0 F|
  double flag_spread = 1e-3;
  double flag_mean = 1e-4;
  double shift = 1e-6;           // principal-curvature shift, pointwise lemma
  double principal_angle = 1e-4;

  double level_abs = 1e-6;       // per-level spread < abs + rel * |mean|
  double level_rel = 1e-6;
  double profile_first = 1e-6;    // a~ = a + phi at level means
  double profile_identity = 1e-4; // b~ reconstruction
  double level_membership = 1e-9;
  double critical_df = 1e-8;
  double irregular_fraction = 0.1;
  double homogeneity = 1e-9;
};

}  // namespace rnav

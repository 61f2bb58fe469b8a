#pragma once

#include <cstdint>

#include "rnav/hypersurface.hpp"
#include "rnav/isoparametric.hpp"

namespace rnav {

// Seeded sweeps of the pointwise identities; every field is a max residual
// over the sweep unless noted.
struct MetricSuiteOptions {
  int samples = 200;
  int flag_samples = 50;
  std::uint64_t seed = 1;
  double radius = 1.0;
  const ScalarField* field = nullptr;  // optional chart function for gradient/Laplacian checks
  bool curvature = true;               // S- and flag curvature when W is homothetic or Killing
};

struct MetricSuiteReport {
  int samples = 0;
  double navigation_vs_alpha_beta = 0.0;  // relative, against the quadratic navigation equation
  double alpha_determinant = 0.0;         // |det(a) lambda^(n+1) / det(h) - 1|
  double bh_density = 0.0;                // relative |sigma_BH - sqrt(det h)|
  double fundamental_tensor = 0.0;        // closed form vs autodiff Hessian (relative)
  double nonlinear_connection = 0.0;      // closed form vs dG/dy (relative)
  double spray = 0.0;                     // closed form vs metric oracle (relative)
  double chern_contraction = 0.0;         // |Gamma(y) y - N| (relative)
  double legendre_roundtrip = 0.0;        // both directions, relative
  double sectional_curvature = 0.0;       // |K_h - c|
  double metric_compatibility = 0.0;

  bool has_field = false;
  int field_points = 0;
  double gradient_dual = 0.0;     // |F(grad f) - F*(df)|
  double laplacian_forms = 0.0;   // |divergence - trace| / max(1, |divergence|)
  double finite_difference = 0.0;  // autodiff vs central differences of f

  FieldClass field_class;
  bool curvature_checked = false;
  double s_curvature = 0.0;       // |S - (n+1) k0 F|
  double flag_expected = 0.0;     // c - k0^2
  double flag_mean = 0.0;
  double flag_spread = 0.0;
};

MetricSuiteReport run_metric_suite(const RandersMetric& metric, const MetricSuiteOptions& opt);

struct ShiftSuiteReport {
  int points = 0;  // parameter points (each in both orientations)
  double k0 = 0.0;
  double shift = 0.0;
  double principal_angle = 0.0;
  double normal_derivative = 0.0;
  double conformal = 0.0;
  double self_adjoint = 0.0;
  double normal = 0.0;
  CurvatureReport first;  // report at the first sampled point, outward orientation
};

// Samples parameter points whose image is admissible and runs verify_shift in
// both orientations.
ShiftSuiteReport run_shift_suite(const Immersion& M, const RandersMetric& metric, double k0, int points,
                                 std::uint64_t seed);

}  // namespace rnav

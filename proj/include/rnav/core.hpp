#pragma once

#include <vector>

#include "rnav/field.hpp"
#include "rnav/linalg.hpp"

namespace rnav {

// Value, gradient and (symmetric) Hessian of a scalar field at a point.
struct Jet2 {
  double value = 0.0;
  Vec<double> grad;
  Mat<double> hess;
};

// Nested forward mode; the Hessian is filled on i <= j and mirrored.
Jet2 eval_jet2(const ScalarField& f, const Vec<double>& x);

struct FdReport {
  double grad_error = 0.0;  // max |autodiff - central difference|
  double hess_error = 0.0;
  double max_error() const { return grad_error > hess_error ? grad_error : hess_error; }
};

// Central-difference gradient with step h_step; Hessian from Richardson
// extrapolated second differences with step sqrt(h_step).
FdReport fd_check(const ScalarField& f, const Vec<double>& x, double h_step);

struct EigenClass {
  double value = 0.0;
  std::vector<int> members;  // indices into GeneralizedEigen::values
};

struct GeneralizedEigen {
  std::vector<double> values;  // ascending
  Mat<double> vectors;         // columns, B-orthonormal
  std::vector<EigenClass> classes;
  double max_residual = 0.0;   // max ||A v - lambda B v||
};

// Solves A v = lambda B v for symmetric A and symmetric positive-definite B.
// Eigenvalues closer than cluster_tol are grouped into one multiplicity class.
GeneralizedEigen solve_sym_geig(const Mat<double>& a, const Mat<double>& b, double cluster_tol = 1e-7,
                                double pd_tol = 1e-12);

// Sine of the largest principal angle between the column spans of u and v
// (Euclidean inner product on coefficient space).
double subspace_sine(const Mat<double>& u, const Mat<double>& v);

// Symmetric eigenvalues, ascending.
std::vector<double> sym_eigenvalues(const Mat<double>& a);

}  // namespace rnav

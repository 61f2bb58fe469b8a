#include "rnav/core.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace rnav {

namespace {

Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

Mat<double> from_eigen(const Eigen::MatrixXd& e) {
  Mat<double> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = e(i, j);
  return m;
}

}  // namespace

Jet2 eval_jet2(const ScalarField& f, const Vec<double>& x) {
  const int n = x.size();
  Jet2 jet;
  jet.grad = Vec<double>(n);
  jet.hess = Mat<double>(n, n);
  if (n == 0) {
    jet.value = f(x);
    return jet;
  }
  for (int i = 0; i < n; ++i) {
    Vec<D1> xi = seed(x, Vec<double>::unit(n, i));
    for (int j = i; j < n; ++j) {
      Vec<D2> xij = seed(xi, lift<D1>(Vec<double>::unit(n, j)));
      D2 r = f(xij);
      if (i == 0 && j == 0) jet.value = r.v.v;
      if (i == 0) jet.grad[j] = r.d.v;
      jet.hess(i, j) = r.d.d;
      jet.hess(j, i) = r.d.d;
    }
  }
  return jet;
}

FdReport fd_check(const ScalarField& f, const Vec<double>& x, double h_step) {
  if (!(h_step > 0.0)) throw InvalidArgument("fd_check step must be positive");
  const int n = x.size();
  const Jet2 jet = eval_jet2(f, x);
  FdReport rep;

  auto at = [&](int i, double di, int j, double dj) {
    Vec<double> p = x;
    if (i >= 0) p[i] += di;
    if (j >= 0) p[j] += dj;
    return f(p);
  };

  for (int i = 0; i < n; ++i) {
    const double g = (at(i, h_step, -1, 0) - at(i, -h_step, -1, 0)) / (2.0 * h_step);
    rep.grad_error = std::max(rep.grad_error, std::fabs(g - jet.grad[i]));
  }

  const double big = std::sqrt(h_step);
  const double f0 = f(x);
  auto second = [&](int i, int j, double s) {
    if (i == j) return (at(i, s, -1, 0) - 2.0 * f0 + at(i, -s, -1, 0)) / (s * s);
    return (at(i, s, j, s) - at(i, s, j, -s) - at(i, -s, j, s) + at(i, -s, j, -s)) / (4.0 * s * s);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double coarse = second(i, j, big);
      const double fine = second(i, j, 0.5 * big);
      const double rich = (4.0 * fine - coarse) / 3.0;
      rep.hess_error = std::max(rep.hess_error, std::fabs(rich - jet.hess(i, j)));
    }
  return rep;
}

std::vector<double> sym_eigenvalues(const Mat<double>& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(a), Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

GeneralizedEigen solve_sym_geig(const Mat<double>& a, const Mat<double>& b, double cluster_tol, double pd_tol) {
  const int n = a.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != n) throw InvalidArgument("solve_sym_geig: shape mismatch");

  const auto bvals = sym_eigenvalues(b);
  for (double v : bvals) {
    if (!(v > pd_tol)) {
      std::ostringstream os;
      os << "solve_sym_geig: B is not positive definite (eigenvalue " << v << ")";
      throw DomainError(os.str());
    }
  }

  const Eigen::MatrixXd ea = to_eigen(a);
  const Eigen::MatrixXd eb = to_eigen(b);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ea, eb, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (es.info() != Eigen::Success) throw NumericalError("solve_sym_geig: decomposition failed");

  GeneralizedEigen out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  out.vectors = from_eigen(es.eigenvectors());
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd v = es.eigenvectors().col(k);
    const double r = (ea * v - out.values[k] * (eb * v)).norm();
    out.max_residual = std::max(out.max_residual, r);
  }
  for (int k = 0; k < n; ++k) {
    if (!out.classes.empty() && std::fabs(out.values[k] - out.classes.back().value) < cluster_tol) {
      auto& cls = out.classes.back();
      cls.members.push_back(k);
      double s = 0.0;
      for (int m : cls.members) s += out.values[m];
      cls.value = s / static_cast<double>(cls.members.size());
    } else {
      out.classes.push_back({out.values[k], {k}});
    }
  }
  return out;
}

double subspace_sine(const Mat<double>& u, const Mat<double>& v) {
  if (u.rows() != v.rows()) throw InvalidArgument("subspace_sine: row mismatch");
  const Eigen::MatrixXd qu = Eigen::HouseholderQR<Eigen::MatrixXd>(to_eigen(u)).householderQ() *
                             Eigen::MatrixXd::Identity(u.rows(), u.cols());
  const Eigen::MatrixXd qv = Eigen::HouseholderQR<Eigen::MatrixXd>(to_eigen(v)).householderQ() *
                             Eigen::MatrixXd::Identity(v.rows(), v.cols());
  // Component of span(v) outside span(u); its spectral norm is sin(theta_max).
  const Eigen::MatrixXd resid = qv - qu * (qu.transpose() * qv);
  if (resid.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

}  // namespace rnav

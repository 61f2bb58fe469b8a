#include "rnav/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace rnav {

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperspherical coordinates: S^m from m angles starting at u[off].
template <class T>
Vec<T> sphere_point(const Vec<T>& u, int off, int m) {
  Vec<T> p(m + 1);
  T prod(1.0);
  for (int k = 0; k < m; ++k) {
    p[k] = prod * cos(u[off + k]);
    prod = prod * sin(u[off + k]);
  }
  p[m] = prod;
  return p;
}

void sphere_ranges(std::vector<Immersion::Range>& r, int m) {
  for (int k = 0; k + 1 < m; ++k) r.push_back({0.35, kPi - 0.35});
  r.push_back({0.0, 2.0 * kPi});
}

// Cofactor normal covector of the columns of J (n x (n-1)).
template <class T>
Vec<T> cofactor_normal(const Mat<T>& J) {
  const int n = J.rows();
  const int m = J.cols();
  Vec<T> nu(n);
  for (int i = 0; i < n; ++i) {
    Mat<T> minor(m, m);
    for (int r = 0, rr = 0; r < n; ++r) {
      if (r == i) continue;
      for (int c = 0; c < m; ++c) minor(rr, c) = J(r, c);
      ++rr;
    }
    const T d = m == 0 ? T(1.0) : determinant(minor);
    nu[i] = (i % 2 == 0) ? d : -d;
  }
  return nu;
}

template <class T>
struct Frame {
  Vec<T> x;
  Mat<T> J;
  Vec<T> nu;    // oriented normal covector
  Vec<T> nbar;  // h-unit normal
};

template <class T>
Frame<T> frame(const Immersion& M, const SpaceForm& space, const Vec<T>& u, int orientation) {
  Frame<T> f;
  f.x = M(u);
  f.J = jacobian(M.map(), u);
  Vec<T> nu = cofactor_normal(f.J);

  const Mat<double> Jv = values(f.J);
  double scale = 1.0;
  for (int a = 0; a < Jv.cols(); ++a) scale *= norm(Jv.col(a));
  if (!(norm(values(nu)) > 1e-10 * scale) || scale == 0.0)
    throw DomainError("immersion differential is rank deficient at the parameter point");

  const Vec<double> out = M.outward(values(u));
  double s = dot(values(nu), out) >= 0.0 ? 1.0 : -1.0;
  if (orientation < 0) s = -s;
  f.nu = s * nu;

  const Mat<T> hinv = inverse(space.metric(f.x));
  const Vec<T> up = hinv * f.nu;
  f.nbar = (1.0 / sqrt(dot(f.nu, up))) * up;
  return f;
}

// d/du^a of n_h and n_F = n_h + W along M.
struct NormalDerivatives {
  std::array<Vec<double>, kMaxDim> dnbar, dn;
};

NormalDerivatives normal_derivatives(const Immersion& M, const RandersMetric* metric, const SpaceForm& space,
                                     const Vec<double>& u, int orientation) {
  NormalDerivatives out;
  const int m = M.param_dim();
  for (int a = 0; a < m; ++a) {
    const Frame<D1> f = frame(M, space, seed(u, Vec<double>::unit(m, a)), orientation);
    out.dnbar[a] = tangent(f.nbar);
    if (metric) out.dn[a] = tangent(f.nbar + metric->wind()(f.x));
  }
  return out;
}

ShapeOperator finish_shape(const Mat<double>& S, const Mat<double>& metric, double cluster_tol) {
  ShapeOperator out;
  out.metric = metric;
  out.self_adjoint_residual = max_abs(S - S.transpose());
  out.form = 0.5 * (S + S.transpose());
  out.matrix = inverse(metric) * S.transpose();
  out.eig = solve_sym_geig(out.form, metric, cluster_tol);
  return out;
}

Mat<double> columns(const Mat<double>& v, const std::vector<int>& idx) {
  Mat<double> out(v.rows(), static_cast<int>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.set_col(static_cast<int>(k), v.col(idx[k]));
  return out;
}

std::vector<int> multiplicities(const GeneralizedEigen& e) {
  std::vector<int> out;
  for (const auto& c : e.classes) out.push_back(static_cast<int>(c.members.size()));
  return out;
}

}  // namespace

Immersion::Immersion(VectorMap map, VectorMap outward, std::vector<Range> ranges, std::string catalog_id)
    : map_(std::move(map)), outward_(std::move(outward)), ranges_(std::move(ranges)), id_(std::move(catalog_id)) {
  if (map_.out_dim() < 2) throw InvalidArgument("hypersurfaces need an ambient dimension of at least 2");
  if (map_.in_dim() != map_.out_dim() - 1) throw InvalidArgument("immersion must have codimension one");
  if (outward_.in_dim() != map_.in_dim() || outward_.out_dim() != map_.out_dim())
    throw InvalidArgument("orientation hint has the wrong shape");
  if (static_cast<int>(ranges_.size()) != map_.in_dim()) throw InvalidArgument("parameter box has the wrong size");
}

Vec<double> Immersion::sample(Rng& rng) const {
  Vec<double> u(param_dim());
  for (int a = 0; a < param_dim(); ++a) u[a] = rng.uniform(ranges_[a].lo, ranges_[a].hi);
  return u;
}

std::vector<std::string> catalog_names() { return {"hyperplane", "hypersphere", "cylinder", "clifford_torus"}; }

Immersion catalog(const std::string& id, const CatalogParams& p, const SpaceForm& space) {
  const int n = space.dim();
  if (n < 2) throw InvalidArgument("catalog hypersurfaces need dimension >= 2");
  const int m = n - 1;
  const double box = std::min(0.5, 0.5 * space.chart_radius());
  std::vector<Immersion::Range> ranges;

  if (id == "hyperplane") {
    const double d = p.offset;
    if (!(std::fabs(d) < 0.9 * space.chart_radius())) throw InvalidArgument("hyperplane offset outside the chart");
    for (int a = 0; a < m; ++a) ranges.push_back({-box, box});
    auto map = [d, n](const auto& u) {
      using T = std::decay_t<decltype(u[0])>;
      Vec<T> x(n);
      x[0] = T(d);
      for (int a = 1; a < n; ++a) x[a] = u[a - 1];
      return x;
    };
    auto out = [n](const auto& u) {
      using T = std::decay_t<decltype(u[0])>;
      return Vec<T>::unit(n, 0);
    };
    return Immersion(VectorMap::make(m, n, map, "hyperplane"), VectorMap::make(m, n, out, "e1"), ranges,
                     "hyperplane");
  }

  if (id == "hypersphere") {
    const double r = p.radius;
    if (!(r > 0.0) || !(r < space.chart_radius())) throw InvalidArgument("hypersphere radius outside the chart");
    sphere_ranges(ranges, m);
    auto map = [r, m](const auto& u) { return r * sphere_point(u, 0, m); };
    auto out = [m](const auto& u) { return sphere_point(u, 0, m); };
    return Immersion(VectorMap::make(m, n, map, "hypersphere"), VectorMap::make(m, n, out, "radial"), ranges,
                     "hypersphere");
  }

  if (id == "cylinder") {
    const double r = p.radius;
    const int k = p.m;
    if (k < 1 || k > n - 2) throw InvalidArgument("cylinder S^m x R^(n-m-1) needs 1 <= m <= n-2");
    if (!(r > 0.0) || !(r + box < space.chart_radius())) throw InvalidArgument("cylinder radius outside the chart");
    sphere_ranges(ranges, k);
    for (int a = k; a < m; ++a) ranges.push_back({-box, box});
    auto map = [r, k, n](const auto& u) {
      using T = std::decay_t<decltype(u[0])>;
      const Vec<T> s = sphere_point(u, 0, k);
      Vec<T> x(n);
      for (int i = 0; i <= k; ++i) x[i] = r * s[i];
      for (int i = k + 1; i < n; ++i) x[i] = u[i - 1];
      return x;
    };
    auto out = [k, n](const auto& u) {
      using T = std::decay_t<decltype(u[0])>;
      const Vec<T> s = sphere_point(u, 0, k);
      Vec<T> x(n);
      for (int i = 0; i <= k; ++i) x[i] = s[i];
      return x;
    };
    return Immersion(VectorMap::make(m, n, map, "cylinder"), VectorMap::make(m, n, out, "radial"), ranges,
                     "cylinder");
  }

  if (id == "clifford_torus") {
    if (space.chart() != Chart::kStereographic) throw InvalidArgument("the Clifford torus lives on the sphere chart");
    const int k = p.m;
    if (k < 1 || k > n - 2) throw InvalidArgument("Clifford torus S^m x S^(n-m-1) needs 1 <= m <= n-2");
    const double r = p.radius;
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument("Clifford torus needs 0 < r < 1 (s = sqrt(1 - r^2))");
    const double s = std::sqrt(1.0 - r * r);
    const double c = space.curvature();
    const double R = 1.0 / std::sqrt(c);
    const int l = n - k - 1;
    sphere_ranges(ranges, k);
    sphere_ranges(ranges, l);
    auto ambient = [k, l](const auto& u, double a, double b) {
      using T = std::decay_t<decltype(u[0])>;
      const Vec<T> p1 = sphere_point(u, 0, k);
      const Vec<T> p2 = sphere_point(u, k, l);
      Vec<T> X(k + l + 2);
      for (int i = 0; i <= k; ++i) X[i] = a * p1[i];
      for (int i = 0; i <= l; ++i) X[k + 1 + i] = b * p2[i];
      return X;
    };
    auto map = [ambient, r, s, R, c](const auto& u) { return stereographic(ambient(u, R * r, R * s), c); };
    auto out = [ambient, r, s, R, c](const auto& u) {
      return stereographic_push(ambient(u, R * r, R * s), ambient(u, s, -r), c);
    };
    return Immersion(VectorMap::make(m, n, map, "clifford_torus"), VectorMap::make(m, n, out, "torus_normal"),
                     ranges, "clifford_torus");
  }

  throw InvalidArgument("unknown catalog hypersurface '" + id + "'");
}

NormalPair unit_normals(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, int orientation) {
  if (M.dim() != metric.dim()) throw InvalidArgument("immersion and metric dimensions differ");
  const Frame<double> f = frame(M, metric.space(), u, orientation);
  metric.require_admissible(f.x);
  NormalPair np;
  np.x = f.x;
  np.dphi = f.J;
  np.n_h = f.nbar;
  np.n_F = f.nbar + metric.wind()(f.x);

  const double hn = bilinear(metric.space().metric(f.x), f.nbar, f.nbar);
  if (std::fabs(hn - 1.0) > 1e-10) throw VerificationError("h-normal is not h-unit");

  np.F_value = metric.F(f.x, np.n_F);
  const Vec<double> nu = metric.legendre(f.x, np.n_F);
  double leg = 0.0;
  for (int a = 0; a < M.param_dim(); ++a) leg = std::max(leg, std::fabs(dot(nu, f.J.col(a))));
  np.legendre_residual = leg;
  const Vec<double> direct = (1.0 / metric.dual_norm(f.x, f.nu)) * metric.inverse_legendre(f.x, f.nu);
  np.relation_residual = norm(direct - np.n_F);

  const double tol = metric.tolerances().normal;
  if (std::fabs(np.F_value - 1.0) > 1e-10 || np.legendre_residual > tol || np.relation_residual > tol) {
    std::ostringstream os;
    os << "F-unit normal check failed: |F(n)-1| = " << std::fabs(np.F_value - 1.0)
       << ", Legendre residual = " << np.legendre_residual << ", n = n_h + W residual = " << np.relation_residual;
    throw VerificationError(os.str());
  }
  return np;
}

InducedMetric induced_metric(const NormalPair& np, const RandersMetric& metric) {
  const Mat<double> g = metric.fundamental_tensor(np.x, np.n_F);
  const Mat<double> h = metric.space().metric(np.x);
  InducedMetric out;
  out.g_hat = np.dphi.transpose() * g * np.dphi;
  out.h_bar = np.dphi.transpose() * h * np.dphi;
  const double nw = bilinear(h, np.n_h, metric.wind()(np.x));
  if (!(1.0 + nw > 0.0)) throw DomainError("1 + <n_h, W>_h vanishes (|W|_h >= 1)");
  out.factor = 1.0 / (1.0 + nw);
  out.residual = max_abs(out.g_hat - out.factor * out.h_bar);
  if (out.residual > metric.tolerances().conformal) {
    std::ostringstream os;
    os << "induced metric is not conformal to h_bar: residual " << out.residual;
    throw VerificationError(os.str());
  }
  return out;
}

ShapeOperator shape_operator(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, int orientation,
                             double cluster_tol) {
  const NormalPair np = unit_normals(M, metric, u, orientation);
  const InducedMetric im = induced_metric(np, metric);
  const NormalDerivatives nd = normal_derivatives(M, &metric, metric.space(), u, orientation);
  const Mat<double> g = metric.fundamental_tensor(np.x, np.n_F);
  const Mat<double> N = metric.nonlinear_connection(np.x, np.n_F);
  const int m = M.param_dim();
  Mat<double> S(m, m);
  for (int a = 0; a < m; ++a) {
    const Vec<double> Dn = nd.dn[a] + N * np.dphi.col(a);
    for (int b = 0; b < m; ++b) S(a, b) = -bilinear(g, Dn, np.dphi.col(b));
  }
  ShapeOperator out = finish_shape(S, im.g_hat, cluster_tol);
  if (out.self_adjoint_residual > 1e-8 * std::max(1.0, max_abs(S)))
    throw VerificationError("Finsler shape operator is not self-adjoint");
  return out;
}

ShapeOperator riemannian_shape_operator(const Immersion& M, const SpaceForm& space, const Vec<double>& u,
                                        int orientation, double cluster_tol) {
  const Frame<double> f = frame(M, space, u, orientation);
  space.require_domain(f.x);
  const NormalDerivatives nd = normal_derivatives(M, nullptr, space, u, orientation);
  const Mat<double> h = space.metric(f.x);
  const Tensor3<double> gamma = christoffel(space, f.x);
  const int m = M.param_dim();
  Mat<double> S(m, m);
  for (int a = 0; a < m; ++a) {
    const Vec<double> Dn = nd.dnbar[a] + contract(gamma, f.J.col(a), f.nbar);
    for (int b = 0; b < m; ++b) S(a, b) = -bilinear(h, Dn, f.J.col(b));
  }
  ShapeOperator out = finish_shape(S, f.J.transpose() * h * f.J, cluster_tol);
  if (out.self_adjoint_residual > 1e-8 * std::max(1.0, max_abs(S)))
    throw VerificationError("Riemannian shape operator is not self-adjoint");
  return out;
}

double normal_derivative_residual(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, double k0,
                                  int orientation) {
  const NormalPair np = unit_normals(M, metric, u, orientation);
  const NormalDerivatives nd = normal_derivatives(M, &metric, metric.space(), u, orientation);
  const Mat<double> N = metric.nonlinear_connection(np.x, np.n_F);
  const Tensor3<double> gamma = christoffel(metric.space(), np.x);
  double worst = 0.0;
  for (int a = 0; a < M.param_dim(); ++a) {
    const Vec<double> phi_a = np.dphi.col(a);
    const Vec<double> lhs = nd.dn[a] + N * phi_a;
    const Vec<double> rhs = nd.dnbar[a] + contract(gamma, phi_a, np.n_h) - k0 * phi_a;
    worst = std::max(worst, max_abs(lhs - rhs));
  }
  return worst;
}

FieldClass require_isotropic_s(const RandersMetric& metric, double radius, std::uint64_t seed, double tol) {
  const FieldClass fc = classify_field(metric.space(), metric.wind(), radius, seed, 64, tol);
  if (fc.kind == FieldClassKind::kNeither) {
    std::ostringstream os;
    os << "W is neither Killing nor homothetic (residual " << fc.residual
       << "); the principal curvature shift needs isotropic S-curvature";
    throw HypothesisError(os.str());
  }
  return fc;
}

CurvatureReport verify_shift(const Immersion& M, const RandersMetric& metric, const Vec<double>& u, double k0,
                             int orientation, double cluster_tol) {
  CurvatureReport rep;
  rep.k0 = k0;
  const NormalPair np = unit_normals(M, metric, u, orientation);
  rep.normal_residual =
      std::max({std::fabs(np.F_value - 1.0), np.legendre_residual, np.relation_residual});
  const InducedMetric im = induced_metric(np, metric);
  rep.conformal_residual = im.residual;
  rep.conformal_factor = im.factor;

  const ShapeOperator A = shape_operator(M, metric, u, orientation, cluster_tol);
  const ShapeOperator Ab = riemannian_shape_operator(M, metric.space(), u, orientation, cluster_tol);
  rep.principal_F = A.eig.values;
  rep.principal_h = Ab.eig.values;
  for (double l : rep.principal_F) rep.mean_F += l;
  rep.multiplicities_F = multiplicities(A.eig);
  rep.multiplicities_h = multiplicities(Ab.eig);
  rep.self_adjoint_residual = std::max(A.self_adjoint_residual, Ab.self_adjoint_residual);
  for (std::size_t i = 0; i < rep.principal_F.size(); ++i)
    rep.shift_residual = std::max(rep.shift_residual, std::fabs(rep.principal_F[i] - rep.principal_h[i] - k0));

  // Match multiplicity classes by shifted value; compare eigenspaces.
  for (const auto& cf : A.eig.classes) {
    const EigenClass* best = nullptr;
    double dist = 0.0;
    for (const auto& ch : Ab.eig.classes) {
      const double d = std::fabs(cf.value - ch.value - k0);
      if (!best || d < dist) {
        best = &ch;
        dist = d;
      }
    }
    if (best->members.size() != cf.members.size()) {
      rep.principal_angle = 1.0;
      continue;
    }
    const double sine = subspace_sine(columns(A.eig.vectors, cf.members), columns(Ab.eig.vectors, best->members));
    rep.principal_angle = std::max(rep.principal_angle, sine);
  }
  rep.normal_derivative_residual = normal_derivative_residual(M, metric, u, k0, orientation);
  return rep;
}

}  // namespace rnav

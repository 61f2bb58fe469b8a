#include "rnav/vector_field.hpp"

#include <cmath>
#include <sstream>

namespace rnav {

std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::kAffine: return "affine";
    case FieldKind::kProjective: return "projective";
    case FieldKind::kCustom: return "custom";
  }
  return "?";
}

std::string to_string(FieldClassKind k) {
  switch (k) {
    case FieldClassKind::kKilling: return "killing";
    case FieldClassKind::kHomothetic: return "homothetic";
    case FieldClassKind::kNeither: return "neither";
  }
  return "?";
}

Mat<double> antisymmetric_from_upper(int n, const std::vector<double>& upper) {
  const std::size_t expected = static_cast<std::size_t>(n * (n - 1) / 2);
  if (!upper.empty() && upper.size() != expected) {
    std::ostringstream os;
    os << "antisymmetric matrix of size " << n << " needs " << expected << " upper-triangle entries, got "
       << upper.size();
    throw InvalidArgument(os.str());
  }
  Mat<double> q(n, n);
  if (upper.empty()) return q;
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      q(i, j) = upper[idx];
      q(j, i) = -upper[idx];
      ++idx;
    }
  return q;
}

namespace {

void require_antisymmetric(const Mat<double>& q, int n) {
  if (q.rows() != n || q.cols() != n) throw InvalidArgument("Q has the wrong shape");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (q(i, j) != -q(j, i)) throw InvalidArgument("Q is not antisymmetric");
}

}  // namespace

VectorFieldSpec VectorFieldSpec::affine(int dim, double k0, const Mat<double>& q, const Vec<double>& e) {
  check_dim(dim);
  require_antisymmetric(q, dim);
  if (e.size() != dim) throw InvalidArgument("e has the wrong dimension");
  VectorFieldSpec w;
  w.kind_ = FieldKind::kAffine;
  w.dim_ = dim;
  w.k0_ = k0;
  w.q_ = q;
  w.e_ = e;
  w.description_ = "affine";
  return w;
}

VectorFieldSpec VectorFieldSpec::projective(int dim, double curvature, const Mat<double>& q, const Vec<double>& e) {
  check_dim(dim);
  require_antisymmetric(q, dim);
  if (e.size() != dim) throw InvalidArgument("e has the wrong dimension");
  VectorFieldSpec w;
  w.kind_ = FieldKind::kProjective;
  w.dim_ = dim;
  w.c_ = curvature;
  w.q_ = q;
  w.e_ = e;
  w.description_ = "projective";
  return w;
}

VectorFieldSpec VectorFieldSpec::custom(VectorMap components, std::string description) {
  if (components.in_dim() != components.out_dim()) throw InvalidArgument("custom field must map R^n to R^n");
  VectorFieldSpec w;
  w.kind_ = FieldKind::kCustom;
  w.dim_ = components.in_dim();
  w.q_ = Mat<double>(w.dim_, w.dim_);
  w.e_ = Vec<double>(w.dim_);
  w.custom_ = std::move(components);
  w.description_ = std::move(description);
  return w;
}

VectorFieldSpec VectorFieldSpec::zero(int dim) { return affine(dim, 0.0, Mat<double>(dim, dim), Vec<double>(dim)); }

VectorFieldSpec VectorFieldSpec::constant(const Vec<double>& e) {
  return affine(e.size(), 0.0, Mat<double>(e.size(), e.size()), e);
}

VectorFieldSpec VectorFieldSpec::sphere_rotation(int dim, double curvature, const Mat<double>& q_ambient) {
  if (!(curvature > 0.0)) throw InvalidArgument("sphere rotation fields need positive curvature");
  require_antisymmetric(q_ambient, dim + 1);
  const Mat<double> q = q_ambient;
  const double c = curvature;
  auto fn = [q, c](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    const Vec<T> p = inverse_stereographic(x, c);
    const int m = p.size();
    Vec<T> v(m);
    for (int j = 0; j < m; ++j) {
      T s(0.0);
      for (int i = 0; i < m; ++i) s += p[i] * q(i, j);
      v[j] = s;
    }
    return stereographic_push(p, v, c);
  };
  VectorFieldSpec w = custom(VectorMap::make(dim, dim, fn, "sphere_rotation"), "sphere_rotation");
  w.c_ = curvature;
  w.ambient_q_ = q_ambient;
  return w;
}

std::vector<Vec<double>> sample_navigation_points(const SpaceForm& space, const VectorFieldSpec& field, int count,
                                                  double radius, Rng& rng, double max_wind) {
  const double r = std::min(radius, 0.95 * space.chart_radius());
  std::vector<Vec<double>> pts;
  pts.reserve(count);
  long attempts = 0;
  const long max_attempts = 1000L * std::max(count, 1);
  while (static_cast<int>(pts.size()) < count) {
    if (++attempts > max_attempts) throw DomainError("could not sample points with |W|_h < 1 in the requested ball");
    Vec<double> x = rng.in_ball(space.dim(), r);
    if (!space.in_domain(x)) continue;
    const Vec<double> w = field(x);
    if (bilinear(space.metric(x), w, w) >= max_wind * max_wind) continue;
    pts.push_back(x);
  }
  return pts;
}

FieldClass classify_field(const SpaceForm& space, const VectorFieldSpec& field, const std::vector<Vec<double>>& points,
                          double tol) {
  if (points.empty()) throw DomainError("classify_field: empty sample set");
  const int n = space.dim();
  std::vector<CovariantData<double>> data;
  data.reserve(points.size());
  double num = 0.0, den = 0.0;
  for (const auto& x : points) {
    space.require_domain(x);
    data.push_back(covariant_data(space, field, x));
    const auto& cd = data.back();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        num += cd.r(i, j) * cd.h(i, j);
        den += cd.h(i, j) * cd.h(i, j);
      }
  }
  FieldClass out;
  out.samples = static_cast<int>(points.size());
  out.k0 = -num / (2.0 * den);
  for (const auto& cd : data)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.residual = std::max(out.residual, std::fabs(cd.r(i, j) + 2.0 * out.k0 * cd.h(i, j)));
  if (out.residual > tol) {
    out.kind = FieldClassKind::kNeither;
  } else if (std::fabs(out.k0) < tol) {
    out.kind = FieldClassKind::kKilling;
    out.k0 = 0.0;
  } else {
    out.kind = FieldClassKind::kHomothetic;
  }
  return out;
}

FieldClass classify_field(const SpaceForm& space, const VectorFieldSpec& field, double radius, std::uint64_t seed,
                          int samples, double tol) {
  Rng rng(seed);
  // The wind bound is irrelevant for the classification itself; sample the
  // chart ball directly.
  const double r = std::min(radius, 0.95 * space.chart_radius());
  std::vector<Vec<double>> pts;
  const int count = std::max(samples, 64);
  while (static_cast<int>(pts.size()) < count) {
    Vec<double> x = rng.in_ball(space.dim(), r);
    if (space.in_domain(x)) pts.push_back(x);
  }
  return classify_field(space, field, pts, tol);
}

}  // namespace rnav

#include <doctest.h>

#include <cmath>

#include "rnav/randers.hpp"
#include "rnav/random.hpp"

using namespace rnav;

namespace {

Mat<double> rot(int n, int i, int j, double a) {
  Mat<double> q(n, n);
  q(i, j) = a;
  q(j, i) = -a;
  return q;
}

RandersMetric flat(int n) { return RandersMetric(NavigationSpec(SpaceForm(n, 0.0), VectorFieldSpec::zero(n))); }
RandersMetric half_wind() {
  return RandersMetric(NavigationSpec(SpaceForm(2, 0.0), VectorFieldSpec::constant({0.5, 0.0})));
}
RandersMetric funk() {
  return RandersMetric(
      NavigationSpec(SpaceForm(2, 0.0), VectorFieldSpec::affine(2, 0.25, Mat<double>(2, 2), Vec<double>(2))));
}

const ScalarField x1 = ScalarField::make(2, [](const auto& x) { return x[0]; }, "x1");

}  // namespace

TEST_CASE("F reduces to the h-norm without wind") {
  const RandersMetric m(NavigationSpec(SpaceForm(2, -1.0), VectorFieldSpec::zero(2)));
  const Vec<double> x{0.3, 0.1}, y{0.5, -1.0};
  CHECK(m.F(x, y) == doctest::Approx(std::sqrt(bilinear(m.space().metric(x), y, y))));
}

TEST_CASE("hand values of F under a constant half wind") {
  const auto m = half_wind();
  const Vec<double> x{0.2, -0.4};
  CHECK(m.F(x, {1.0, 0.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(m.F(x, {-1.0, 0.0}) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m.F_alpha_beta(x, {1.0, 0.0}) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("F needs |W|_h < 1 and a nonzero direction") {
  const RandersMetric m(NavigationSpec(SpaceForm(2, 0.0), VectorFieldSpec::constant({1.0, 0.0})));
  CHECK_THROWS_AS(m.F({0.0, 0.0}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(half_wind().F({0.0, 0.0}, {0.0, 0.0}), DomainError);
}

TEST_CASE("fundamental tensor") {
  const RandersMetric riem(NavigationSpec(SpaceForm(2, 1.0), VectorFieldSpec::zero(2)));
  const Vec<double> x{0.3, 0.2};
  CHECK(max_abs(riem.fundamental_tensor(x, {1.0, 0.3}) - riem.space().metric(x)) < 1e-14);
  const auto m = half_wind();
  const Vec<double> y{0.7, -0.2};
  CHECK(max_abs(m.fundamental_tensor(x, y) - m.fundamental_tensor(x, 3.5 * y)) < 1e-14);
  CHECK(max_abs(m.fundamental_tensor(x, {1.0, 0.0}) - m.fundamental_tensor_autodiff(x, {1.0, 0.0})) < 1e-10);
}

TEST_CASE("Cartan tensor") {
  const Vec<double> x{0.1, 0.2}, y{0.6, -0.8};
  const Tensor3<double> c0 = flat(2).cartan_tensor(x, y);
  const auto m = half_wind();
  const Tensor3<double> c = m.cartan_tensor(x, y);
  const double h = 1e-5;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double cy = 0.0;
      for (int k = 0; k < 2; ++k) {
        CHECK(c0(i, j, k) == 0.0);
        cy += c(i, j, k) * y[k];
        Vec<double> yp = y, ym = y;
        yp[k] += h;
        ym[k] -= h;
        const double fd = 0.25 * (m.fundamental_tensor_autodiff(x, yp)(i, j) - m.fundamental_tensor_autodiff(x, ym)(i, j)) / h;
        CHECK(std::fabs(c(i, j, k) - fd) < 1e-9);
      }
      CHECK(std::fabs(cy) < 1e-14);
    }
}

TEST_CASE("Legendre transform and its asymmetry") {
  const auto w0 = flat(2);
  const Vec<double> y0{0.3, -0.2};
  const Vec<double> l0 = w0.legendre({0.1, 0.1}, y0);
  CHECK(std::fabs(l0[0] - y0[0]) + std::fabs(l0[1] - y0[1]) < 1e-15);
  const auto m = half_wind();
  const Vec<double> x{0.0, 0.0};
  const Vec<double> up = m.inverse_legendre(x, {1.0, 0.0});
  const Vec<double> dn = m.inverse_legendre(x, {-1.0, 0.0});
  CHECK(up[0] == doctest::Approx(9.0 / 4.0).epsilon(1e-13));
  CHECK(up[1] == doctest::Approx(0.0));
  CHECK(dn[0] == doctest::Approx(-1.0 / 4.0).epsilon(1e-13));
  CHECK(dn[1] == doctest::Approx(0.0));
  CHECK(m.dual_norm(x, {1.0, 0.0}) == doctest::Approx(1.5).epsilon(1e-14));
  const Vec<double> g = m.gradient(x1, {0.3, 0.4});
  CHECK(g[0] == doctest::Approx(9.0 / 4.0).epsilon(1e-13));
  CHECK(m.F({0.3, 0.4}, g) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("gradient identity df(grad f) = F*(df)^2") {
  const RandersMetric m(NavigationSpec(SpaceForm(3, -1.0), VectorFieldSpec::affine(3, 0.0, rot(3, 0, 1, 0.4), Vec<double>(3))));
  const auto f = ScalarField::make(3, [](const auto& x) { return x[0] * x[1] + rnav::sin(x[2]); }, "f");
  Rng rng(11);
  for (int k = 0; k < 20; ++k) {
    const Vec<double> x = rng.in_ball(3, 0.5);
    const Vec<double> df = gradient(f, x);
    const double dual = m.dual_norm(x, df);
    CHECK(std::fabs(dot(df, m.gradient(f, x)) - dual * dual) < 1e-10);
  }
}

TEST_CASE("spray reductions") {
  const Vec<double> x{0.2, -0.1}, y{0.4, 0.9};
  CHECK(max_abs(flat(2).spray(x, y)) < 1e-15);
  CHECK(max_abs(half_wind().spray(x, y)) < 1e-15);
  const SpaceForm h2(2, -1.0);
  const RandersMetric riem(NavigationSpec(h2, VectorFieldSpec::zero(2)));
  CHECK(max_abs(riem.spray(x, y) - 0.5 * contract(christoffel(h2, x), y, y)) < 1e-13);
  const RandersMetric rotm(NavigationSpec(SpaceForm(2, 0.0), VectorFieldSpec::affine(2, 0.0, rot(2, 0, 1, 0.5), Vec<double>(2))));
  CHECK(max_abs(rotm.nonlinear_connection(x, y) - rotm.nonlinear_connection_autodiff(x, y)) < 1e-8);
  CHECK(max_abs(rotm.spray(x, y) - rotm.spray_from_metric(x, y)) < 1e-12);
}

TEST_CASE("covariant derivative without wind is the Levi-Civita one") {
  const SpaceForm s2(2, 1.0);
  const RandersMetric m(NavigationSpec(s2, VectorFieldSpec::zero(2)));
  const auto X = VectorMap::make(2, 2, [](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    Vec<T> v(2);
    v[0] = x[1] * x[1];
    v[1] = T(0.5) + x[0];
    return v;
  });
  const Vec<double> x{0.3, -0.2}, v{0.5, 0.7}, w{1.0, 0.2};
  const Vec<double> lc = jacobian(X, x) * v + contract(christoffel(s2, x), v, X(x));
  CHECK(max_abs(m.covariant_derivative(x, w, v, X) - lc) < 1e-10);
  const auto c = VectorMap::make(2, 2, [](const auto& x) {
    using T = std::decay_t<decltype(x[0])>;
    Vec<T> out(2);
    out[0] = T(1.0) + 0.0 * x[0];
    return out;
  });
  CHECK(max_abs(flat(2).covariant_derivative(x, w, v, c)) < 1e-15);
}

TEST_CASE("S-curvature") {
  Rng rng(2);
  const RandersMetric killing(
      NavigationSpec(SpaceForm(2, 0.0), VectorFieldSpec::affine(2, 0.0, rot(2, 0, 1, 0.3), {0.1, -0.1})));
  const auto fk = funk();
  for (int k = 0; k < 20; ++k) {
    const Vec<double> x = rng.in_ball(2, 1.2), y = rng.unit_vector(2);
    CHECK(std::fabs(flat(2).s_curvature(x, y)) < 1e-14);
    CHECK(std::fabs(killing.s_curvature(x, y)) < 1e-7);
    CHECK(std::fabs(fk.s_curvature(x, y) - 0.75 * fk.F(x, y)) < 1e-6);
  }
}

TEST_CASE("Busemann-Hausdorff density") {
  CHECK(flat(2).bh_density({0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(half_wind().bh_density({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-13));
  const RandersMetric ball(
      NavigationSpec(SpaceForm(3, -1.0), VectorFieldSpec::affine(3, 0.0, rot(3, 0, 1, 0.5), {0.05, 0.0, 0.0})));
  const Vec<double> x{0.2, 0.3, -0.1};
  CHECK(ball.bh_density(x) == doctest::Approx(std::pow(2.0 / (1.0 - dot(x, x)), 3)).epsilon(1e-12));
}

TEST_CASE("flag curvature of Randers space forms") {
  Rng rng(4);
  const RandersMetric sphere(NavigationSpec(SpaceForm(2, 1.0), VectorFieldSpec::zero(2)));
  const auto fk = funk();
  for (int k = 0; k < 10; ++k) {
    const Vec<double> x = rng.in_ball(2, 1.0), y = rng.unit_vector(2), v = rng.unit_vector(2);
    if (std::fabs(y[0] * v[1] - y[1] * v[0]) < 0.1) continue;
    CHECK(std::fabs(flat(2).flag_curvature(x, y, v)) < 1e-12);
    CHECK(fk.flag_curvature(x, y, v) == doctest::Approx(-1.0 / 16.0).epsilon(1e-8));
    CHECK(sphere.flag_curvature(x, y, v) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("Finsler Laplacian") {
  const auto half = ScalarField::make(3, [](const auto& x) { return 0.5 * dot(x, x); }, "|x|^2/2");
  CHECK(flat(3).laplacian(half, {0.1, 0.2, 0.3}) == doctest::Approx(3.0));
  const SpaceForm h2(2, -1.0);
  const RandersMetric riem(NavigationSpec(h2, VectorFieldSpec::zero(2)));
  const auto f = ScalarField::make(2, [](const auto& x) { return rnav::exp(x[0]) * x[1]; }, "f");
  CHECK(riem.laplacian(f, {0.2, 0.3}) == doctest::Approx(riem_grad_hess_lap(h2, f, {0.2, 0.3}).laplacian).epsilon(1e-10));
  CHECK(std::fabs(half_wind().laplacian(x1, {0.3, -0.2})) < 1e-12);
  const auto lf = funk().laplacian_forms(f, {0.4, 0.1});
  CHECK(std::fabs(lf.divergence - lf.trace) < 1e-6);
}

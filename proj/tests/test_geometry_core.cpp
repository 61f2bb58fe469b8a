#include <doctest.h>

#include <cmath>

#include "rnav/core.hpp"
#include "rnav/random.hpp"

using namespace rnav;

namespace {
ScalarField sq() {
  return ScalarField::make(1, [](const auto& x) { return x[0] * x[0]; }, "x1^2");
}
}  // namespace

TEST_CASE("jet of x1^2 at 3") {
  const Jet2 j = eval_jet2(sq(), Vec<double>{3.0});
  CHECK(j.value == 9.0);
  CHECK(j.grad[0] == 6.0);
  CHECK(j.hess(0, 0) == 2.0);
}

TEST_CASE("jet of a constant is flat") {
  const auto f = ScalarField::make(2, [](const auto& x) { return 0.0 * x[0] + 4.5; }, "c");
  const Jet2 j = eval_jet2(f, Vec<double>{0.3, -1.0});
  CHECK(j.value == 4.5);
  CHECK(max_abs(j.grad) == 0.0);
  CHECK(max_abs(j.hess) == 0.0);
}

TEST_CASE("jet of x1 x2 at (1,2)") {
  const auto f = ScalarField::make(2, [](const auto& x) { return x[0] * x[1]; }, "x1 x2");
  const Jet2 j = eval_jet2(f, Vec<double>{1.0, 2.0});
  CHECK(j.value == 2.0);
  CHECK(j.grad[0] == 2.0);
  CHECK(j.grad[1] == 1.0);
  CHECK(j.hess(0, 0) == 0.0);
  CHECK(j.hess(0, 1) == 1.0);
  CHECK(j.hess(1, 0) == 1.0);
  CHECK(j.hess(1, 1) == 0.0);
}

TEST_CASE("third-order duals agree with hand derivatives") {
  // d^3/dx^3 of x^4 at 2 is 48
  D3 x(D2(D1(2.0, 1.0), D1(1.0, 0.0)), D2(D1(1.0, 0.0), D1(0.0, 0.0)));
  const D3 y = x * x * x * x;
  CHECK(y.v.v.v == doctest::Approx(16.0));
  CHECK(y.d.d.d == doctest::Approx(48.0));
}

TEST_CASE("finite differences confirm autodiff") {
  const auto poly = ScalarField::make(2, [](const auto& x) { return x[0] * x[0] * x[1] - 3.0 * x[1] + 1.0; }, "p");
  CHECK(fd_check(poly, Vec<double>{0.4, -0.7}, 1e-5).grad_error < 1e-8);
  const auto e = ScalarField::make(1, [](const auto& x) { return rnav::exp(x[0]); }, "exp");
  CHECK(fd_check(e, Vec<double>{0.0}, 1e-5).max_error() < 1e-7);
  const auto c = ScalarField::make(2, [](const auto& x) { return 0.0 * x[0] + 2.0; }, "c");
  CHECK(fd_check(c, Vec<double>{0.1, 0.2}, 1e-5).max_error() < 1e-12);
}

TEST_CASE("generalized symmetric eigenproblem") {
  Mat<double> I(2, 2);
  I(0, 0) = I(1, 1) = 1.0;
  auto r = solve_sym_geig(I, I);
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(1.0));
  CHECK(r.classes.size() == 1);

  Mat<double> a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  r = solve_sym_geig(a, I);
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(2.0));

  Mat<double> a2(2, 2), b2(2, 2);
  a2(0, 0) = a2(1, 1) = 2.0;
  b2(0, 0) = 2.0;
  b2(1, 1) = 1.0;
  r = solve_sym_geig(a2, b2);
  CHECK(r.values[0] == doctest::Approx(1.0));
  CHECK(r.values[1] == doctest::Approx(2.0));
  CHECK(r.max_residual < 1e-12);
}

TEST_CASE("eigenproblem rejects an indefinite B") {
  Mat<double> a(2, 2), b(2, 2);
  a(0, 0) = a(1, 1) = 1.0;
  b(0, 0) = 1.0;
  b(1, 1) = -1.0;
  CHECK_THROWS_AS(solve_sym_geig(a, b), Error);
}

TEST_CASE("split streams are reproducible and distinct") {
  Rng a = Rng::split(7, 1), b = Rng::split(7, 1), c = Rng::split(7, 2);
  const double x = a.uniform();
  CHECK(x == b.uniform());
  CHECK(x != c.uniform());
}

TEST_CASE("subspace sine of equal and orthogonal spans") {
  Mat<double> u(3, 1), v(3, 1), w(3, 1);
  u(0, 0) = 1.0;
  v(0, 0) = -2.0;
  w(1, 0) = 1.0;
  CHECK(subspace_sine(u, v) == doctest::Approx(0.0));
  CHECK(subspace_sine(u, w) == doctest::Approx(1.0));
}

#include <doctest.h>

#include <cmath>

#include "rnav/isoparametric.hpp"

using namespace rnav;

namespace {

RandersMetric metric(int n, double c, VectorFieldSpec w) { return RandersMetric(NavigationSpec(SpaceForm(n, c), std::move(w))); }

SamplingOptions small(double radius = 0.9) {
  SamplingOptions o;
  o.levels = 5;
  o.count = 16;
  o.radius = radius;
  return o;
}

const auto x1 = ScalarField::make(2, [](const auto& x) { return x[0]; }, "x1");
const auto norm2 = ScalarField::make(2, [](const auto& x) { return x[0] * x[0] + x[1] * x[1]; }, "|x|^2");

}  // namespace

TEST_CASE("sampled points sit on their levels") {
  const auto m = metric(2, 0.0, VectorFieldSpec::zero(2));
  const auto f = IsoFunction::chart(norm2);
  for (const auto& lv : sample_levels(f, m, small())) {
    CHECK_FALSE(lv.irregular);
    CHECK(lv.points.size() == 16u);
    for (const auto& p : lv.points) CHECK(std::fabs(norm2(p) - lv.t) < 1e-10);
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const auto m = metric(2, 0.0, VectorFieldSpec::zero(2));
  const auto f = IsoFunction::chart(norm2);
  const auto a = sample_level_set(f, m, 0.3, 8, 42);
  const auto b = sample_level_set(f, m, 0.3, 8, 42);
  for (size_t i = 0; i < a.points.size(); ++i) CHECK(max_abs(a.points[i] - b.points[i]) == 0.0);
}

TEST_CASE("a coordinate is isoparametric without wind") {
  const auto rep = check_direct(IsoFunction::chart(x1), metric(2, 0.0, VectorFieldSpec::zero(2)), small());
  CHECK(rep.verdict == Verdict::kIsoparametric);
  for (const auto& l : rep.first.levels) CHECK(l.mean == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& l : rep.second.levels) CHECK(std::fabs(l.mean) < 1e-10);
}

TEST_CASE("a coordinate under a constant half wind") {
  const auto m = metric(2, 0.0, VectorFieldSpec::constant({0.5, 0.0}));
  const auto rep = check_direct(IsoFunction::chart(x1), m, small());
  CHECK(rep.verdict == Verdict::kIsoparametric);
  for (const auto& l : rep.first.levels) CHECK(l.mean == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("a parabola is neither") {
  const auto f = ScalarField::make(2, [](const auto& x) { return x[0] * x[0] - x[1]; }, "parabola");
  const auto m = metric(2, 0.0, VectorFieldSpec::zero(2));
  CHECK(check_direct(IsoFunction::chart(f), m, small()).verdict == Verdict::kNeither);
  CHECK(check_riemannian(IsoFunction::chart(f), m.space(), small()).verdict == Verdict::kNeither);
}

TEST_CASE("distance to the origin: a = 1, b = (n - 1)/f") {
  const auto r = ScalarField::make(3, [](const auto& x) { return rnav::sqrt(dot(x, x)); }, "|x|");
  SamplingOptions o = small();
  o.explicit_levels = {0.2, 0.4, 0.6};
  const auto rep = check_riemannian(IsoFunction::chart(r), SpaceForm(3, 0.0), o);
  CHECK(rep.verdict == Verdict::kIsoparametric);
  for (const auto& l : rep.first.levels) CHECK(l.mean == doctest::Approx(1.0).epsilon(1e-10));
  for (const auto& l : rep.second.levels) CHECK(l.mean == doctest::Approx(2.0 / l.t).epsilon(1e-8));
}

TEST_CASE("|x|^2 under W = -x/2") {
  const auto m = metric(2, 0.0, VectorFieldSpec::affine(2, 0.25, Mat<double>(2, 2), Vec<double>(2)));
  const auto f = IsoFunction::chart(norm2);
  const auto rec = evaluate_levels(f, m, sample_levels(f, m, small()));
  Tolerances tol;
  const auto direct = direct_report(rec, tol);
  const auto nav = navigation_report(rec, tol);
  CHECK(direct.verdict == Verdict::kIsoparametric);
  CHECK(nav.verdict == Verdict::kIsoparametric);
  for (const auto& l : direct.first.levels) CHECK(l.mean == doctest::Approx(2.0 * std::sqrt(l.t) - l.t).epsilon(1e-10));
  const auto wp = check_wind_profile(rec, 2, 0.25, tol);
  CHECK(wp.passes);
  CHECK(wp.phi.poly.size() >= 2u);
  CHECK(wp.phi.poly[1] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(wp.a_tilde_residual < 1e-6);
  CHECK(wp.b_tilde_residual < 1e-4);
  CHECK(wp.div_residual < 1e-8);
}

TEST_CASE("wind profile fails for |x|^2 with a constant wind") {
  const auto m = metric(2, 0.0, VectorFieldSpec::constant({0.3, 0.0}));
  const auto f = IsoFunction::chart(norm2);
  const auto rec = evaluate_levels(f, m, sample_levels(f, m, small()));
  const auto wp = check_wind_profile(rec, 2, 0.0, Tolerances{});
  CHECK_FALSE(wp.passes);
}

TEST_CASE("wind profile needs an isoparametric f") {
  const auto f = ScalarField::make(2, [](const auto& x) { return x[0] * x[0] - x[1]; }, "parabola");
  const auto m = metric(2, 0.0, VectorFieldSpec::zero(2));
  const auto g = IsoFunction::chart(f);
  const auto rec = evaluate_levels(g, m, sample_levels(g, m, small()));
  CHECK_THROWS_AS(check_wind_profile(rec, 2, 0.0, Tolerances{}), HypothesisError);
}

TEST_CASE("sphere calculus closed forms") {
  const Vec<double> X{0.36, 0.48, 0.8};
  const auto lin = ScalarField::make(3, [](const auto& x) { return x[2]; }, "X3");
  const auto sl = sphere_calculus(lin, 1, X);
  CHECK(sl.grad_norm2 == doctest::Approx(1.0 - 0.64).epsilon(1e-13));
  CHECK(sl.laplacian == doctest::Approx(-2.0 * 0.8).epsilon(1e-13));
  CHECK(sl.identity_residual < 1e-12);
  CHECK(sphere_chart_residual(lin, 1, X) < 1e-8);

  const auto quad = ScalarField::make(3, [](const auto& x) { return x[0] * x[0] - x[1] * x[1]; }, "quadric");
  const double phi = 0.36 * 0.36 - 0.48 * 0.48;
  const auto sq = sphere_calculus(quad, 2, X);
  CHECK(sq.laplacian == doctest::Approx(-6.0 * phi).epsilon(1e-12));
  CHECK(sphere_chart_residual(quad, 2, X) < 1e-8);

  const auto one = ScalarField::make(3, [](const auto& x) { return 1.0 + 0.0 * x[0]; }, "1");
  const auto s1 = sphere_calculus(one, 0, X);
  CHECK(std::fabs(s1.grad_norm2) < 1e-15);
  CHECK(std::fabs(s1.laplacian) < 1e-15);
}

TEST_CASE("homogeneity is enforced for sphere functions") {
  const auto bad = ScalarField::make(3, [](const auto& x) { return x[0] + x[1] * x[1]; }, "mixed");
  CHECK_THROWS_AS(IsoFunction::sphere(bad, 2), InvalidArgument);
  const auto good = ScalarField::make(3, [](const auto& x) { return x[0] * x[1]; }, "X1X2");
  CHECK(homogeneity_residual(good, 2, 20, 3) < 1e-12);
}

TEST_CASE("profile fitting") {
  std::vector<std::pair<double, double>> s;
  for (double t : {0.0, 0.5, 1.0, 1.5})
    for (int k = 0; k < 3; ++k) s.emplace_back(t, 2.0 - 3.0 * t);
  const auto p = fit_profiles(s);
  CHECK(p.constant_on_levels);
  CHECK(p.poly[0] == doctest::Approx(2.0));
  CHECK(p.poly[1] == doctest::Approx(-3.0));
  CHECK(p.max_deviation < 1e-12);
  CHECK_THROWS_AS(fit_profiles({{1.0, 2.0}, {1.0, 2.0}}), DomainError);
  s.emplace_back(0.5, 7.0);
  CHECK_FALSE(fit_profiles(s).constant_on_levels);
}

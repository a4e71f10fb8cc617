#include "doctest.h"

#include <cmath>
#include <numbers>

#include "szego/convex_geometry.hpp"
#include "szego/errors.hpp"
#include "szego/pair_geometry.hpp"
#include "szego/parallel.hpp"

using namespace szego;

namespace {
Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
BoundaryPoint pt(std::initializer_list<double> x, std::initializer_list<double> y, double t) {
  return BoundaryPoint{vec(x), vec(y), t};
}
const Polynomial kSq(1, {{{2}, 1.0}});
const Polynomial kQuartic(1, {{{4}, 1.0}});
}  // namespace

TEST_CASE("tilde_b examples") {
  CHECK(tilde_b(kSq, vec({0.3}), vec({-1.7})) == kSq);
  // b = x^4 with midpoint 1.
  const Polynomial t = tilde_b(kQuartic, vec({1.5}), vec({0.5}));
  CHECK(t == Polynomial(1, {{{4}, 1.0}, {{3}, 4.0}, {{2}, 6.0}}));
  CHECK(t(vec({0.0})) == 0.0);
}

TEST_CASE("tilde_b agrees with the pointwise definition") {
  const Polynomial b(2, {{{2, 0}, 1.0}, {{1, 1}, 1.0}, {{2, 2}, 1.0}, {{4, 0}, 1.0}, {{0, 6}, 1.0}});
  const Vec x = vec({0.4, -0.9}), xp = vec({-0.2, 0.5});
  const Vec m = (x + xp) / 2;
  const Polynomial t = tilde_b(b, x, xp);
  for (int k = 0; k < 50; ++k) {
    const Vec v = vec({std::sin(1.3 * k), std::cos(0.7 * k + 0.2)});
    const double direct = b(Vec(v + m)) - b.gradient(m).dot(v) - b(m);
    CHECK(t(v) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("delta and w examples") {
  CHECK(delta(kSq, vec({0.7}), vec({0.7})) == 0.0);
  CHECK(delta(kSq, vec({1.0}), vec({-1.0})) == 2.0);
  CHECK(delta(kQuartic, vec({1.0}), vec({-1.0})) == 2.0);
  const BoundaryPoint p = pt({1.0}, {0.0}, 0.0);
  CHECK(w_offset(kSq, p, p) == 0.0);
  CHECK(w_offset(kSq, p, pt({1.0}, {1.0}, 0.0)) == 2.0);
  CHECK(w_offset(kSq, pt({0.2}, {0.5}, 0.25), pt({-0.9}, {0.5}, 1.0)) == 0.75);
}

TEST_CASE("pair_data examples") {
  const PairData same = pair_data(kSq, pt({0.3}, {0.1}, 2.0), pt({0.3}, {0.1}, 2.0));
  CHECK(same.delta == 0.0);
  CHECK(same.w == 0.0);
  CHECK(same.gamma[0] == 0.0);
  const PairData a = pair_data(kSq, pt({1.0}, {0.0}, 0.0), pt({-1.0}, {0.0}, 0.0));
  CHECK(a.delta == 2.0);
  CHECK(a.w == 0.0);
  CHECK(a.gamma[0] == 0.0);
  const Polynomial b2(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
  const PairData c = pair_data(b2, pt({1.0, 0.0}, {0.0, 0.0}, 0.0), pt({-1.0, 0.0}, {0.0, 1.0}, 0.0));
  CHECK(c.delta == 2.0);
  CHECK(c.w == 0.0);
  CHECK(c.gamma[0] == 0.0);
  CHECK(c.gamma[1] == -1.0);
}

TEST_CASE("boundary point text round trip") {
  const BoundaryPoint p = pt({0.1, -2.5}, {3.0, 0.125}, -0.75);
  CHECK(parse_boundary_point(format_boundary_point(p)) == p);
  CHECK_THROWS_AS(parse_boundary_point("x=[1 y=[0] t=0"), ConfigError);
}

TEST_CASE("bounding radius examples") {
  const double r1 = bounding_radius(SublevelSet{kSq, 1.0});
  CHECK(r1 >= 1.0);
  CHECK(r1 <= 2.0);
  const double r2 = bounding_radius(SublevelSet{Polynomial(1, {{{2}, 0.01}}), 1.0});
  CHECK(r2 >= 10.0);
  CHECK(r2 <= 20.0);
  const double r3 = bounding_radius(SublevelSet{Polynomial(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}}), 16.0});
  CHECK(r3 >= 4.0);
  CHECK(r3 <= 8.0);
  CHECK_THROWS_AS(bounding_radius(SublevelSet{Polynomial(2, {{{2, 0}, 1.0}}), 1.0}), NotCombinedDegree);
}

TEST_CASE("sublevel volume examples") {
  VolumeConfig mc;
  mc.samples = 400000;
  const auto within = [](const VolumeEstimate& e, double exact) {
    return std::abs(e.value - exact) <= 4.0 * e.std_error + 1e-12;
  };
  CHECK(within(sublevel_volume(SublevelSet{kSq, 1.0}, mc), 2.0));
  CHECK(within(sublevel_volume(SublevelSet{Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}), 1.0}, mc), std::numbers::pi));
  // 4 int_0^1 sqrt(1 - u^4) du by composite Simpson on u = sin-like substitution-free grid.
  double oracle = 0.0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    const double u = (i + 0.5) / N;
    oracle += std::sqrt(1 - u * u * u * u) / N;
  }
  oracle *= 4.0;
  CHECK(oracle == doctest::Approx(3.49608).epsilon(1e-5));
  const Polynomial q(2, {{{4, 0}, 1.0}, {{0, 2}, 1.0}});
  CHECK(within(sublevel_volume(SublevelSet{q, 1.0}, mc), oracle));
  VolumeConfig radial;
  radial.method = VolumeMethod::Radial;
  CHECK(sublevel_volume(SublevelSet{q, 1.0}, radial).value == doctest::Approx(oracle).epsilon(1e-4));
  VolumeConfig grid;
  grid.method = VolumeMethod::Grid;
  CHECK(sublevel_volume(SublevelSet{q, 1.0}, grid).value == doctest::Approx(oracle).epsilon(1e-2));
}

TEST_CASE("volume of |v|^2 scales as tau^{-n/2}") {
  VolumeConfig radial;
  radial.method = VolumeMethod::Radial;
  const double base = sublevel_volume(SublevelSet{Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}), 1.0}, radial).value;
  for (double tau : {4.0, 16.0}) {
    const Polynomial g(2, {{{2, 0}, tau}, {{0, 2}, tau}});
    CHECK(sublevel_volume(SublevelSet{g, 1.0}, radial).value * tau == doctest::Approx(base).epsilon(0.02));
  }
}

TEST_CASE("ray ratio") {
  CHECK(ray_ratio(SublevelSet{kQuartic + kSq, 1.0}, vec({1.0})) == doctest::Approx(1.0).epsilon(1e-9));
  const Polynomial cubic(1, {{{2}, 1.0}, {{3}, 1.0}, {{4}, 1.0}});
  // Positive root of t^2 + t^3 + t^4 = 1 by bisection.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (mid * mid + mid * mid * mid + mid * mid * mid * mid < 1.0 ? lo : hi) = mid;
  }
  CHECK(ray_ratio(SublevelSet{cubic, 1.0}, vec({1.0})) == doctest::Approx(1.0 / lo).epsilon(1e-8));
  CHECK(1.0 / lo == doctest::Approx(1.466).epsilon(1e-3));
  const Polynomial g2(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}, {{3, 0}, 0.5}, {{4, 0}, 1.0}, {{0, 4}, 0.2}});
  for (int k = 0; k < 20; ++k) {
    const Vec u = vec({std::cos(0.31 * k), std::sin(0.31 * k)});
    const double r = ray_ratio(SublevelSet{g2, 1.0}, u);
    CHECK(r >= 1.0);
    CHECK(std::isfinite(r));
  }
}

TEST_CASE("John ellipsoid examples") {
  const Ellipsoid ball = john_ellipsoid(SublevelSet{Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}), 1.0});
  CHECK(ball.semi_axes[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ball.semi_axes[1] == doctest::Approx(1.0).epsilon(1e-6));
  const Ellipsoid el = john_ellipsoid(SublevelSet{Polynomial(2, {{{2, 0}, 0.25}, {{0, 2}, 1.0}}), 1.0});
  CHECK(el.semi_axes[0] == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(el.semi_axes[1] == doctest::Approx(1.0).epsilon(1e-3));
  const Polynomial cubic(1, {{{2}, 1.0}, {{3}, 1.0}, {{4}, 1.0}});
  const Ellipsoid seg = john_ellipsoid(SublevelSet{cubic, 1.0});
  CHECK(seg.semi_axes[0] == doctest::Approx(1.0 / ray_ratio(SublevelSet{cubic, 1.0}, vec({1.0}))).epsilon(1e-6));
}

TEST_CASE("mu factors") {
  const MuFactors a = mu_factors(kSq, 1.0);
  CHECK(a.sandwich_outer == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(a.mu[0] == doctest::Approx(1.0).epsilon(1e-6));
  const MuFactors b = mu_factors(kSq, 4.0);
  CHECK(b.mu[0] == doctest::Approx(0.5 * b.sandwich_outer).epsilon(1e-6));
}

TEST_CASE("scaling check examples") {
  VolumeConfig mc;
  mc.samples = 200000;
  const Polynomial disc(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}});
  const ScalingCheck q = scaling_check(disc, 1.0, 0.25, mc);
  CHECK(q.holds);
  CHECK(q.vol_lambda_x / q.vol_x == doctest::Approx(0.25).epsilon(0.02));
  CHECK(scaling_check(disc, 1.0, 1.0, mc).holds);
  CHECK(scaling_check(disc, 1.0, 0.0, mc).holds);
}

TEST_CASE("exp integral equivalence examples") {
  VolumeConfig radial;
  radial.method = VolumeMethod::Radial;
  const ExpIntegralEquiv a = exp_integral_equiv(kSq, radial);
  CHECK(a.integral == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-6));
  CHECK(a.volume == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(a.holds);
  const ExpIntegralEquiv b = exp_integral_equiv(Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}}), radial);
  CHECK(b.integral == doctest::Approx(std::numbers::pi).epsilon(1e-4));
  CHECK(b.ratio == doctest::Approx(1.0).epsilon(1e-6));
  const ExpIntegralEquiv c = exp_integral_equiv(kQuartic, radial);
  CHECK(c.integral == doctest::Approx(2.0 * std::tgamma(1.25)).epsilon(1e-6));
  CHECK(c.ratio == doctest::Approx(std::tgamma(1.25)).epsilon(1e-6));
  double bound = 1.0;
  for (int j = 1; j <= 50; ++j) bound += std::exp(-j) * (j + 1);
  CHECK(exp_integral_upper_bound(1) == doctest::Approx(bound).epsilon(1e-14));
}

TEST_CASE("sphere rules integrate constants") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
  for (int n = 1; n <= 3; ++n) {
    const SphereRule r = sphere_rule(n, 16);
    double s = 0.0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(n * unit_ball_volume(n)).epsilon(1e-12));
  }
}

TEST_CASE("serial and parallel Monte Carlo counts agree for any thread count") {
  const SublevelSet s{Polynomial(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}}), 1.0};
  const std::size_t ref = kernels::count_inside_serial(s, 1.5, 300000, 77);
  for (int t : {1, 2, 4}) {
    kernels::set_threads(t);
    CHECK(kernels::count_inside_parallel(s, 1.5, 300000, 77) == ref);
  }
  kernels::set_threads(0);
}

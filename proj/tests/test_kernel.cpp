#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "szego/errors.hpp"
#include "szego/kernel.hpp"
#include "szego/parallel.hpp"

using namespace szego;

namespace {
constexpr double kPi = std::numbers::pi;
Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
BoundaryPoint pt(double x, double y, double t) { return BoundaryPoint{vec({x}), vec({y}), t}; }
const Polynomial kSq(1, {{{2}, 1.0}});
}  // namespace

TEST_CASE("quadratic oracle examples") {
  const Vec a = vec({1.0});
  CHECK(std::abs(quadratic_oracle(a, pt(1, 0, 0), pt(-1, 0, 0)) - 1.0 / (8 * kPi * kPi)) < 1e-15);
  CHECK(std::abs(quadratic_oracle(a, pt(0, 0, 0), pt(0, 1, 0)) - 2.0 / (kPi * kPi)) < 1e-15);
  const std::complex<double> w = quadratic_oracle(a, pt(0, 0, 0), pt(0, 0, 1));
  CHECK(std::abs(w - std::complex<double>(-1.0 / (2 * kPi * kPi), 0.0)) < 1e-15);
  CHECK_THROWS_AS(quadratic_oracle(a, pt(0.5, 0.5, 0.5), pt(0.5, 0.5, 0.5)), OnDiagonal);
}

TEST_CASE("kernel evaluation matches the quadratic oracle in one variable") {
  const Vec a = vec({1.0});
  for (const auto& [p, q] : {std::pair{pt(1, 0, 0), pt(-1, 0, 0)}, std::pair{pt(0, 0, 0), pt(0, 1, 0)},
                             std::pair{pt(0, 0, 0), pt(0, 0, 1)}, std::pair{pt(0.3, -0.2, 0.1), pt(-0.4, 0.5, -0.6)}}) {
    const KernelEstimate e = szego_eval(kSq, p, q);
    const std::complex<double> exact = quadratic_oracle(a, p, q);
    CHECK(std::abs(e.value - exact) <= 1e-3 * std::abs(exact));
    CHECK(e.abs == std::abs(e.value));
    CHECK(e.err >= 0.0);
  }
}

TEST_CASE("on-diagonal evaluation is rejected") {
  CHECK_THROWS_WITH_AS(szego_eval(kSq, pt(0.2, 0.1, 0.0), pt(0.2, 0.1, 0.0)), "on-diagonal evaluation", OnDiagonal);
}

TEST_CASE("bound_rhs examples") {
  CHECK(bound_rhs(kSq, pt(1, 0, 0), pt(-1, 0, 0)) == doctest::Approx(1.0 / 16).epsilon(1e-6));
  CHECK(bound_rhs(kSq, pt(0, 0, 0), pt(0, 1, 0)) == doctest::Approx(0.25).epsilon(1e-6));
  // rho -> 4 rho shrinks the bound by 16 for b = x^2.
  CHECK(bound_rhs(kSq, pt(0, 0, 0), pt(0, 2, 0)) == doctest::Approx(0.25 / 16).epsilon(1e-6));
}

TEST_CASE("bound components") {
  // delta = b~(gamma) = |w| = 1: x = +-1/sqrt(2), gamma = 1, w = 1.
  const double h = 1.0 / std::sqrt(2.0);
  const BoundaryPoint p = pt(h, 0, 0), q = pt(-h, 1, 1);
  const BoundReport r = bound_components(kSq, p, q);
  CHECK(r.A_delta == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.B_ytilde == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.C_w == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.min_of_three == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.combined == doctest::Approx(1.0 / 12).epsilon(1e-6));
  const BoundReport d = bound_components(kSq, pt(1, 0, 0), pt(-1, 0, 0));
  CHECK(std::isinf(d.B_ytilde));
  CHECK(std::isinf(d.C_w));
  CHECK(d.min_of_three == d.A_delta);
  CHECK(d.min_of_three <= std::pow(std::sqrt(3.0), 3) * d.combined);
  CHECK(d.min_of_three >= d.combined);
}

TEST_CASE("quadrature config validation and refinement") {
  QuadratureConfig c;
  CHECK_NOTHROW(c.validate());
  const QuadratureConfig r = c.refined();
  CHECK(r.tau_points_per_cell == 2 * c.tau_points_per_cell);
  CHECK(r.eta_grid == 2 * c.eta_grid);
  c.j_min = 3;
  c.j_max = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  QuadratureConfig s;
  s.oscillation_safety = 0.5;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("sampled pairs are reproducible") {
  SamplerSpec spec;
  spec.count = 5;
  spec.seed = 3;
  const auto a = sample_pairs(2, spec);
  const auto b = sample_pairs(2, spec);
  REQUIRE(a.size() == 5);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].p == b[i].p);
    CHECK(a[i].q == b[i].q);
  }
}

TEST_CASE("sweep rows: duplicates are identical and diagonal pairs carry an error") {
  std::vector<PointPair> pairs{{pt(0.3, 0.0, 0.1), pt(-0.5, 0.4, 0.0)},
                               {pt(0.2, 0.2, 0.2), pt(0.2, 0.2, 0.2)},
                               {pt(0.3, 0.0, 0.1), pt(-0.5, 0.4, 0.0)}};
  const SweepTable t = main_theorem_sweep(kSq, pairs);
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].estimate.value == t.rows[2].estimate.value);
  CHECK(t.rows[0].ratio == t.rows[2].ratio);
  CHECK(t.rows[1].error == "on-diagonal evaluation");
  CHECK(t.rows[0].bounds.combined <= t.rows[0].bounds.min_of_three);
  CHECK(t.to_csv().find("on-diagonal evaluation") != std::string::npos);
}

TEST_CASE("sweep CSV does not depend on the thread count") {
  SamplerSpec spec;
  spec.count = 4;
  spec.seed = 11;
  const auto pairs = sample_pairs(1, spec);
  kernels::set_threads(1);
  const std::string one = main_theorem_sweep(kSq, pairs).to_csv();
  kernels::set_threads(4);
  const std::string four = main_theorem_sweep(kSq, pairs).to_csv();
  kernels::set_threads(0);
  CHECK(one == four);
}

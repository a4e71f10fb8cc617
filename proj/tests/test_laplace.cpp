#include "doctest.h"

#include <cmath>
#include <numbers>

#include "szego/laplace.hpp"
#include "szego/quadrature.hpp"

using namespace szego;

namespace {
Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}
const Polynomial kSq(1, {{{2}, 1.0}});
const Polynomial kQuartic(1, {{{4}, 1.0}});
const double kSqrtPi = std::sqrt(std::numbers::pi);

// Brute-force int e^{eta . v - g(v)} dv on a box by a fine midpoint rule.
double brute_integral(const Polynomial& g, const Vec& eta, double half, int n) {
  const double h = 2 * half / n;
  double s = 0.0;
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      const Vec v = vec({-half + (i + 0.5) * h});
      s += std::exp(eta.dot(v) - g(v)) * h;
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vec v = vec({-half + (i + 0.5) * h, -half + (j + 0.5) * h});
        s += std::exp(eta.dot(v) - g(v)) * h * h;
      }
  }
  return s;
}
}  // namespace

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  const QuadratureRule r = gauss_legendre(8, 0.0, 2.0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::pow(r.nodes[i], 15);
  CHECK(s == doctest::Approx(std::pow(2.0, 16) / 16).epsilon(1e-13));
}

TEST_CASE("Filon weights integrate the interpolant against e^{ikx}") {
  const QuadratureRule r = gauss_legendre(12, 0.0, 3.0);
  const double k = 7.0;
  const auto w = filon_weights(r.nodes, 0.0, 3.0, k);
  std::complex<double> s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::cos(r.nodes[i]);
  // int_0^3 cos x e^{ikx} dx in closed form.
  const std::complex<double> I(0.0, 1.0);
  auto prim = [&](double x) {
    return 0.5 * (std::exp(I * (k + 1) * x) / (I * (k + 1)) + std::exp(I * (k - 1) * x) / (I * (k - 1)));
  };
  const std::complex<double> exact = prim(3.0) - prim(0.0);
  CHECK(std::abs(s - exact) < 1e-9);
}

TEST_CASE("Legendre transform examples") {
  const LegendreResult a = legendre(kSq, vec({2.0}));
  CHECK(a.converged);
  CHECK(a.v0[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.L == doctest::Approx(1.0).epsilon(1e-12));
  const LegendreResult z = legendre(kQuartic + kSq, vec({0.0}));
  CHECK(z.v0[0] == 0.0);
  CHECK(z.L == 0.0);
  for (int k = 1; k <= 3; ++k)
    for (double B : {1.0, 2.0}) {
      const Polynomial g(1, {{{2 * k}, B / (2 * k)}});
      const double Bt = std::pow(B, -1.0 / (2 * k - 1)) * (2 * k - 1) / (2.0 * k);
      for (double eta : {-4.0, -1.0, -0.5, 0.5, 1.0, 4.0}) {
        const double exact = Bt * std::pow(std::abs(eta), 2.0 * k / (2 * k - 1));
        CHECK(legendre(g, vec({eta})).L == doctest::Approx(exact).epsilon(1e-6));
      }
    }
}

TEST_CASE("Legendre-Young and biconjugacy") {
  for (const Polynomial& g : {kSq, kQuartic}) {
    for (double v : {-2.0, -0.3, 0.7, 1.9}) {
      const Vec vv = vec({v});
      const Vec grad = g.gradient(vv);
      CHECK(legendre(g, grad).L + g(vv) == doctest::Approx(v * grad[0]).epsilon(1e-8));
      for (double eta : {-3.0, 0.5, 2.0}) CHECK(eta * v <= g(vv) + legendre(g, vec({eta})).L + 1e-8);
    }
  }
}

TEST_CASE("Legendre lower bound") {
  CHECK(legendre_lower_bound(CombinedDegree{{1}}, 1.0, vec({0.0})) == -1.0);
  CHECK(legendre_lower_bound(CombinedDegree{{1}}, 1.0, vec({3.0})) == doctest::Approx(9.0 / 4 - 1));
  for (double eta : {-5.0, -1.0, 0.0, 2.0, 6.0})
    CHECK(legendre(kSq, vec({eta})).L >= legendre_lower_bound(CombinedDegree{{1}}, 1.0, vec({eta})));
}

TEST_CASE("theta examples") {
  CHECK(theta(kSq, vec({2.0})) == doctest::Approx(std::exp(-1.0) / kSqrtPi).epsilon(1e-6));
  CHECK(theta(kSq, vec({0.0})) == doctest::Approx(1.0 / kSqrtPi).epsilon(1e-6));
  CHECK(theta(kQuartic, vec({0.0})) == doctest::Approx(1.0 / (2.0 * std::tgamma(1.25))).epsilon(1e-6));
  const ThetaValue mid = denominator_integral(kSq, vec({30.0}));
  CHECK(mid.theta > 0.0);
  CHECK(mid.theta == doctest::Approx(std::exp(-225.0) / kSqrtPi).epsilon(1e-6));
  // e^{-900} underflows; the logarithm stays exact.
  const ThetaValue big = denominator_integral(kSq, vec({60.0}));
  CHECK(big.log_I == doctest::Approx(900.0 + std::log(kSqrtPi)).epsilon(1e-9));
}

TEST_CASE("factored integral matches brute force") {
  const Polynomial g1(1, {{{2}, 1.0}, {{3}, 0.5}, {{4}, 1.0}});
  for (double eta : {-4.0, -1.0, 0.0, 2.5, 4.0}) {
    const ThetaValue t = denominator_integral(g1, vec({eta}));
    CHECK(t.I == doctest::Approx(brute_integral(g1, vec({eta}), 8.0, 200000)).epsilon(1e-4));
  }
  const Polynomial g2(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}});
  for (const Vec& eta : {vec({0.0, 0.0}), vec({1.5, -2.0}), vec({-4.0, 3.0})}) {
    const ThetaValue t = denominator_integral(g2, eta);
    CHECK(t.I == doctest::Approx(brute_integral(g2, eta, 8.0, 1600)).epsilon(1e-4));
  }
}

TEST_CASE("centred remainder vanishes to first order") {
  const Polynomial g(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}});
  const LegendreResult r = legendre(g, vec({1.0, -2.0}));
  const Polynomial f = centred_remainder(g, r.v0);
  CHECK(f(vec({0.0, 0.0})) == 0.0);
  CHECK(f.gradient(vec({0.0, 0.0})).norm() == 0.0);
  for (int k = 0; k < 20; ++k) CHECK(f(vec({std::sin(k * 0.9), std::cos(k * 1.3)})) >= 0.0);
}

TEST_CASE("v0 growth") {
  std::vector<Vec> etas;
  for (double e : {0.0, 1.0, 2.0, 4.0, 8.0}) etas.push_back(vec({e}));
  const GrowthReport sq = v0_growth_diagnostic(kSq, etas);
  CHECK(sq.slope == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sq.rows[0].second == 0.0);
  const GrowthReport q = v0_growth_diagnostic(kQuartic, etas);
  for (const auto& [e, v] : q.rows) CHECK(v == doctest::Approx(std::cbrt(e / 4)).epsilon(1e-9));
}

TEST_CASE("decay report for v^2") {
  std::vector<Vec> etas;
  for (int i = 0; i <= 20; ++i) etas.push_back(vec({0.5 * i}));
  const DecayReport r = theta_decay_report(kSq, CombinedDegree{{1}}, etas);
  CHECK(r.c == doctest::Approx(0.25).epsilon(1e-4));
  CHECK(r.to_csv().rfind("eta_norm,theta,log_theta,r_eta", 0) == 0);
}

TEST_CASE("decay exponent fit recovers a synthetic law") {
  std::vector<double> s, lt;
  for (int i = 0; i < 25; ++i) {
    const double x = 2.0 + 6.0 * i / 24;
    s.push_back(x);
    lt.push_back(-(0.7 * std::pow(x, 4.0 / 3.0) + 0.5 * std::log(x) + 0.2));
  }
  const ExponentFit f = fit_decay_exponent(s, lt);
  CHECK(f.exponent == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(f.coefficient == doctest::Approx(0.7).epsilon(1e-5));
}

TEST_CASE("theta grids agree across methods and thread counts") {
  const Polynomial g(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}, {{1, 1}, 0.3}});
  std::vector<double> ax;
  for (int i = 0; i < 17; ++i) ax.push_back(-6.0 + 0.75 * i);
  const std::vector<std::vector<double>> nodes{ax, ax};
  const ThetaGrid s = theta_grid_serial(g, nodes);
  const ThetaGrid p = theta_grid_parallel(g, nodes);
  CHECK(s.theta == p.theta);
  const ThetaGrid t = theta_grid_transform(g, nodes);
  double mx = 0.0;
  for (double v : s.theta) mx = std::max(mx, v);
  for (std::size_t i = 0; i < s.theta.size(); ++i) CHECK(std::abs(t.theta[i] - s.theta[i]) <= 1e-5 * mx);
  for (std::size_t i = 0; i < s.theta.size(); ++i) {
    const Vec eta = vec({ax[i / ax.size()], ax[i % ax.size()]});
    CHECK(s.theta[i] == doctest::Approx(theta(g, eta)).epsilon(1e-6));
  }
}

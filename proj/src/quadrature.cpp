#include "szego/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace szego {

namespace {

QuadratureRule reference_rule(int order) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(order); it != cache.end()) return it->second;

  QuadratureRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  // Newton iteration on P_n from the Chebyshev-like initial guess.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p1 = x, p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[order - 1 - i] = x;
    r.weights[i] = w;
    r.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) r.nodes[order / 2] = 0.0;
  cache.emplace(order, r);
  return r;
}

}  // namespace

QuadratureRule gauss_legendre(int order, double a, double b) {
  if (order < 1) throw std::invalid_argument("quadrature order must be positive");
  QuadratureRule r = reference_rule(order);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < order; ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  const std::size_t n = nodes.size();
  std::vector<double> w(n, 1.0);
  // scale by the interval length to keep the products O(1)
  double lo = nodes[0], hi = nodes[0];
  for (double x : nodes) lo = std::min(lo, x), hi = std::max(hi, x);
  const double scale = (hi > lo) ? 4.0 / (hi - lo) : 1.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) w[j] /= (nodes[j] - nodes[k]) * scale;
  return w;
}

std::vector<std::complex<double>> filon_weights(std::span<const double> nodes, double a, double b,
                                                double k) {
  const std::size_t n = nodes.size();
  const std::vector<double> bw = barycentric_weights(nodes);
  // Resolve the basis polynomials (degree n-1) and the oscillation exactly
  // enough with a fine Gauss rule.
  const double cycles = std::abs(k) * (b - a) / (2.0 * std::numbers::pi);
  const int fine = static_cast<int>(n) + 8 + static_cast<int>(std::ceil(4.0 * cycles));
  const int panels = std::max(1, fine / 64 + 1);
  const int per_panel = std::min(fine, 96);
  std::vector<std::complex<double>> w(n, {0.0, 0.0});
  std::vector<double> basis(n);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule q = gauss_legendre(per_panel, a + p * h, a + (p + 1) * h);
    for (std::size_t m = 0; m < q.nodes.size(); ++m) {
      const double x = q.nodes[m];
      double den = 0.0;
      std::size_t hit = n;
      for (std::size_t j = 0; j < n; ++j) {
        const double d = x - nodes[j];
        if (d == 0.0) {
          hit = j;
          break;
        }
        basis[j] = bw[j] / d;
        den += basis[j];
      }
      const std::complex<double> phase = std::polar(q.weights[m], k * x);
      if (hit < n) {
        w[hit] += phase;
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) w[j] += phase * (basis[j] / den);
    }
  }
  return w;
}

}  // namespace szego

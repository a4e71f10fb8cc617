#pragma once

#include <complex>
#include <span>
#include <vector>

namespace szego {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [a, b]. Reference rules on
/// [-1, 1] are cached per order.
QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

/// Barycentric weights for interpolation through arbitrary distinct nodes.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Barycentric Lagrange interpolation of (nodes, values) at x.
template <class T>
T barycentric_eval(std::span<const double> nodes, std::span<const double> bw,
                   std::span<const T> values, double x) {
  T num{};
  double den = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double d = x - nodes[j];
    if (d == 0.0) return values[j];
    const double c = bw[j] / d;
    num += c * values[j];
    den += c;
  }
  return num / den;
}

/// Weights W_j = int_a^b l_j(x) exp(i k x) dx for the Lagrange basis l_j on the
/// given nodes, so that sum_j W_j f(x_j) integrates the polynomial
/// interpolant of f against the oscillatory factor exactly up to round-off.
std::vector<std::complex<double>> filon_weights(std::span<const double> nodes, double a, double b,
                                                double k);

}  // namespace szego

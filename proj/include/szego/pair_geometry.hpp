#pragma once

#include <string>

#include "szego/polynomial.hpp"

namespace szego {

/// A point (x, y, t) on the boundary of the model domain:
/// x = Re z_{1..n}, y = Im z_{1..n}, t = Re z_{n+1}.
struct BoundaryPoint {
  Vec x;
  Vec y;
  double t = 0.0;

  int dim() const { return static_cast<int>(x.size()); }
  bool operator==(const BoundaryPoint& o) const { return x == o.x && y == o.y && t == o.t; }
};

/// The triple (b~, delta, w) and gamma = y - y' attached to a pair of points.
struct PairData {
  Polynomial b_tilde;
  double delta = 0.0;
  double w = 0.0;
  Vec gamma;
};

/// b(v + m) - grad b(m) . v - b(m), m = (x + x') / 2, with the constant and
/// linear coefficients set to zero exactly.
Polynomial tilde_b(const Polynomial& b, const Vec& x, const Vec& x_prime);

/// b(x) + b(x') - 2 b((x + x') / 2), summed with compensation.
double delta(const Polynomial& b, const Vec& x, const Vec& x_prime);

/// (t' - t) + grad b((x + x') / 2) . (y' - y).
double w_offset(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime);

PairData pair_data(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime);

/// Parses `x=[..] y=[..] t=..`.
BoundaryPoint parse_boundary_point(const std::string& record);
std::string format_boundary_point(const BoundaryPoint& p);

}  // namespace szego

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "szego/convex_geometry.hpp"
#include "szego/laplace.hpp"
#include "szego/pair_geometry.hpp"

namespace szego {

enum class InnerMethod { Transform, Laplace };

struct QuadratureConfig {
  int j_min = -4;               // initial dyadic range in tau * scale; extended adaptively
  int j_max = 3;
  int tau_points_per_cell = 8;  // Gauss-Legendre nodes in log tau per dyadic cell
  double eta_radius = 0.0;      // <= 0: sized from the measured decay of theta
  int eta_grid = 48;            // nodes per axis of the eta tensor grid
  double v_tol = 1e-6;
  std::uint64_t seed = 20240611;
  double oscillation_safety = 0.25;
  bool rescale = true;          // false keeps v unscaled (cross-check path)
  bool parallel = true;
  EllipsoidConfig ellipsoid;
  ThetaConfig theta;
  InnerMethod inner = InnerMethod::Transform;  // Laplace: per-point factored form
  double inner_tol = 1e-7;
  VolumeConfig volume{VolumeMethod::Radial, 1'000'000, 512, 256, 20240611};

  void validate() const;
  /// Doubles the tau and eta orders.
  QuadratureConfig refined() const;
};

struct KernelEstimate {
  std::complex<double> value;
  double abs = 0.0;
  double err = 0.0;
  int cells_used = 0;
  bool converged = true;
};

struct BoundReport {
  double A_delta = 0.0;
  double B_ytilde = 0.0;
  double C_w = 0.0;
  double combined = 0.0;
  double min_of_three = 0.0;
};

/// (4 pi)^{-n} |det Q|^{-2} int theta_g(xi) e^{i xi . Q^{-1} gamma / 2} dxi with
/// g(u) = 4 pi tau b~(Q u); the inner eta integral at one tau.
std::complex<double> eta_transform(const Polynomial& b_tilde, const Vec& gamma, double tau,
                                   const QuadratureConfig& cfg);

KernelEstimate szego_eval(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime,
                          const QuadratureConfig& cfg = {});

/// Closed form for b(x) = sum a_i x_i^2:
/// (prod 2 a_i) n! / (2 pi delta + pi b~(gamma) + 2 pi i w)^{n+1}.
std::complex<double> quadratic_oracle(const Vec& a, const BoundaryPoint& p, const BoundaryPoint& p_prime);

/// 1 / (rho |{b~ < rho}|^2), rho = sqrt(delta^2 + b~(gamma)^2 + w^2).
double bound_rhs(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime,
                 const QuadratureConfig& cfg = {});

BoundReport bound_components(const Polynomial& b, const BoundaryPoint& p,
                             const BoundaryPoint& p_prime, const QuadratureConfig& cfg = {});

struct PointPair {
  BoundaryPoint p;
  BoundaryPoint q;
};

struct SamplerSpec {
  int count = 20;
  std::uint64_t seed = 20240611;
  double x_lo = -1.0, x_hi = 1.0;
  double y_lo = -1.0, y_hi = 1.0;
  double t_lo = -1.0, t_hi = 1.0;
};

std::vector<PointPair> sample_pairs(int n, const SamplerSpec& spec);

struct SweepRow {
  int pair_id = 0;
  double delta = 0.0;
  double btilde_gamma = 0.0;
  double w = 0.0;
  KernelEstimate estimate;
  BoundReport bounds;
  double ratio = 0.0;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  double max_ratio = 0.0;
  std::string to_csv() const;
};

SweepTable main_theorem_sweep(const Polynomial& b, const std::vector<PointPair>& pairs,
                              const QuadratureConfig& cfg = {});

/// Max ratio before and after one refinement; stable when within a factor 2.
struct SweepStability {
  SweepTable base;
  SweepTable refined;
  double change = 0.0;  // max(refined/base, base/refined)
  bool stable = false;
};

SweepStability sweep_with_refinement(const Polynomial& b, const std::vector<PointPair>& pairs,
                                     const QuadratureConfig& cfg = {});

}  // namespace szego

#pragma once

#include <string>
#include <vector>

#include "szego/polynomial.hpp"

namespace szego {

struct LegendreConfig {
  double tol = 1e-10;  // gradient norm relative to 1 + |eta|
  int max_iterations = 200;
};

struct LegendreResult {
  Vec v0;
  double L = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// sup_v { eta . v - g(v) } by damped Newton on g(v) - eta . v.
/// Starts from v = 0 unless a warm start is given.
LegendreResult legendre(const Polynomial& g, const Vec& eta, const LegendreConfig& cfg = {},
                        const Vec* warm_start = nullptr);

/// C~ sum_i |eta_i|^{2 m_i / (2 m_i - 1)} - C_dom with
/// C~ = min_j (C_dom 2 m_j)^{-1/(2 m_j - 1)} (2 m_j - 1) / (2 m_j).
double legendre_lower_bound(const CombinedDegree& m, double c_dom, const Vec& eta);

struct ThetaConfig {
  LegendreConfig legendre;
  double tol = 1e-6;        // relative change between successive orders of the J rule
  double cutoff = 40.0;     // box boundary sits where f >= cutoff
  int min_order = 16;
  int max_order = 0;        // 0 picks 512 / 128 / 48 for n = 1 / 2 / 3
  int fixed_order = 0;      // > 0 skips the adaptive loop
  int box_directions = 0;   // 0 picks 2 / 16 / 26 rays
};

struct ThetaValue {
  double theta = 0.0;
  double I = 0.0;           // e^L J; may overflow to inf, log_I stays finite
  double log_I = 0.0;
  double factor_exp = 0.0;  // e^L
  double factor_vol = 0.0;  // J
  Vec v0;
  double L = 0.0;
  int order = 0;
  int sufficient_order = 0;  // lowest order whose value was already within tol
  bool converged = false;
};

/// int e^{eta . v - g(v)} dv = e^{L(eta)} J, J = int e^{-f}, with the
/// centred remainder f(w) = g(v0 + w) - g(v0) - grad g(v0) . w.
ThetaValue denominator_integral(const Polynomial& g, const Vec& eta, const ThetaConfig& cfg = {},
                                const Vec* warm_start = nullptr);

double theta(const Polynomial& g, const Vec& eta, const ThetaConfig& cfg = {});

/// The centred remainder f at v0, as a polynomial with no constant or linear part.
Polynomial centred_remainder(const Polynomial& g, const Vec& v0);

struct DecayRow {
  double eta_norm = 0.0;
  double theta = 0.0;
  double log_theta = 0.0;
  double r_eta = 0.0;  // sum_i |eta_i|^{2 m_i / (2 m_i - 1)}
};

struct ExponentFit {
  double exponent = 0.0;    // p in -log theta = c s^p + b log s + a
  double coefficient = 0.0; // c
  double log_weight = 0.0;  // b
  double raw_slope = 0.0;   // slope of log(-log theta) on log s
};

/// Fits the decay exponent of theta along a ray from samples (s, log theta).
/// The log s term absorbs the polynomial prefactor 1/J.
ExponentFit fit_decay_exponent(const std::vector<double>& s, const std::vector<double>& log_theta);

struct DecayReport {
  std::vector<DecayRow> rows;
  double c = 0.0;            // log theta ~ -c r_eta + const on the upper half
  double intercept = 0.0;
  double rms_residual = 0.0;
  std::string to_csv() const;
};

DecayReport theta_decay_report(const Polynomial& g, const CombinedDegree& m,
                               const std::vector<Vec>& etas, const ThetaConfig& cfg = {});

struct GrowthReport {
  std::vector<std::pair<double, double>> rows;  // (|eta|, |v0|)
  double slope = 0.0;
  double intercept = 0.0;
  std::string to_csv() const;
};

GrowthReport v0_growth_diagnostic(const Polynomial& g, const std::vector<Vec>& etas,
                                  const LegendreConfig& cfg = {});

/// theta on the tensor grid axis_nodes[0] x ... x axis_nodes[n-1], flattened
/// with the last axis fastest. Each row along the last axis is solved with
/// warm-started Newton; rows are independent.
struct ThetaGrid {
  std::vector<double> theta;
  int order = 0;
  bool converged = true;
};

ThetaGrid theta_grid_serial(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                            const ThetaConfig& cfg = {});
ThetaGrid theta_grid_parallel(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                              const ThetaConfig& cfg = {});

struct TransformConfig {
  double tol = 1e-7;        // max change of theta between v-grid sizes, relative to max theta
  double relevance = 20.0;  // points with L(eta) above this use the factored form
  int far_order = 0;        // J order for those points; 0 uses the Gaussian approximation
  int min_nodes = 0;        // v-grid nodes per axis; 0 picks 64 / 48 / 24 for n = 1 / 2 / 3
  int max_nodes = 0;        // 0 picks 2048 / 384 / 96
  ThetaConfig theta;
};

/// theta on the same tensor grid as theta_grid_serial, with the integral
/// I(eta) = sum_v w(v) e^{-g(v)} e^{eta . v} on one shared v-grid, contracted
/// one axis at a time. The v-grid is refined until theta settles.
ThetaGrid theta_grid_transform(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                               const TransformConfig& cfg = {});

}  // namespace szego

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "szego/convex_geometry.hpp"
#include "szego/laplace.hpp"
#include "szego/polynomial.hpp"

namespace szego {

struct CorpusEntry {
  std::string name;
  Polynomial g;
  CombinedDegree m;
  std::vector<std::string> tags;
};

/// Convex test polynomials of combined degree with g(0) = 0, grad g(0) = 0.
struct Corpus {
  std::vector<CorpusEntry> entries;
  std::uint64_t seed = 20240611;

  /// Classifies and checks every polynomial; throws ConfigError on a bad entry.
  static Corpus make(const std::vector<std::pair<std::string, Polynomial>>& polys,
                     std::uint64_t seed = 20240611);
  static Corpus default_corpus(std::uint64_t seed = 20240611);

  Corpus one_variable() const;
  /// FNV-1a over the seed and the text form of every entry, as 16 hex digits.
  std::string hash() const;
};

struct SuiteFailure {
  std::string case_name;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::string corpus_hash;
  int cases = 0;
  std::vector<SuiteFailure> failures;
  std::map<std::string, double> constants;

  bool passed() const { return failures.empty(); }
  bool constants_finite() const;
  std::string to_json() const;
};

struct VerifyConfig {
  int sphere_order = 64;           // nodes on the circle; per angle for n = 3
  int sample_points = 2000;        // random sphere points for the lower coefficient check
  double coefficient_radius = 1.0;
  int bnw_points = 1001;           // t-grid on [0, bnw_t_max]
  double bnw_t_max = 10.0;
  VolumeConfig volume;             // scaling check (Monte Carlo by default)
  std::vector<double> lambdas{0.25, 0.5, 0.75};
  std::vector<double> levels{0.5, 1.0, 2.0};
  ThetaConfig theta;
  double decay_lo = 2.0;
  double decay_hi = 8.0;
  int decay_points = 25;
  double dominance = 0.9;          // the window grows by 4x until the top pure power carries this share of g at v0
  double decay_exponent_tol = 0.05;
  double perturbation = 0.3;       // weight of sum v_i^2 added to form the perturbed variant
  double decay_constant_factor = 3.0;
  std::uint64_t seed = 20240611;
};

/// Surface-normalised mean of g over the sphere of radius a.
double sphere_average(const Polynomial& g, double a, const VerifyConfig& cfg = {});

SuiteReport coeff_bound_suite(const Corpus& corpus, double a, const VerifyConfig& cfg = {});
SuiteReport bnw_suite(const Corpus& corpus, const VerifyConfig& cfg = {});
SuiteReport appendix_suite(const Corpus& corpus, const VerifyConfig& cfg = {});
SuiteReport decay_suite(const Corpus& corpus, const VerifyConfig& cfg = {});

/// b~ composed with the tau = 1 rescaling: g(u) = b~(Q u), Q = axes diag(mu).
/// When g is even in every coordinate, or the inscribed ellipsoid is axis-aligned,
/// Q is the diagonal c* diag(A)^{-1/2}.
Polynomial normalised(const Polynomial& g, const EllipsoidConfig& cfg = {});

struct RayDecay {
  int axis = 0;
  double expected = 0.0;  // 2 m / (2 m - 1)
  double window_scale = 1.0;
  ExponentFit fit;
};

/// Smallest power of 4 by which [decay_lo, decay_hi] is scaled so that along
/// axis i the pure power c v_i^{2 m_i} carries cfg.dominance of g at v0.
double decay_window_scale(const Polynomial& g, int axis, const VerifyConfig& cfg = {});

/// Exponent fits of theta along the positive coordinate axes for s in
/// scale * [lo, hi]; scales default to decay_window_scale per axis.
std::vector<RayDecay> axis_decay(const Polynomial& g, const VerifyConfig& cfg = {},
                                 const std::vector<double>& scales = {});

}  // namespace szego

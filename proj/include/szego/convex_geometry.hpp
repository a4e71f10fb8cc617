#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "szego/polynomial.hpp"

namespace szego {

/// {v : g(v) <= level} for a convex g with g(0) = 0.
struct SublevelSet {
  Polynomial g;
  double level = 1.0;

  bool contains(const Vec& v) const { return g(v) <= level; }
  int dim() const { return g.dim(); }
};

/// Origin-centred ellipsoid {v : v^T A v <= 1}.
struct Ellipsoid {
  Mat shape;
  Vec semi_axes;  // descending
  Mat axes;       // column i is the direction of semi_axes[i]
  bool converged = true;
  int iterations = 0;

  int dim() const { return static_cast<int>(shape.rows()); }
  double gauge(const Vec& v) const { return std::sqrt(v.dot(shape * v)); }
  double volume() const;
};

Ellipsoid make_ellipsoid(const Mat& shape);

struct MuFactors {
  Vec mu;              // c* times the semi-axes of the inscribed ellipsoid, descending
  Mat axes;            // orthonormal directions matching mu
  double sandwich_outer = 1.0;  // c*: R is inside c* E on the sampled boundary
  Ellipsoid ellipsoid;
};

enum class VolumeMethod { MonteCarlo, Grid, Radial };

std::string to_string(VolumeMethod m);
VolumeMethod volume_method_from_string(const std::string& s);

struct VolumeConfig {
  VolumeMethod method = VolumeMethod::MonteCarlo;
  std::size_t samples = 1'000'000;
  int grid_points = 512;       // per axis, Grid method
  int radial_order = 64;       // sphere quadrature order, Radial method
  std::uint64_t seed = 20240611;
};

struct VolumeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  VolumeMethod method = VolumeMethod::MonteCarlo;
};

struct EllipsoidConfig {
  int directions = 0;     // antipodal direction pairs; 0 picks 64 (n=2) or 256 (n=3)
  int check_points = 0;   // boundary samples for the shrink step; 0 picks a default
  int max_iterations = 20000;
  double tolerance = 1e-10;  // optimality gap of the max-det ascent
};

/// Distance from the origin to the boundary of the set along unit u.
double ray_distance(const SublevelSet& s, const Vec& u, double hint = 1.0);

/// Radius of a ball containing the set, by radius doubling over sampled rays.
/// Throws NotCombinedDegree when g is not of combined degree.
double bounding_radius(const SublevelSet& s, int n_dirs = 32);

VolumeEstimate sublevel_volume(const SublevelSet& s, const VolumeConfig& cfg = {});

/// max(d+, d-) / min(d+, d-) along +-direction; always >= 1.
double ray_ratio(const SublevelSet& s, const Vec& direction);

/// Inscribed ellipsoid of R and -R, shrunk until the sampled ellipsoid
/// boundary lies inside R.
Ellipsoid john_ellipsoid(const SublevelSet& s, const EllipsoidConfig& cfg = {});

/// Largest gauge of sampled boundary points of R with respect to e.
double outer_dilation(const SublevelSet& s, const Ellipsoid& e, int check_points = 0);

MuFactors mu_factors(const Polynomial& b_tilde, double tau, const EllipsoidConfig& cfg = {});

struct ScalingCheck {
  double vol_lambda_x = 0.0;
  double vol_x = 0.0;
  bool holds = false;
};

/// vol{f <= lambda x} >= lambda^n vol{f <= x}, with 3-sigma Monte Carlo slack.
ScalingCheck scaling_check(const Polynomial& f, double x, double lambda, const VolumeConfig& cfg = {});

struct ExpIntegralEquiv {
  double integral = 0.0;
  double volume = 0.0;
  double ratio = 0.0;
  double upper_bound = 0.0;  // 1 + sum_{j=1}^{50} e^{-j} (j+1)^n
  bool holds = false;
};

/// Sum_{j=1}^{terms} e^{-j} (j+1)^n + 1.
double exp_integral_upper_bound(int n, int terms = 50);

/// int e^{-f} over R^n by shell quadrature versus vol{f <= 1}.
ExpIntegralEquiv exp_integral_equiv(const Polynomial& f, const VolumeConfig& cfg = {});

/// Quadrature nodes on the unit sphere S^{n-1}, n <= 3. Weights sum to the
/// sphere's surface measure (2 for n = 1).
struct SphereRule {
  std::vector<Vec> points;
  std::vector<double> weights;
};
SphereRule sphere_rule(int n, int order);

/// Direction sets used for ray sampling: antipodal representatives.
std::vector<Vec> hemisphere_directions(int n, int count);

/// Unit ball volume in R^n.
double unit_ball_volume(int n);

}  // namespace szego

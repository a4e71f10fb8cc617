#include "szego/convex_geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "szego/parallel.hpp"
#include "szego/quadrature.hpp"
#include "szego/random.hpp"

namespace szego {

double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double Ellipsoid::volume() const {
  double v = unit_ball_volume(dim());
  for (Eigen::Index i = 0; i < semi_axes.size(); ++i) v *= semi_axes[i];
  return v;
}

Ellipsoid make_ellipsoid(const Mat& shape) {
  Ellipsoid e;
  e.shape = 0.5 * (shape + shape.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(e.shape);
  const Eigen::Index n = e.shape.rows();
  e.semi_axes.resize(n);
  e.axes.resize(n, n);
  // ascending eigenvalues give descending semi-axes
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lam = es.eigenvalues()[i];
    if (!(lam > 0.0)) throw Error("ellipsoid shape matrix is not positive definite");
    e.semi_axes[i] = 1.0 / std::sqrt(lam);
    e.axes.col(i) = es.eigenvectors().col(i);
  }
  return e;
}

std::string to_string(VolumeMethod m) {
  switch (m) {
    case VolumeMethod::MonteCarlo: return "mc";
    case VolumeMethod::Grid: return "grid";
    case VolumeMethod::Radial: return "radial";
  }
  return "mc";
}

VolumeMethod volume_method_from_string(const std::string& s) {
  if (s == "mc") return VolumeMethod::MonteCarlo;
  if (s == "grid") return VolumeMethod::Grid;
  if (s == "radial") return VolumeMethod::Radial;
  throw ConfigError("unknown volume method '" + s + "' (want mc, grid or radial)");
}

// ---------------------------------------------------------------------------
// direction sets

std::vector<Vec> hemisphere_directions(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs.push_back(Vec::Ones(1));
    return dirs;
  }
  count = std::max(count, 1);
  if (n == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = std::numbers::pi * k / count;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
    return dirs;
  }
  if (n == 3) {
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = (k + 0.5) / count;
      const double r = std::sqrt(1.0 - z * z);
      Vec u(3);
      u << r * std::cos(golden * k), r * std::sin(golden * k), z;
      dirs.push_back(u);
    }
    return dirs;
  }
  throw Error("direction sampling supports n <= 3");
}

namespace {

std::vector<Vec> sphere_directions(int n, int count) {
  std::vector<Vec> half = hemisphere_directions(n, std::max(1, count / 2));
  std::vector<Vec> all;
  all.reserve(half.size() * 2);
  for (const Vec& u : half) {
    all.push_back(u);
    all.push_back(-u);
  }
  return all;
}

}  // namespace

SphereRule sphere_rule(int n, int order) {
  SphereRule r;
  if (n == 1) {
    r.points = {Vec::Ones(1), -Vec::Ones(1)};
    r.weights = {1.0, 1.0};
    return r;
  }
  if (n == 2) {
    const int m = std::max(order, 3);
    for (int k = 0; k < m; ++k) {
      const double a = 2.0 * std::numbers::pi * k / m;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      r.points.push_back(u);
      r.weights.push_back(2.0 * std::numbers::pi / m);
    }
    return r;
  }
  if (n == 3) {
    const int p = std::max(order / 2, 2);
    const QuadratureRule z = gauss_legendre(p, -1.0, 1.0);
    const int m = 2 * p;
    for (int i = 0; i < p; ++i) {
      const double s = std::sqrt(1.0 - z.nodes[i] * z.nodes[i]);
      for (int k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * (k + 0.5 * (i % 2)) / m;
        Vec u(3);
        u << s * std::cos(a), s * std::sin(a), z.nodes[i];
        r.points.push_back(u);
        r.weights.push_back(z.weights[i] * 2.0 * std::numbers::pi / m);
      }
    }
    return r;
  }
  throw Error("sphere quadrature supports n <= 3");
}

// ---------------------------------------------------------------------------
// rays

double ray_distance(const SublevelSet& s, const Vec& u, double hint) {
  if (!(s.level > 0.0)) throw Error("sublevel: level must be positive");
  double lo = 0.0;
  double hi = (hint > 0.0 && std::isfinite(hint)) ? hint : 1.0;
  // bracket
  while (s.g(hi * u) <= s.level) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e150) throw Error("sublevel set is unbounded along a sampled ray");
  }
  if (lo == 0.0) {
    // shrink the upper end to within a factor two of the root
    while (hi > 1e-150 && s.g(0.5 * hi * u) > s.level) hi *= 0.5;
    lo = 0.5 * hi;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (s.g(mid * u) <= s.level)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double ray_ratio(const SublevelSet& s, const Vec& direction) {
  const double nrm = direction.norm();
  if (!(nrm > 0.0)) throw Error("ray_ratio: zero direction");
  const Vec u = direction / nrm;
  const double dp = ray_distance(s, u);
  const double dm = ray_distance(s, -u, dp);
  return std::max(dp, dm) / std::min(dp, dm);
}

double bounding_radius(const SublevelSet& s, int n_dirs) {
  if (!combined_degree(s.g))
    throw NotCombinedDegree("not combined degree: sublevel set compactness is not guaranteed");
  if (!(s.level > 0.0)) throw Error("sublevel: level must be positive");
  const int n = s.dim();
  std::vector<Vec> dirs;
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  for (const Vec& u : sphere_directions(n, 2 * n * n_dirs)) dirs.push_back(u);
  auto exceeds = [&](double r) {
    for (const Vec& u : dirs)
      if (s.g(r * u) <= s.level) return false;
    return true;
  };
  double r = 1.0;
  if (exceeds(r)) {
    while (r > 1e-150 && exceeds(0.5 * r)) r *= 0.5;
  } else {
    while (!exceeds(r)) {
      r *= 2.0;
      if (r > 1e150) throw Error("sublevel set appears unbounded");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// volumes

namespace {

double radial_volume(const SublevelSet& s, int order) {
  const int n = s.dim();
  const SphereRule rule = sphere_rule(n, order);
  double v = 0.0;
  double hint = 1.0;
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    const double d = ray_distance(s, rule.points[k], hint);
    hint = d;
    v += rule.weights[k] * std::pow(d, n);
  }
  return v / n;
}

}  // namespace

VolumeEstimate sublevel_volume(const SublevelSet& s, const VolumeConfig& cfg) {
  if (!(s.level > 0.0)) throw Error("sublevel_volume: level must be positive");
  if (s.level < 1e-300) throw Error("sublevel_volume: level underflows");
  const int n = s.dim();
  VolumeEstimate est;
  est.method = cfg.method;
  if (cfg.method == VolumeMethod::Radial) {
    est.value = radial_volume(s, cfg.radial_order);
    return est;
  }
  const double rho = bounding_radius(s);
  const double box = std::pow(2.0 * rho, n);
  if (cfg.method == VolumeMethod::Grid) {
    const int m = std::max(cfg.grid_points, 2);
    const double h = 2.0 * rho / m;
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m);
    std::size_t hits = 0;
    Vec v(n);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      for (int i = 0; i < n; ++i) {
        v[i] = -rho + h * (static_cast<double>(rem % m) + 0.5);
        rem /= m;
      }
      if (s.g(v) <= s.level) ++hits;
    }
    est.value = box * static_cast<double>(hits) / static_cast<double>(total);
    return est;
  }
  const std::size_t samples = std::max<std::size_t>(cfg.samples, 1);
  const std::size_t hits = kernels::count_inside_parallel(s, rho, samples, cfg.seed);
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  est.value = box * p;
  est.std_error = box * std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(samples));
  // A zero-variance estimate would claim exactness; floor at one-sample resolution.
  if (est.std_error == 0.0) est.std_error = box / static_cast<double>(samples);
  return est;
}

// ---------------------------------------------------------------------------
// John ellipsoid

namespace {

// Symmetrised radius along u: min of the two boundary distances.
struct SymRay {
  double radius;
  Vec point;   // boundary point of R or -R along u
  Vec normal;  // outward normal of the binding body at point
};

SymRay symmetric_ray(const SublevelSet& s, const Vec& u, double hint) {
  const double dp = ray_distance(s, u, hint);
  const double dm = ray_distance(s, -u, dp);
  SymRay r;
  if (dp <= dm) {
    r.radius = dp;
    r.point = dp * u;
    r.normal = s.g.gradient(r.point);
  } else {
    // dm * u lies on the boundary of -R = {x : g(-x) <= level}
    r.radius = dm;
    r.point = dm * u;
    r.normal = -s.g.gradient(Vec(-r.point));
  }
  return r;
}

// Parametrisation of the unit sphere for local refinement.
Vec sphere_point(int n, const std::array<double, 2>& p) {
  Vec u(n);
  if (n == 2) {
    u << std::cos(p[0]), std::sin(p[0]);
  } else {
    u << std::sin(p[0]) * std::cos(p[1]), std::sin(p[0]) * std::sin(p[1]), std::cos(p[0]);
  }
  return u;
}

std::array<double, 2> sphere_params(const Vec& u) {
  if (u.size() == 2) return {std::atan2(u[1], u[0]), 0.0};
  return {std::acos(std::clamp(u[2], -1.0, 1.0)), std::atan2(u[1], u[0])};
}

// Golden-section minimisation of f over one parameter around p[k].
template <class F>
double golden_1d(F&& f, std::array<double, 2>& p, int k, double halfwidth) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = p[k] - halfwidth, b = p[k] + halfwidth;
  auto at = [&](double x) {
    auto q = p;
    q[k] = x;
    return f(q);
  };
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = at(c), fd = at(d);
  for (int it = 0; it < 40; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a);
      fc = at(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a);
      fd = at(d);
    }
  }
  const double best_x = fc < fd ? c : d;
  const double best_f = std::min(fc, fd);
  const double f0 = f(p);
  if (best_f < f0) {
    p[k] = best_x;
    return best_f;
  }
  return f0;
}

// Minimises f(unit vector) locally around u with the given angular radius.
template <class F>
double refine_on_sphere(int n, F&& f, const Vec& u, double radius) {
  auto fp = [&](const std::array<double, 2>& p) { return f(sphere_point(n, p)); };
  auto p = sphere_params(u);
  double best = fp(p);
  const int params = n == 2 ? 1 : 2;
  double h = radius;
  for (int round = 0; round < 3; ++round) {
    for (int k = 0; k < params; ++k) best = std::min(best, golden_1d(fp, p, k, h));
    h *= 0.5;
  }
  return best;
}

// Khachiyan / Todd-Yildirim ascent for the minimum-volume origin-centred
// ellipsoid around +-a_k. Returns M = sum u_k a_k a_k^T.
Mat max_det_weights(const std::vector<Vec>& a, int n, int max_iter, double tol, bool& converged,
                    int& iterations) {
  const std::size_t m = a.size();
  std::vector<double> u(m, 1.0 / static_cast<double>(m));
  std::vector<double> kappa(m);
  Mat M(n, n);
  converged = false;
  iterations = 0;
  for (int it = 0; it < max_iter; ++it) {
    iterations = it + 1;
    M.setZero();
    for (std::size_t k = 0; k < m; ++k) M.noalias() += u[k] * a[k] * a[k].transpose();
    const Eigen::LDLT<Mat> ldlt(M);
    std::size_t jp = 0, jm = m;
    for (std::size_t k = 0; k < m; ++k) {
      kappa[k] = a[k].dot(ldlt.solve(a[k]));
      if (kappa[k] > kappa[jp]) jp = k;
      if (u[k] > 0.0 && (jm == m || kappa[k] < kappa[jm])) jm = k;
    }
    const double eps_plus = kappa[jp] / n - 1.0;
    const double eps_minus = jm < m ? 1.0 - kappa[jm] / n : 0.0;
    if (std::max(eps_plus, eps_minus) <= tol) {
      converged = true;
      break;
    }
    if (eps_plus >= eps_minus) {
      const double lam = (kappa[jp] - n) / (n * (kappa[jp] - 1.0));
      for (double& x : u) x *= (1.0 - lam);
      u[jp] += lam;
    } else {
      double lam = (n - kappa[jm]) / (n * (kappa[jm] - 1.0));
      if (!(kappa[jm] > 1.0)) lam = std::numeric_limits<double>::infinity();
      lam = std::min(lam, u[jm] / (1.0 - u[jm]));
      for (double& x : u) x *= (1.0 + lam);
      u[jm] -= lam;
      if (u[jm] < 0.0) u[jm] = 0.0;
    }
  }
  M.setZero();
  for (std::size_t k = 0; k < m; ++k) M.noalias() += u[k] * a[k] * a[k].transpose();
  return M;
}

int default_directions(int n) { return n <= 1 ? 1 : (n == 2 ? 64 : 256); }
int default_checks(int n) { return n <= 1 ? 2 : (n == 2 ? 720 : 3000); }

}  // namespace

Ellipsoid john_ellipsoid(const SublevelSet& s, const EllipsoidConfig& cfg) {
  const int n = s.dim();
  if (n > 3) throw Error("john_ellipsoid supports n <= 3");
  if (!(s.level > 0.0)) throw Error("sublevel: level must be positive");

  if (n == 1) {
    const Vec u = Vec::Ones(1);
    const double r = std::min(ray_distance(s, u), ray_distance(s, -u));
    Mat A(1, 1);
    A(0, 0) = 1.0 / (r * r);
    return make_ellipsoid(A);
  }

  const int K = cfg.directions > 0 ? cfg.directions : default_directions(n);
  std::vector<Vec> normals;
  double hint = 1.0;
  for (const Vec& u : hemisphere_directions(n, K)) {
    const SymRay r = symmetric_ray(s, u, hint);
    hint = r.radius;
    normals.push_back(r.normal / r.normal.dot(r.point));
  }
  bool converged = false;
  int iterations = 0;
  const Mat M = max_det_weights(normals, n, cfg.max_iterations, cfg.tolerance, converged, iterations);
  Mat A = static_cast<double>(n) * M;
  {
    // make the ellipsoid lie inside every sampled slab exactly
    const Eigen::LDLT<Mat> ldlt(A);
    double worst = 0.0;
    for (const Vec& a : normals) worst = std::max(worst, a.dot(ldlt.solve(a)));
    if (worst > 1.0) A /= worst;
  }

  // Shrink until the sampled ellipsoid boundary lies in R and -R.
  const int checks = cfg.check_points > 0 ? cfg.check_points : default_checks(n);
  Ellipsoid e = make_ellipsoid(A);
  const Mat B = e.axes * e.semi_axes.asDiagonal() * e.axes.transpose();  // A^{-1/2}
  auto slack = [&](const Vec& z) {
    const Vec x = B * z;
    const double len = x.norm();
    const Vec dir = x / len;
    const double dp = ray_distance(s, dir, len);
    const double dm = ray_distance(s, -dir, dp);
    return std::min(dp, dm) / len;
  };
  std::vector<std::pair<double, Vec>> worst;
  for (const Vec& z : sphere_directions(n, checks)) worst.emplace_back(slack(z), z);
  std::sort(worst.begin(), worst.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double scale = worst.front().first;
  const double spacing = n == 2 ? 2.0 * std::numbers::pi / checks : std::sqrt(4.0 * std::numbers::pi / checks);
  const std::size_t candidates = std::min<std::size_t>(worst.size(), 4);
  for (std::size_t c = 0; c < candidates; ++c)
    scale = std::min(scale, refine_on_sphere(n, slack, worst[c].second, 1.5 * spacing));
  scale = std::min(scale, 1.0) * (1.0 - 1e-12);
  e = make_ellipsoid(A / (scale * scale));
  e.converged = converged;
  e.iterations = iterations;
  return e;
}

double outer_dilation(const SublevelSet& s, const Ellipsoid& e, int check_points) {
  const int n = s.dim();
  if (n == 1) {
    const Vec u = Vec::Ones(1);
    return std::max(ray_distance(s, u), ray_distance(s, -u)) * std::sqrt(e.shape(0, 0));
  }
  const int checks = check_points > 0 ? check_points : default_checks(n);
  auto neg_gauge = [&](const Vec& u) { return -ray_distance(s, u, 1.0) * e.gauge(u); };
  std::vector<std::pair<double, Vec>> vals;
  for (const Vec& u : sphere_directions(n, checks)) vals.emplace_back(neg_gauge(u), u);
  std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double best = vals.front().first;
  const double spacing = n == 2 ? 2.0 * std::numbers::pi / checks : std::sqrt(4.0 * std::numbers::pi / checks);
  for (std::size_t c = 0; c < std::min<std::size_t>(vals.size(), 4); ++c)
    best = std::min(best, refine_on_sphere(n, neg_gauge, vals[c].second, 1.5 * spacing));
  return -best;
}

MuFactors mu_factors(const Polynomial& b_tilde, double tau, const EllipsoidConfig& cfg) {
  if (!(tau > 0.0)) throw Error("mu_factors: tau must be positive");
  const SublevelSet s{b_tilde, 1.0 / tau};
  MuFactors f;
  f.ellipsoid = john_ellipsoid(s, cfg);
  f.sandwich_outer = std::max(1.0, outer_dilation(s, f.ellipsoid, cfg.check_points));
  f.mu = f.sandwich_outer * f.ellipsoid.semi_axes;
  f.axes = f.ellipsoid.axes;
  return f;
}

// ---------------------------------------------------------------------------
// scaling and exp-integral checks

ScalingCheck scaling_check(const Polynomial& f, double x, double lambda, const VolumeConfig& cfg) {
  if (!(x > 0.0)) throw Error("scaling_check: level must be positive");
  if (lambda < 0.0 || lambda > 1.0) throw Error("scaling_check: lambda must lie in [0, 1]");
  const int n = f.dim();
  ScalingCheck r;
  const VolumeEstimate vx = sublevel_volume({f, x}, cfg);
  r.vol_x = vx.value;
  if (lambda == 0.0) {
    r.vol_lambda_x = 0.0;
    r.holds = true;
    return r;
  }
  const VolumeEstimate vl = sublevel_volume({f, lambda * x}, cfg);
  r.vol_lambda_x = vl.value;
  const double ln = std::pow(lambda, n);
  const double sigma = std::hypot(vl.std_error, ln * vx.std_error);
  r.holds = vl.value + 3.0 * sigma >= ln * vx.value;
  return r;
}

double exp_integral_upper_bound(int n, int terms) {
  double s = 1.0;
  for (int j = 1; j <= terms; ++j) s += std::exp(-static_cast<double>(j)) * std::pow(j + 1.0, n);
  return s;
}

ExpIntegralEquiv exp_integral_equiv(const Polynomial& f, const VolumeConfig& cfg) {
  const int n = f.dim();
  // Polar shells: along each ray r -> f(r u) is increasing, so the shell
  // {j <= f <= j+1} is the radial interval [d_j(u), d_{j+1}(u)].
  const SphereRule rule = sphere_rule(n, n == 3 ? 48 : 256);
  const QuadratureRule ref = gauss_legendre(12);
  double total = 0.0;
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    const Vec& u = rule.points[k];
    double inner = 0.0;
    double r_lo = 0.0;
    for (int j = 0; j < 400; ++j) {
      const double r_hi = ray_distance({f, j + 1.0}, u, std::max(r_lo, 1e-3));
      double shell = 0.0;
      const double half = 0.5 * (r_hi - r_lo), mid = 0.5 * (r_hi + r_lo);
      for (std::size_t q = 0; q < ref.nodes.size(); ++q) {
        const double r = mid + half * ref.nodes[q];
        shell += ref.weights[q] * half * std::exp(-f(Vec(r * u))) * std::pow(r, n - 1);
      }
      inner += shell;
      r_lo = r_hi;
      if (shell < 1e-12 * inner) break;
    }
    total += rule.weights[k] * inner;
  }
  ExpIntegralEquiv out;
  out.integral = total;
  out.volume = sublevel_volume({f, 1.0}, cfg).value;
  out.ratio = out.integral / out.volume;
  out.upper_bound = exp_integral_upper_bound(n);
  out.holds = out.ratio >= std::exp(-1.0) && out.ratio <= out.upper_bound;
  return out;
}

}  // namespace szego

#include "szego/format.hpp"
#include "szego/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "szego/parallel.hpp"
#include "szego/quadrature.hpp"
#include "szego/random.hpp"

namespace szego {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec> eta_directions(int n) {
  std::vector<Vec> dirs;
  if (n == 1) return {Vec::Ones(1), -Vec::Ones(1)};
  if (n == 2) {
    for (int k = 0; k < 8; ++k) {
      Vec u(2);
      u << std::cos(kPi * k / 4), std::sin(kPi * k / 4);
      dirs.push_back(u);
    }
    return dirs;
  }
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        Vec u(3);
        u << a, b, c;
        dirs.push_back(u.normalized());
      }
  return dirs;
}

/// Distance s along u where the Legendre transform of g reaches `level`.
/// s -> L(s u) is convex and increasing, so Newton from above is monotone.
double legendre_level_distance(const Polynomial& g, const Vec& u, double level,
                               const LegendreConfig& cfg) {
  double s = 1.0;
  Vec warm = Vec::Zero(g.dim());
  LegendreResult r = legendre(g, s * u, cfg, &warm);
  int guard = 0;
  while (r.L < level && guard++ < 200) {
    s *= 2.0;
    warm = r.v0;
    r = legendre(g, s * u, cfg, &warm);
  }
  for (int it = 0; it < 60; ++it) {
    const double slope = u.dot(r.v0);
    if (!(slope > 0.0)) break;
    const double step = (r.L - level) / slope;
    s -= step;
    warm = r.v0;
    r = legendre(g, s * u, cfg, &warm);
    if (std::abs(step) <= 1e-6 * s) break;
  }
  return s;
}

Mat rescaling(const Polynomial& b_tilde, double tau, const QuadratureConfig& cfg) {
  const int n = b_tilde.dim();
  if (!cfg.rescale) return Mat::Identity(n, n);
  const MuFactors f = mu_factors(b_tilde, 4.0 * kPi * tau, cfg.ellipsoid);
  return f.axes * f.mu.asDiagonal();
}

struct EtaResult {
  cplx value;
  bool converged = true;
};

EtaResult eta_transform_q(const Polynomial& b_tilde, const Vec& gamma, double tau, const Mat& q,
                          const QuadratureConfig& cfg) {
  const int n = b_tilde.dim();
  const Polynomial g = (b_tilde * (4.0 * kPi * tau)).substitute_affine(q, Vec::Zero(n));
  const Vec k = 0.5 * q.fullPivLu().solve(gamma);

  Vec lo(n), hi(n);
  if (cfg.eta_radius > 0.0) {
    lo.setConstant(-cfg.eta_radius);
    hi.setConstant(cfg.eta_radius);
  } else {
    const double level = std::log(1.0 / cfg.v_tol) + 4.0;
    lo.setZero();
    hi.setZero();
    for (const Vec& u : eta_directions(n)) {
      const double s = legendre_level_distance(g, u, level, cfg.theta.legendre);
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], s * u[i]);
        hi[i] = std::max(hi[i], s * u[i]);
      }
    }
    lo *= 1.1;
    hi *= 1.1;
  }

  std::vector<std::vector<double>> nodes(n);
  std::vector<std::vector<cplx>> weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = gauss_legendre(cfg.eta_grid, lo[i], hi[i]).nodes;
    weights[i] = filon_weights(nodes[i], lo[i], hi[i], k[i]);
  }
  ThetaGrid grid;
  if (cfg.inner == InnerMethod::Transform) {
    TransformConfig tc;
    tc.tol = cfg.inner_tol;
    tc.theta = cfg.theta;
    grid = theta_grid_transform(g, nodes, tc);
  } else {
    grid = cfg.parallel ? theta_grid_parallel(g, nodes, cfg.theta) : theta_grid_serial(g, nodes, cfg.theta);
  }

  cplx sum = 0.0;
  std::vector<int> idx(n, 0);
  for (double th : grid.theta) {
    cplx w = th;
    for (int i = 0; i < n; ++i) w *= weights[i][idx[i]];
    sum += w;
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < cfg.eta_grid) break;
      idx[i] = 0;
    }
  }
  const double det = q.determinant();
  EtaResult r;
  r.value = sum / (std::pow(4.0 * kPi, n) * det * det);
  r.converged = grid.converged;
  return r;
}

/// G(tau) sampled at Gauss nodes in log tau over a cell [a, b].
struct Cell {
  double a = 0.0, b = 0.0;
  int parent = 0;          // dyadic index, shares the rescaling
  int depth = 0;
  std::vector<double> s;   // log tau nodes
  std::vector<double> bw;  // barycentric weights of s
  std::vector<cplx> G;
  double tail = 0.0;       // size of the two highest Legendre coefficients of G
  bool converged = true;
};

Cell build_cell(const Polynomial& b_tilde, const Vec& gamma, double a, double b, const Mat& q,
                const QuadratureConfig& cfg) {
  Cell c;
  c.a = a;
  c.b = b;
  const int m = cfg.tau_points_per_cell;
  const QuadratureRule rule = gauss_legendre(m, std::log(a), std::log(b));
  c.s = rule.nodes;
  c.bw = barycentric_weights(c.s);
  c.G.resize(m);
  for (int i = 0; i < m; ++i) {
    const EtaResult e = eta_transform_q(b_tilde, gamma, std::exp(c.s[i]), q, cfg);
    c.G[i] = e.value;
    c.converged = c.converged && e.converged;
  }
  // Legendre coefficients of G on the cell, from the same Gauss rule.
  const QuadratureRule ref = gauss_legendre(m);
  auto coefficient = [&](int k) {
    cplx acc = 0.0;
    for (int i = 0; i < m; ++i) {
      double p0 = 1.0, p1 = ref.nodes[i];
      double pk = k == 0 ? 1.0 : p1;
      for (int j = 2; j <= k; ++j) {
        pk = ((2.0 * j - 1.0) * ref.nodes[i] * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = pk;
      }
      acc += ref.weights[i] * pk * c.G[i];
    }
    return acc * (2.0 * k + 1.0) / 2.0;
  };
  c.tail = std::abs(coefficient(m - 1)) + (m >= 2 ? std::abs(coefficient(m - 2)) : 0.0);
  return c;
}

struct CellIntegral {
  cplx value;
  double abs_mass = 0.0;  // int |G| e^{-2 pi tau d}
  double err = 0.0;
};

/// int over the cell of e^{-2 pi tau (d + i w)} G(tau), G interpolated in log tau.
CellIntegral integrate_cell(const Cell& c, double d, double w, const QuadratureConfig& cfg) {
  const double width = c.b - c.a;
  double pieces = 1.0;
  if (w != 0.0) pieces = std::max(pieces, std::ceil(width * std::abs(w) / cfg.oscillation_safety));
  pieces = std::max(pieces, std::ceil(width * 2.0 * kPi * d / 4.0));
  const int m = static_cast<int>(std::min(pieces, 2.0e5));
  const QuadratureRule ref = gauss_legendre(12);
  const double h = width / m;
  CellIntegral out;
  double damp_mass = 0.0;
  for (int p = 0; p < m; ++p) {
    const double lo = c.a + p * h;
    for (std::size_t k = 0; k < ref.nodes.size(); ++k) {
      const double tau = lo + 0.5 * h * (ref.nodes[k] + 1.0);
      const double wt = 0.5 * h * ref.weights[k];
      const cplx g = barycentric_eval<cplx>(c.s, c.bw, c.G, std::log(tau));
      const double damp = std::exp(-2.0 * kPi * tau * d);
      out.value += wt * damp * std::polar(1.0, -2.0 * kPi * tau * w) * g;
      out.abs_mass += wt * damp * std::abs(g);
      damp_mass += wt * damp;
    }
  }
  out.err = c.tail * damp_mass;
  return out;
}

/// Neville extrapolation of (x_k, y_k) to x = 0.
cplx extrapolate_to_zero(std::vector<double> x, std::vector<cplx> y) {
  const std::size_t m = x.size();
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      y[i] = (x[i + level] * y[i] - x[i] * y[i + 1]) / (x[i + level] - x[i]);
  return y[0];
}

}  // namespace

void QuadratureConfig::validate() const {
  if (j_min >= j_max) throw ConfigError("quadrature: j_min must be below j_max");
  if (tau_points_per_cell < 2 || eta_grid < 2) throw ConfigError("quadrature: counts must be >= 2");
  if (!(oscillation_safety > 0.0) || oscillation_safety > 0.25)
    throw ConfigError("quadrature: oscillation_safety must lie in (0, 1/4]");
  if (!(v_tol > 0.0) || v_tol >= 1.0) throw ConfigError("quadrature: v_tol must lie in (0, 1)");
}

QuadratureConfig QuadratureConfig::refined() const {
  QuadratureConfig r = *this;
  r.tau_points_per_cell *= 2;
  r.eta_grid *= 2;
  return r;
}

std::complex<double> eta_transform(const Polynomial& b_tilde, const Vec& gamma, double tau,
                                   const QuadratureConfig& cfg) {
  return eta_transform_q(b_tilde, gamma, tau, rescaling(b_tilde, tau, cfg), cfg).value;
}

KernelEstimate szego_eval(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime,
                          const QuadratureConfig& cfg) {
  cfg.validate();
  if (p.dim() != b.dim() || p_prime.dim() != b.dim())
    throw DimensionMismatch(b.dim(), p.dim() != b.dim() ? p.dim() : p_prime.dim());
  const PairData pd = pair_data(b, p, p_prime);
  const double bg = pd.b_tilde(pd.gamma);
  if (std::max({pd.delta, bg, std::abs(pd.w)}) < 1e-8) throw OnDiagonal();

  const double scale = std::max({pd.delta, bg, std::abs(pd.w), 1.0});
  const double w = pd.w;

  // Without delta or gamma damping the tau integral only converges in the
  // Abel sense; evaluate at shifted delta and extrapolate the shift to 0.
  std::vector<double> shifts{0.0};
  const bool abel = 2.0 * kPi * pd.delta + kPi * bg < 0.02 * 2.0 * kPi * std::abs(w);
  if (abel) {
    shifts.clear();
    const double h = 0.03 * std::abs(w);
    for (int k = 1; k <= 6; ++k) shifts.push_back(k * h);
  }
  const double d_min = pd.delta + shifts.front();

  // Cells keyed by their left end; one rescaling per dyadic cell.
  std::map<int, Mat> rescalings;
  std::map<double, Cell> cells;
  std::map<double, CellIntegral> first_shift;
  std::map<int, double> dyadic_mass;
  auto insert = [&](Cell c) {
    const CellIntegral ci = integrate_cell(c, d_min, w, cfg);
    first_shift[c.a] = ci;
    const double key = c.a;
    cells.emplace(key, std::move(c));
    return ci;
  };
  auto add = [&](int j) {
    const double a = std::ldexp(1.0, j) / scale;
    const Mat& q = rescalings.emplace(j, rescaling(pd.b_tilde, a * std::sqrt(2.0), cfg)).first->second;
    Cell c = build_cell(pd.b_tilde, pd.gamma, a, 2.0 * a, q, cfg);
    c.parent = j;
    dyadic_mass[j] = insert(std::move(c)).abs_mass;
  };
  auto partial = [&] {
    cplx s = 0.0;
    for (const auto& [a, ci] : first_shift) s += ci.value;
    return std::abs(s);
  };

  for (int j = cfg.j_min; j <= cfg.j_max; ++j) add(j);
  constexpr int kMaxDyadic = 64;
  // right: stop once the cell mass is negligible, or once it turns upward
  // after decaying (the quadrature noise floor of G has been reached)
  while (static_cast<int>(dyadic_mass.size()) < kMaxDyadic) {
    const int jr = dyadic_mass.rbegin()->first;
    const double last = dyadic_mass[jr], prev = dyadic_mass[jr - 1];
    const double total = partial();
    if (last <= cfg.v_tol * total && last <= prev) break;
    if (last > prev && prev <= 1e-3 * total) {
      const double key = std::ldexp(1.0, jr) / scale;
      first_shift.erase(key);
      cells.erase(key);
      dyadic_mass.erase(jr);
      break;
    }
    add(jr + 1);
  }
  // left: G behaves like a power of tau near 0 and the remainder is added in
  // closed form below
  while (static_cast<int>(dyadic_mass.size()) < kMaxDyadic) {
    const int jl = dyadic_mass.begin()->first;
    const double first = dyadic_mass[jl], next = dyadic_mass[jl + 1];
    if (first <= 1e-5 * partial() && first < next) break;
    add(jl - 1);
  }
  // split cells whose interpolation error is large against the running total
  constexpr int kMaxDepth = 5;
  for (int sweep = 0; sweep < kMaxDepth; ++sweep) {
    const double threshold = 10.0 * cfg.v_tol * partial();
    std::vector<double> split;
    for (const auto& [a, ci] : first_shift)
      if (ci.err > threshold && cells.at(a).depth < kMaxDepth) split.push_back(a);
    if (split.empty()) break;
    for (double a : split) {
      const Cell old = cells.at(a);
      cells.erase(a);
      first_shift.erase(a);
      const double mid = std::sqrt(old.a * old.b);
      const Mat& q = rescalings.at(old.parent);
      for (auto [lo, hi] : {std::pair{old.a, mid}, std::pair{mid, old.b}}) {
        Cell c = build_cell(pd.b_tilde, pd.gamma, lo, hi, q, cfg);
        c.parent = old.parent;
        c.depth = old.depth + 1;
        insert(std::move(c));
      }
    }
  }

  KernelEstimate est;
  est.cells_used = static_cast<int>(cells.size());
  for (const auto& [a, c] : cells) est.converged = est.converged && c.converged;

  // left tail: G ~ G(a) (tau / a)^p on [0, a]
  const Cell& left = cells.begin()->second;
  const cplx g_a = barycentric_eval<cplx>(left.s, left.bw, left.G, std::log(left.a));
  const cplx g_b = barycentric_eval<cplx>(left.s, left.bw, left.G, std::log(left.b));
  double power = std::log(std::abs(g_b) / std::abs(g_a)) / std::log(left.b / left.a);
  if (!std::isfinite(power) || power <= -0.5) power = -0.5;
  const cplx tail = g_a * left.a / (power + 1.0);

  std::vector<cplx> values;
  double err = 0.0;
  for (double sh : shifts) {
    cplx s = tail;
    double e = 0.0;
    for (const auto& [a, c] : cells) {
      const CellIntegral ci = sh == shifts.front() ? first_shift.at(a) : integrate_cell(c, pd.delta + sh, w, cfg);
      s += ci.value;
      e += ci.err;
    }
    values.push_back(s);
    err = std::max(err, e);
  }
  err += 0.1 * std::abs(tail);

  if (abel) {
    const cplx full = extrapolate_to_zero(shifts, values);
    const cplx reduced = extrapolate_to_zero({shifts.begin(), shifts.end() - 1}, {values.begin(), values.end() - 1});
    est.value = full;
    // the extrapolation amplifies per-shift errors by sum |l_k(0)| = 2^K - 1
    err = err * 63.0 + std::abs(full - reduced);
  } else {
    est.value = values.front();
  }
  est.abs = std::abs(est.value);
  est.err = err + cfg.v_tol * est.abs;
  return est;
}

std::complex<double> quadratic_oracle(const Vec& a, const BoundaryPoint& p, const BoundaryPoint& p_prime) {
  const int n = static_cast<int>(a.size());
  if (p.dim() != n || p_prime.dim() != n) throw DimensionMismatch(n, p.dim());
  for (int i = 0; i < n; ++i)
    if (!(a[i] > 0.0)) throw Error("quadratic_oracle: coefficients must be positive");
  if (p == p_prime) throw OnDiagonal();
  double delta = 0.0, bg = 0.0, w = p_prime.t - p.t;
  for (int i = 0; i < n; ++i) {
    const double dx = p.x[i] - p_prime.x[i];
    const double gy = p.y[i] - p_prime.y[i];
    delta += 0.5 * a[i] * dx * dx;
    bg += a[i] * gy * gy;
    // grad b at the midpoint is a_i (x_i + x'_i)
    w += a[i] * (p.x[i] + p_prime.x[i]) * (p_prime.y[i] - p.y[i]);
  }
  double num = std::tgamma(n + 1.0);
  for (int i = 0; i < n; ++i) num *= 2.0 * a[i];
  const cplx z(2.0 * kPi * delta + kPi * bg, 2.0 * kPi * w);
  return num / std::pow(z, n + 1);
}

namespace {

double component(const Polynomial& b_tilde, double scale, const VolumeConfig& vc) {
  if (!(scale > 0.0)) return kInf;
  const double v = sublevel_volume({b_tilde, scale}, vc).value;
  return 1.0 / (scale * v * v);
}

}  // namespace

double bound_rhs(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime,
                 const QuadratureConfig& cfg) {
  const PairData pd = pair_data(b, p, p_prime);
  const double bg = pd.b_tilde(pd.gamma);
  const double rho = std::sqrt(pd.delta * pd.delta + bg * bg + pd.w * pd.w);
  if (!(rho > 0.0)) throw OnDiagonal();
  return component(pd.b_tilde, rho, cfg.volume);
}

BoundReport bound_components(const Polynomial& b, const BoundaryPoint& p,
                             const BoundaryPoint& p_prime, const QuadratureConfig& cfg) {
  const PairData pd = pair_data(b, p, p_prime);
  const double bg = pd.b_tilde(pd.gamma);
  const double rho = std::sqrt(pd.delta * pd.delta + bg * bg + pd.w * pd.w);
  if (!(rho > 0.0)) throw OnDiagonal();
  BoundReport r;
  r.A_delta = component(pd.b_tilde, pd.delta, cfg.volume);
  r.B_ytilde = component(pd.b_tilde, bg, cfg.volume);
  r.C_w = component(pd.b_tilde, std::abs(pd.w), cfg.volume);
  r.combined = component(pd.b_tilde, rho, cfg.volume);
  r.min_of_three = std::min({r.A_delta, r.B_ytilde, r.C_w});
  return r;
}

std::vector<PointPair> sample_pairs(int n, const SamplerSpec& spec) {
  std::vector<PointPair> pairs;
  for (int k = 0; k < spec.count; ++k) {
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(k));
    auto draw = [&] {
      BoundaryPoint b;
      b.x.resize(n);
      b.y.resize(n);
      for (int i = 0; i < n; ++i) b.x[i] = rng.uniform(spec.x_lo, spec.x_hi);
      for (int i = 0; i < n; ++i) b.y[i] = rng.uniform(spec.y_lo, spec.y_hi);
      b.t = rng.uniform(spec.t_lo, spec.t_hi);
      return b;
    };
    PointPair pp;
    pp.p = draw();
    pp.q = draw();
    pairs.push_back(std::move(pp));
  }
  return pairs;
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  os << "pair_id,delta,btilde_gamma,w,S_re,S_im,S_abs,err,rhs_A,rhs_B,rhs_C,rhs_combined,ratio,error\n";
  for (const SweepRow& r : rows) {
    os << r.pair_id << ',' << fmt17(r.delta) << ',' << fmt17(r.btilde_gamma) << ',' << fmt17(r.w);
    if (r.error.empty()) {
      os << ',' << fmt17(r.estimate.value.real()) << ',' << fmt17(r.estimate.value.imag()) << ','
         << fmt17(r.estimate.abs) << ',' << fmt17(r.estimate.err) << ',' << fmt17(r.bounds.A_delta)
         << ',' << fmt17(r.bounds.B_ytilde) << ',' << fmt17(r.bounds.C_w) << ','
         << fmt17(r.bounds.combined) << ',' << fmt17(r.ratio) << ",\n";
    } else {
      std::string msg = r.error;
      for (std::size_t k = msg.find('"'); k != std::string::npos; k = msg.find('"', k + 2)) msg.insert(k, 1, '"');
      os << ",,,,,,,,,," << '"' << msg << '"' << '\n';
    }
  }
  return os.str();
}

SweepTable main_theorem_sweep(const Polynomial& b, const std::vector<PointPair>& pairs,
                              const QuadratureConfig& cfg) {
  SweepTable table;
  table.rows.resize(pairs.size());
  QuadratureConfig inner = cfg;
  inner.parallel = false;  // pairs are the parallel unit
  auto run = [&](std::size_t i) {
    SweepRow& row = table.rows[i];
    row.pair_id = static_cast<int>(i);
    try {
      const PairData pd = pair_data(b, pairs[i].p, pairs[i].q);
      row.delta = pd.delta;
      row.btilde_gamma = pd.b_tilde(pd.gamma);
      row.w = pd.w;
      row.estimate = szego_eval(b, pairs[i].p, pairs[i].q, inner);
      row.bounds = bound_components(b, pairs[i].p, pairs[i].q, cfg);
      row.ratio = row.estimate.abs / row.bounds.combined;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  };
  if (cfg.parallel)
    kernels::for_each_index_parallel(pairs.size(), run);
  else
    kernels::for_each_index_serial(pairs.size(), run);
  for (const SweepRow& r : table.rows)
    if (r.error.empty()) table.max_ratio = std::max(table.max_ratio, r.ratio);
  return table;
}

SweepStability sweep_with_refinement(const Polynomial& b, const std::vector<PointPair>& pairs,
                                     const QuadratureConfig& cfg) {
  SweepStability s;
  s.base = main_theorem_sweep(b, pairs, cfg);
  s.refined = main_theorem_sweep(b, pairs, cfg.refined());
  const double a = s.base.max_ratio, r = s.refined.max_ratio;
  s.change = (a > 0.0 && r > 0.0) ? std::max(a / r, r / a) : kInf;
  s.stable = std::isfinite(s.change) && s.change < 2.0;
  return s;
}

}  // namespace szego

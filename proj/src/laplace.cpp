#include "szego/format.hpp"
#include "szego/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <iomanip>
#include <limits>
#include <sstream>

#include "szego/parallel.hpp"
#include "szego/quadrature.hpp"

namespace szego {

namespace {

/// Flat copy of a polynomial's terms for tight loops.
struct FlatPoly {
  int n = 0;
  int max_exp = 0;
  std::vector<int> exps;
  std::vector<double> coefs;

  FlatPoly() = default;
  explicit FlatPoly(const Polynomial& p) : n(p.dim()) {
    for (const auto& t : p.terms()) {
      for (int e : t.exponent) {
        exps.push_back(e);
        max_exp = std::max(max_exp, e);
      }
      coefs.push_back(t.coefficient);
    }
  }
  std::size_t size() const { return coefs.size(); }

  /// Coefficients of t -> p(t u) as a polynomial in t.
  std::vector<double> along(const Vec& u) const {
    int deg = 0;
    for (std::size_t k = 0; k < size(); ++k) {
      int d = 0;
      for (int i = 0; i < n; ++i) d += exps[k * n + i];
      deg = std::max(deg, d);
    }
    std::vector<double> c(deg + 1, 0.0);
    for (std::size_t k = 0; k < size(); ++k) {
      double m = coefs[k];
      int d = 0;
      for (int i = 0; i < n; ++i) {
        const int e = exps[k * n + i];
        for (int r = 0; r < e; ++r) m *= u[i];
        d += e;
      }
      c[d] += m;
    }
    return c;
  }
};

/// Coefficients of a polynomial on the full exponent box [0, deg_i] per axis,
/// first axis slowest. Shifting is separable along each axis.
struct DenseCoeffs {
  int n = 0;
  std::vector<int> ext;  // deg_i + 1
  std::vector<std::size_t> stride;
  std::vector<double> c;

  explicit DenseCoeffs(const Polynomial& p) : n(p.dim()), ext(n, 1), stride(n, 1) {
    for (int i = 0; i < n; ++i) ext[i] = p.max_exponent(i) + 1;
    for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * ext[i + 1];
    c.assign(stride[0] * ext[0], 0.0);
    for (const auto& t : p.terms()) {
      std::size_t k = 0;
      for (int i = 0; i < n; ++i) k += stride[i] * t.exponent[i];
      c[k] = t.coefficient;
    }
  }

  /// Terms of p(v0 + w) of total degree >= 2 in w.
  FlatPoly centred(const Vec& v0) const {
    std::vector<double> a = c;
    std::vector<double> fiber;
    for (int i = 0; i < n; ++i) {
      const int d = ext[i];
      if (d <= 1 || v0[i] == 0.0) continue;
      fiber.resize(d);
      const std::size_t total = a.size();
      for (std::size_t base = 0; base < total; ++base) {
        if ((base / stride[i]) % d != 0) continue;
        for (int e = 0; e < d; ++e) fiber[e] = a[base + e * stride[i]];
        // Horner-style synthetic division realises the binomial shift.
        for (int k = 0; k < d; ++k)
          for (int e = d - 2; e >= k; --e) fiber[e] += v0[i] * fiber[e + 1];
        for (int e = 0; e < d; ++e) a[base + e * stride[i]] = fiber[e];
      }
    }
    FlatPoly f;
    f.n = n;
    std::vector<int> e(n, 0);
    for (std::size_t k = 0; k < a.size(); ++k) {
      int deg = 0;
      std::size_t rem = k;
      for (int i = 0; i < n; ++i) {
        e[i] = static_cast<int>(rem / stride[i]);
        rem %= stride[i];
        deg += e[i];
      }
      if (deg < 2 || a[k] == 0.0) continue;
      for (int i = 0; i < n; ++i) {
        f.exps.push_back(e[i]);
        f.max_exp = std::max(f.max_exp, e[i]);
      }
      f.coefs.push_back(a[k]);
    }
    return f;
  }
};

void horner(const std::vector<double>& c, double t, double& value, double& slope) {
  value = 0.0;
  slope = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    slope = slope * t + value;
    value = value * t + c[k];
  }
}

/// Smallest t > 0 with p(t u) >= level, for a convex p with p(0) = 0 that is
/// coercive along u. Newton from above converges monotonically.
double ray_root(const std::vector<double>& c, double level) {
  double t = 1.0, v = 0.0, s = 0.0;
  horner(c, t, v, s);
  int guard = 0;
  while (v < level && guard++ < 400) {
    t *= 2.0;
    horner(c, t, v, s);
  }
  if (v < level) throw Error("theta: remainder is not coercive along a ray");
  for (int it = 0; it < 100; ++it) {
    if (!(s > 0.0)) break;
    const double step = (v - level) / s;
    t -= step;
    horner(c, t, v, s);
    if (std::abs(step) <= 1e-8 * t) break;
  }
  return t;
}

std::vector<Vec> box_directions(int n, int count) {
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs = {Vec::Ones(1), -Vec::Ones(1)};
  } else if (n == 2) {
    const int m = count > 0 ? count : 16;
    for (int k = 0; k < m; ++k) {
      const double a = 2.0 * std::numbers::pi * k / m;
      Vec u(2);
      u << std::cos(a), std::sin(a);
      dirs.push_back(u);
    }
  } else if (n == 3) {
    for (int a = -1; a <= 1; ++a)
      for (int b = -1; b <= 1; ++b)
        for (int c = -1; c <= 1; ++c) {
          if (a == 0 && b == 0 && c == 0) continue;
          Vec u(3);
          u << a, b, c;
          dirs.push_back(u.normalized());
        }
  } else {
    throw Error("theta: dimension above 3 is not supported");
  }
  return dirs;
}

int default_max_order(int n) { return n == 1 ? 512 : (n == 2 ? 128 : 48); }

struct Box {
  Vec lo, hi;
};

Box remainder_box(const FlatPoly& f, const std::vector<Vec>& dirs, double level) {
  Box b{Vec::Zero(f.n), Vec::Zero(f.n)};
  for (const Vec& u : dirs) {
    const double t = ray_root(f.along(u), level);
    for (int i = 0; i < f.n; ++i) {
      b.lo[i] = std::min(b.lo[i], t * u[i]);
      b.hi[i] = std::max(b.hi[i], t * u[i]);
    }
  }
  const double safety = 1.15;
  b.lo *= safety;
  b.hi *= safety;
  return b;
}

struct TensorSum {
  double integral = 0.0;
  double min_outer = std::numeric_limits<double>::infinity();
};

/// sum of w e^{-f} over the Gauss tensor grid of the box, plus the smallest
/// f seen on the outermost layer of nodes.
TensorSum tensor_exp_sum(const FlatPoly& f, const Box& box, int order) {
  const int n = f.n;
  const int stride = f.max_exp + 1;
  std::vector<QuadratureRule> rules;
  std::vector<std::vector<double>> pw(n);
  for (int i = 0; i < n; ++i) {
    rules.push_back(gauss_legendre(order, box.lo[i], box.hi[i]));
    pw[i].assign(static_cast<std::size_t>(order) * stride, 1.0);
    for (int k = 0; k < order; ++k)
      for (int e = 1; e <= f.max_exp; ++e)
        pw[i][k * stride + e] = pw[i][k * stride + e - 1] * rules[i].nodes[k];
  }
  const std::size_t T = f.size();
  TensorSum out;
  std::vector<int> idx(n, 0);
  // Partial products over the leading axes, refreshed only when they change.
  std::vector<double> partial(T);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= order;
  const int last = n - 1;
  for (std::size_t flat = 0; flat < total; flat += order) {
    double wlead = 1.0;
    bool outer_lead = false;
    for (int i = 0; i < last; ++i) {
      wlead *= rules[i].weights[idx[i]];
      outer_lead = outer_lead || idx[i] == 0 || idx[i] == order - 1;
    }
    for (std::size_t t = 0; t < T; ++t) {
      double m = f.coefs[t];
      for (int i = 0; i < last; ++i) m *= pw[i][idx[i] * stride + f.exps[t * n + i]];
      partial[t] = m;
    }
    double row = 0.0;
    for (int k = 0; k < order; ++k) {
      const double* p = &pw[last][static_cast<std::size_t>(k) * stride];
      double val = 0.0;
      for (std::size_t t = 0; t < T; ++t) val += partial[t] * p[f.exps[t * n + last]];
      if (val < 45.0) row += rules[last].weights[k] * std::exp(-val);
      if (outer_lead || k == 0 || k == order - 1) out.min_outer = std::min(out.min_outer, val);
    }
    out.integral += wlead * row;
    for (int i = last - 1; i >= 0; --i) {
      if (++idx[i] < order) break;
      idx[i] = 0;
    }
  }
  return out;
}

struct JResult {
  double J = 0.0;
  int order = 0;
  int sufficient_order = 0;  // lowest order already within tol of the next
  bool converged = false;
};

JResult remainder_integral(const FlatPoly& f, const ThetaConfig& cfg) {
  const int n = f.n;
  if (f.size() == 0) throw Error("theta: remainder vanishes identically");
  Box box = remainder_box(f, box_directions(n, cfg.box_directions), cfg.cutoff);
  const int max_order = cfg.max_order > 0 ? cfg.max_order : default_max_order(n);

  auto evaluate = [&](int order) {
    TensorSum s = tensor_exp_sum(f, box, order);
    for (int grow = 0; grow < 8 && s.min_outer < 0.75 * cfg.cutoff; ++grow) {
      box.lo *= 1.5;
      box.hi *= 1.5;
      s = tensor_exp_sum(f, box, order);
    }
    return s.integral;
  };

  JResult r;
  if (cfg.fixed_order > 0) {
    r.J = evaluate(cfg.fixed_order);
    r.order = r.sufficient_order = cfg.fixed_order;
    r.converged = true;
    return r;
  }
  int order = std::max(2, cfg.min_order);
  double prev = evaluate(order);
  while (true) {
    const int next = std::min(2 * ((3 * order + 3) / 4), max_order);
    if (next <= order) {
      r.J = prev;
      r.order = r.sufficient_order = order;
      return r;
    }
    const double cur = evaluate(next);
    if (std::abs(cur - prev) <= cfg.tol * std::abs(cur)) {
      r.J = cur;
      r.order = next;
      r.sufficient_order = order;
      r.converged = true;
      return r;
    }
    order = next;
    prev = cur;
  }
}

void least_squares_line(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                        double& intercept) {
  const std::size_t m = x.size();
  if (m < 2) {
    slope = 0.0;
    intercept = m ? y[0] : 0.0;
    return;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) mx += x[i], my += y[i];
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  slope = sxx > 0.0 ? sxy / sxx : 0.0;
  intercept = my - slope * mx;
}

}  // namespace

LegendreResult legendre(const Polynomial& g, const Vec& eta, const LegendreConfig& cfg,
                        const Vec* warm_start) {
  const int n = g.dim();
  if (eta.size() != n) throw DimensionMismatch(n, eta.size());
  LegendreResult res;
  Vec v = (warm_start && warm_start->size() == n) ? *warm_start : Vec::Zero(n);
  double val = 0.0;
  Vec grad(n);
  Mat hess(n, n);
  auto refresh = [&](const Vec& x) {
    g.value_gradient_hessian({x.data(), static_cast<std::size_t>(n)}, val, grad, hess);
  };
  refresh(v);
  double phi = val - eta.dot(v);
  Vec r = grad - eta;
  const double stop = cfg.tol * (1.0 + eta.norm());

  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (r.norm() <= stop) break;
    Vec d;
    Eigen::LLT<Mat> llt(hess);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      d = -llt.solve(r);
      ok = d.allFinite() && d.dot(r) < 0.0;
    }
    double lambda = std::sqrt(r.norm()) + 1e-12 * (1.0 + hess.norm());
    while (!ok) {
      const Mat shifted = hess + lambda * Mat::Identity(n, n);
      Eigen::LLT<Mat> l2(shifted);
      if (l2.info() == Eigen::Success) {
        d = -l2.solve(r);
        ok = d.allFinite() && d.dot(r) < 0.0;
      }
      lambda *= 10.0;
      if (!std::isfinite(lambda)) break;
    }
    if (!ok) break;
    double step = 1.0;
    const double slope = r.dot(d);
    Vec trial;
    double phi_trial = 0.0;
    bool accepted = false;
    {
      // near the optimum phi is flat to rounding; take the Newton step if it reduces the gradient
      trial = v + d;
      double tv;
      Vec tg(n);
      Mat th(n, n);
      g.value_gradient_hessian({trial.data(), static_cast<std::size_t>(n)}, tv, tg, th);
      phi_trial = tv - eta.dot(trial);
      accepted = phi_trial <= phi + 1e-12 * (1.0 + std::abs(phi)) && (tg - eta).norm() < r.norm();
    }
    for (int ls = 0; ls < 80 && !accepted; ++ls) {
      trial = v + step * d;
      phi_trial = g(trial) - eta.dot(trial);
      if (phi_trial <= phi + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    v = trial;
    refresh(v);
    phi = val - eta.dot(v);
    r = grad - eta;
  }
  res.v0 = v;
  res.iterations = it;
  res.grad_norm = r.norm();
  res.converged = res.grad_norm <= stop;
  res.L = eta.dot(v) - g(v);
  return res;
}

double legendre_lower_bound(const CombinedDegree& m, double c_dom, const Vec& eta) {
  if (eta.size() != m.dim()) throw DimensionMismatch(m.dim(), eta.size());
  if (!(c_dom > 0.0)) throw Error("legendre_lower_bound: dominance constant must be positive");
  double ct = std::numeric_limits<double>::infinity();
  for (int mj : m.m) {
    const double k = 2.0 * mj;
    ct = std::min(ct, std::pow(c_dom * k, -1.0 / (k - 1.0)) * (k - 1.0) / k);
  }
  double s = 0.0;
  for (int i = 0; i < m.dim(); ++i) {
    const double k = 2.0 * m.m[i];
    s += std::pow(std::abs(eta[i]), k / (k - 1.0));
  }
  return ct * s - c_dom;
}

Polynomial centred_remainder(const Polynomial& g, const Vec& v0) {
  return g.shift(v0).without_affine_part();
}

namespace {

ThetaValue denominator_dense(const Polynomial& g, const DenseCoeffs& dense, const Vec& eta,
                             const ThetaConfig& cfg, const Vec* warm_start) {
  const LegendreResult leg = legendre(g, eta, cfg.legendre, warm_start);
  const JResult j = remainder_integral(dense.centred(leg.v0), cfg);
  ThetaValue t;
  t.v0 = leg.v0;
  t.L = leg.L;
  t.factor_vol = j.J;
  t.factor_exp = std::exp(leg.L);
  t.log_I = leg.L + std::log(j.J);
  t.I = t.factor_exp * j.J;
  t.theta = std::exp(-leg.L) / j.J;
  t.order = j.order;
  t.sufficient_order = j.sufficient_order;
  t.converged = leg.converged && j.converged;
  return t;
}

}  // namespace

ThetaValue denominator_integral(const Polynomial& g, const Vec& eta, const ThetaConfig& cfg,
                                const Vec* warm_start) {
  return denominator_dense(g, DenseCoeffs(g), eta, cfg, warm_start);
}

double theta(const Polynomial& g, const Vec& eta, const ThetaConfig& cfg) {
  return denominator_integral(g, eta, cfg).theta;
}

ExponentFit fit_decay_exponent(const std::vector<double>& s, const std::vector<double>& log_theta) {
  const std::size_t m = s.size();
  if (m < 4 || log_theta.size() != m) throw Error("fit_decay_exponent: need at least 4 samples");
  ExponentFit fit;
  {
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
      x[i] = std::log(s[i]);
      y[i] = std::log(-log_theta[i]);
    }
    double b = 0.0;
    least_squares_line(x, y, fit.raw_slope, b);
  }
  Eigen::VectorXd y(m);
  for (std::size_t i = 0; i < m; ++i) y[i] = -log_theta[i];
  auto solve = [&](double p, Eigen::Vector3d& coef) {
    Eigen::MatrixXd a(m, 3);
    for (std::size_t i = 0; i < m; ++i) {
      a(i, 0) = std::pow(s[i], p);
      a(i, 1) = std::log(s[i]);
      a(i, 2) = 1.0;
    }
    coef = a.colPivHouseholderQr().solve(y);
    return (a * coef - y).squaredNorm();
  };
  Eigen::Vector3d coef;
  double best_p = 1.0, best_r = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 300; ++k) {
    const double p = 0.5 + 0.01 * k;
    const double r = solve(p, coef);
    if (r < best_r) best_r = r, best_p = p;
  }
  double lo = best_p - 0.01, hi = best_p + 0.01;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    if (solve(a, coef) < solve(b, coef))
      hi = b;
    else
      lo = a;
  }
  fit.exponent = 0.5 * (lo + hi);
  solve(fit.exponent, coef);
  fit.coefficient = coef[0];
  fit.log_weight = coef[1];
  return fit;
}

std::string DecayReport::to_csv() const {
  std::ostringstream os;
  os << "eta_norm,theta,log_theta,r_eta\n";
  for (const auto& r : rows)
    os << fmt17(r.eta_norm) << ',' << fmt17(r.theta) << ',' << fmt17(r.log_theta) << ','
       << fmt17(r.r_eta) << '\n';
  return os.str();
}

DecayReport theta_decay_report(const Polynomial& g, const CombinedDegree& m,
                               const std::vector<Vec>& etas, const ThetaConfig& cfg) {
  if (m.dim() != g.dim()) throw DimensionMismatch(g.dim(), m.dim());
  DecayReport rep;
  rep.rows.resize(etas.size());
  kernels::for_each_index_parallel(etas.size(), [&](std::size_t i) {
    const ThetaValue t = denominator_integral(g, etas[i], cfg);
    DecayRow& row = rep.rows[i];
    row.eta_norm = etas[i].norm();
    row.theta = t.theta;
    row.log_theta = -t.L - std::log(t.factor_vol);
    for (int k = 0; k < g.dim(); ++k) {
      const double q = 2.0 * m.m[k];
      row.r_eta += std::pow(std::abs(etas[i][k]), q / (q - 1.0));
    }
  });
  std::vector<DecayRow> sorted = rep.rows;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const DecayRow& a, const DecayRow& b) { return a.eta_norm < b.eta_norm; });
  std::vector<double> x, y;
  for (std::size_t i = sorted.size() / 2; i < sorted.size(); ++i) {
    x.push_back(sorted[i].r_eta);
    y.push_back(sorted[i].log_theta);
  }
  double slope = 0.0;
  least_squares_line(x, y, slope, rep.intercept);
  rep.c = -slope;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (slope * x[i] + rep.intercept);
    ss += e * e;
  }
  rep.rms_residual = x.empty() ? 0.0 : std::sqrt(ss / x.size());
  return rep;
}

std::string GrowthReport::to_csv() const {
  std::ostringstream os;
  os << "eta_norm,v0_norm\n";
  for (const auto& [e, v] : rows) os << fmt17(e) << ',' << fmt17(v) << '\n';
  return os.str();
}

GrowthReport v0_growth_diagnostic(const Polynomial& g, const std::vector<Vec>& etas,
                                  const LegendreConfig& cfg) {
  GrowthReport rep;
  std::vector<double> x, y;
  for (const Vec& eta : etas) {
    const LegendreResult r = legendre(g, eta, cfg);
    rep.rows.emplace_back(eta.norm(), r.v0.norm());
    x.push_back(eta.norm());
    y.push_back(r.v0.norm());
  }
  least_squares_line(x, y, rep.slope, rep.intercept);
  return rep;
}

namespace {

template <class ForEach>
ThetaGrid theta_grid_impl(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                          const ThetaConfig& cfg, ForEach for_each) {
  const int n = g.dim();
  if (static_cast<int>(axis_nodes.size()) != n) throw DimensionMismatch(n, axis_nodes.size());
  std::size_t total = 1;
  for (const auto& a : axis_nodes) total *= a.size();
  const std::size_t row_len = axis_nodes[n - 1].size();
  const std::size_t rows = row_len ? total / row_len : 0;
  const DenseCoeffs dense(g);

  auto point = [&](std::size_t flat) {
    Vec eta(n);
    for (int i = n - 1; i >= 0; --i) {
      const std::size_t len = axis_nodes[i].size();
      eta[i] = axis_nodes[i][flat % len];
      flat /= len;
    }
    return eta;
  };

  // One order for the whole grid, taken from the origin, the middle and the
  // farthest node.
  ThetaConfig fixed = cfg;
  if (cfg.fixed_order <= 0) {
    std::size_t far = 0;
    double far_norm = -1.0;
    for (std::size_t k = 0; k < total; ++k) {
      const double nn = point(k).norm();
      if (nn > far_norm) far_norm = nn, far = k;
    }
    int order = 0;
    for (const Vec& eta : {Vec(Vec::Zero(n)), point(total / 2), point(far)})
      order = std::max(order, denominator_dense(g, dense, eta, cfg, nullptr).sufficient_order);
    fixed.fixed_order = order;
  }

  ThetaGrid out;
  out.theta.assign(total, 0.0);
  out.order = fixed.fixed_order;
  std::vector<char> ok(rows, 1);
  for_each(rows, [&](std::size_t row) {
    Vec warm = Vec::Zero(n);
    for (std::size_t k = 0; k < row_len; ++k) {
      const std::size_t flat = row * row_len + k;
      const ThetaValue t = denominator_dense(g, dense, point(flat), fixed, &warm);
      out.theta[flat] = t.theta;
      warm = t.v0;
      if (!t.converged) ok[row] = 0;
    }
  });
  for (char c : ok) out.converged = out.converged && c;
  return out;
}

}  // namespace

ThetaGrid theta_grid_serial(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                            const ThetaConfig& cfg) {
  return theta_grid_impl(g, axis_nodes, cfg, kernels::for_each_index_serial);
}

ThetaGrid theta_grid_parallel(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                              const ThetaConfig& cfg) {
  return theta_grid_impl(g, axis_nodes, cfg, kernels::for_each_index_parallel);
}

namespace {

/// p on the tensor grid of the given nodes, flattened with the first axis slowest.
std::vector<double> values_on_grid(const FlatPoly& f, const std::vector<std::vector<double>>& nodes) {
  const int n = f.n;
  const int stride = f.max_exp + 1;
  std::vector<std::vector<double>> pw(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    const std::size_t m = nodes[i].size();
    total *= m;
    pw[i].assign(m * stride, 1.0);
    for (std::size_t k = 0; k < m; ++k)
      for (int e = 1; e <= f.max_exp; ++e) pw[i][k * stride + e] = pw[i][k * stride + e - 1] * nodes[i][k];
  }
  const std::size_t T = f.size();
  const int last = n - 1;
  const std::size_t row_len = nodes[last].size();
  std::vector<double> out(total, 0.0);
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> partial(T);
  for (std::size_t flat = 0; flat < total; flat += row_len) {
    for (std::size_t t = 0; t < T; ++t) {
      double m = f.coefs[t];
      for (int i = 0; i < last; ++i) m *= pw[i][idx[i] * stride + f.exps[t * n + i]];
      partial[t] = m;
    }
    for (std::size_t k = 0; k < row_len; ++k) {
      const double* p = &pw[last][k * stride];
      double val = 0.0;
      for (std::size_t t = 0; t < T; ++t) val += partial[t] * p[f.exps[t * n + last]];
      out[flat + k] = val;
    }
    for (int i = last - 1; i >= 0; --i) {
      if (++idx[i] < nodes[i].size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

/// log sum_v w(v) e^{-g(v) + eta . v} for every eta of the grid.
std::vector<double> log_transform(const FlatPoly& g, const Vec& lo, const Vec& hi, int nodes,
                                  const std::vector<std::vector<double>>& eta_nodes) {
  const int n = g.n;
  std::vector<QuadratureRule> rules;
  std::vector<std::vector<double>> u(n);
  for (int i = 0; i < n; ++i) {
    rules.push_back(gauss_legendre(nodes, lo[i], hi[i]));
    u[i] = rules[i].nodes;
  }
  const std::vector<double> gv = values_on_grid(g, u);
  std::vector<double> cur(gv.size());
  {
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t k = 0; k < gv.size(); ++k) {
      double w = 1.0;
      for (int i = 0; i < n; ++i) w *= rules[i].weights[idx[i]];
      cur[k] = w * std::exp(-gv[k]);
      for (int i = n - 1; i >= 0; --i) {
        if (++idx[i] < static_cast<std::size_t>(nodes)) break;
        idx[i] = 0;
      }
    }
  }
  // Contract the slowest v-axis against e^{eta (v - c) - |eta| h}; the result
  // puts the new eta axis fastest, so after n steps the layout is eta-major.
  std::size_t size = cur.size();
  for (int i = 0; i < n; ++i) {
    const double c = 0.5 * (lo[i] + hi[i]), h = 0.5 * (hi[i] - lo[i]);
    const std::size_t me = eta_nodes[i].size();
    Mat e(me, nodes);
    for (std::size_t k = 0; k < me; ++k) {
      const double x = eta_nodes[i][k];
      for (int j = 0; j < nodes; ++j) e(k, j) = std::exp(x * (u[i][j] - c) - std::abs(x) * h);
    }
    const std::size_t rest = size / nodes;
    Eigen::Map<const Mat> m(cur.data(), rest, nodes);
    const Mat r = (m * e.transpose()).transpose();
    cur.assign(r.data(), r.data() + r.size());
    size = cur.size();
  }
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t k = 0; k < cur.size(); ++k) {
    double shift = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = eta_nodes[i][idx[i]];
      shift += x * 0.5 * (lo[i] + hi[i]) + std::abs(x) * 0.5 * (hi[i] - lo[i]);
    }
    cur[k] = (cur[k] > 0.0 && std::isfinite(cur[k])) ? std::log(cur[k]) + shift
                                                      : std::numeric_limits<double>::quiet_NaN();
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < eta_nodes[i].size()) break;
      idx[i] = 0;
    }
  }
  return cur;
}

}  // namespace

ThetaGrid theta_grid_transform(const Polynomial& g, const std::vector<std::vector<double>>& axis_nodes,
                               const TransformConfig& cfg) {
  const int n = g.dim();
  if (static_cast<int>(axis_nodes.size()) != n) throw DimensionMismatch(n, axis_nodes.size());
  std::size_t total = 1;
  for (const auto& a : axis_nodes) total *= a.size();
  const std::size_t row_len = axis_nodes[n - 1].size();
  const std::size_t rows = row_len ? total / row_len : 0;
  const DenseCoeffs dense(g);
  const FlatPoly flat_g(g);

  auto point = [&](std::size_t flat) {
    Vec eta(n);
    for (int i = n - 1; i >= 0; --i) {
      const std::size_t len = axis_nodes[i].size();
      eta[i] = axis_nodes[i][flat % len];
      flat /= len;
    }
    return eta;
  };

  // Legendre data everywhere; it decides which points the shared grid must serve.
  std::vector<double> L(total);
  Mat v0(n, total);
  bool converged = true;
  for (std::size_t row = 0; row < rows; ++row) {
    Vec warm = Vec::Zero(n);
    for (std::size_t k = 0; k < row_len; ++k) {
      const std::size_t f = row * row_len + k;
      const LegendreResult r = legendre(g, point(f), cfg.theta.legendre, &warm);
      L[f] = r.L;
      v0.col(f) = r.v0;
      warm = r.v0;
      converged = converged && r.converged;
    }
  }
  std::vector<char> near(total, 0);
  std::size_t centre = 0;
  for (std::size_t f = 0; f < total; ++f) {
    near[f] = L[f] <= cfg.relevance;
    if (L[f] < L[centre]) centre = f;
  }
  near[centre] = 1;

  // v-box: the near maximisers, widened by the remainder boxes at the extremes.
  Vec vlo = v0.col(centre), vhi = v0.col(centre);
  std::vector<std::size_t> probes{centre};
  for (int i = 0; i < n; ++i) {
    std::size_t amin = centre, amax = centre;
    for (std::size_t f = 0; f < total; ++f) {
      if (!near[f]) continue;
      if (v0(i, f) < v0(i, amin)) amin = f;
      if (v0(i, f) > v0(i, amax)) amax = f;
    }
    vlo[i] = v0(i, amin);
    vhi[i] = v0(i, amax);
    probes.push_back(amin);
    probes.push_back(amax);
  }
  Vec ext_lo = Vec::Zero(n), ext_hi = Vec::Zero(n);
  const std::vector<Vec> dirs = box_directions(n, cfg.theta.box_directions);
  for (std::size_t f : probes) {
    const Box b = remainder_box(dense.centred(v0.col(f)), dirs, cfg.theta.cutoff);
    for (int i = 0; i < n; ++i) {
      ext_lo[i] = std::min(ext_lo[i], b.lo[i]);
      ext_hi[i] = std::max(ext_hi[i], b.hi[i]);
    }
  }
  const Vec lo = vlo + 1.1 * ext_lo, hi = vhi + 1.1 * ext_hi;

  ThetaGrid out;
  out.theta.assign(total, 0.0);
  // far points: factored form at a low fixed order
  ThetaConfig far = cfg.theta;
  far.fixed_order = cfg.far_order;
  for (std::size_t f = 0; f < total; ++f) {
    if (near[f]) continue;
    const Vec warm = v0.col(f);
    if (cfg.far_order > 0) {
      out.theta[f] = denominator_dense(g, dense, point(f), far, &warm).theta;
    } else {
      const double det = g.hessian(warm).determinant();
      out.theta[f] = std::exp(-L[f]) * std::sqrt(std::max(det, 0.0)) / std::pow(2.0 * std::numbers::pi, 0.5 * n);
    }
  }

  const int min_nodes = cfg.min_nodes > 0 ? cfg.min_nodes : (n == 1 ? 64 : (n == 2 ? 48 : 24));
  const int max_nodes = cfg.max_nodes > 0 ? cfg.max_nodes : (n == 1 ? 2048 : (n == 2 ? 384 : 96));
  std::vector<double> prev;
  int nodes = min_nodes;
  bool settled = false;
  std::vector<double> th(total);
  while (true) {
    const std::vector<double> logi = log_transform(flat_g, lo, hi, nodes, axis_nodes);
    double peak = 0.0;
    for (std::size_t f = 0; f < total; ++f) {
      th[f] = near[f] ? std::exp(-logi[f]) : out.theta[f];
      if (near[f] && std::isfinite(th[f])) peak = std::max(peak, th[f]);
    }
    if (!prev.empty()) {
      double change = 0.0;
      for (std::size_t f = 0; f < total; ++f)
        if (near[f]) change = std::max(change, std::abs(th[f] - prev[f]));
      if (std::isfinite(change) && change <= cfg.tol * peak) {
        settled = true;
        break;
      }
    }
    if (nodes >= max_nodes) break;
    prev = th;
    nodes = std::min(max_nodes, 2 * ((3 * nodes + 3) / 4));
  }
  for (std::size_t f = 0; f < total; ++f) {
    if (!near[f]) continue;
    if (std::isfinite(th[f])) {
      out.theta[f] = th[f];
    } else {
      const Vec warm = v0.col(f);
      out.theta[f] = denominator_dense(g, dense, point(f), cfg.theta, &warm).theta;
    }
  }
  out.order = nodes;
  out.converged = converged && settled;
  return out;
}

}  // namespace szego

#include "szego/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "json.hpp"

#include "szego/errors.hpp"
#include "szego/format.hpp"
#include "szego/parallel.hpp"
#include "szego/random.hpp"

namespace szego {

namespace {

std::string degree_label(const CombinedDegree& m) {
  std::string s = "(";
  for (int i = 0; i < m.dim(); ++i) s += (i ? "," : "") + std::to_string(m.m[i]);
  return s + ")";
}

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

bool has_affine_part(const Polynomial& g) {
  for (const auto& t : g.terms()) {
    int deg = 0;
    for (int e : t.exponent) deg += e;
    if (deg <= 1) return true;
  }
  return false;
}

/// Runs fn on every entry in parallel and merges the partial reports in corpus order.
template <class Fn>
SuiteReport run_entries(const std::string& name, const Corpus& corpus, Fn fn) {
  std::vector<SuiteReport> parts(corpus.entries.size());
  kernels::for_each_index_parallel(corpus.entries.size(),
                                   [&](std::size_t i) { parts[i] = fn(corpus.entries[i], i); });
  SuiteReport r;
  r.suite = name;
  r.corpus_hash = corpus.hash();
  for (auto& p : parts) {
    r.cases += p.cases;
    r.failures.insert(r.failures.end(), p.failures.begin(), p.failures.end());
    r.constants.insert(p.constants.begin(), p.constants.end());
  }
  return r;
}

Polynomial sum_of_squares(int n, double weight) {
  TermMap t;
  for (int i = 0; i < n; ++i) {
    Exponent e(static_cast<std::size_t>(n), 0);
    e[i] = 2;
    t[e] = weight;
  }
  return Polynomial(n, t);
}

}  // namespace

Corpus Corpus::make(const std::vector<std::pair<std::string, Polynomial>>& polys, std::uint64_t seed) {
  Corpus c;
  c.seed = seed;
  for (const auto& [name, g] : polys) {
    const auto m = combined_degree(g);
    if (!m) throw ConfigError("corpus entry " + name + ": " + combined_degree_rejection(g));
    if (has_affine_part(g)) throw ConfigError("corpus entry " + name + ": constant or linear terms");
    const ConvexityReport cr = check_convexity(g, 2.0, 4000, seed);
    if (cr.min_eigenvalue < -kConvexityTolerance)
      throw ConfigError("corpus entry " + name + ": not convex, min Hessian eigenvalue " +
                        fmt17(cr.min_eigenvalue));
    std::vector<std::string> tags{g.dim() == 1 ? "one-variable" : std::to_string(g.dim()) + "-variable"};
    bool axis_aligned = true;
    for (const auto& t : g.terms())
      if (std::count_if(t.exponent.begin(), t.exponent.end(), [](int e) { return e > 0; }) > 1)
        axis_aligned = false;
    if (axis_aligned) tags.push_back("separable");
    c.entries.push_back({name, g, *m, tags});
  }
  return c;
}

Corpus Corpus::default_corpus(std::uint64_t seed) {
  return make({{"v^2", Polynomial(1, {{{2}, 1.0}})},
               {"v^4", Polynomial(1, {{{4}, 1.0}})},
               {"v^4+v^2", Polynomial(1, {{{4}, 1.0}, {{2}, 1.0}})},
               {"v^2+v^3+v^4", Polynomial(1, {{{2}, 1.0}, {{3}, 1.0}, {{4}, 1.0}})},
               {"v1^2+v2^2", Polynomial(2, {{{2, 0}, 1.0}, {{0, 2}, 1.0}})},
               {"v1^2+v2^4", Polynomial(2, {{{2, 0}, 1.0}, {{0, 4}, 1.0}})},
               {"v1^2+v1v2+v2^2+v1^2v2^2+v1^4+v2^6",
                Polynomial(2, {{{2, 0}, 1.0}, {{1, 1}, 1.0}, {{0, 2}, 1.0}, {{2, 2}, 1.0},
                               {{4, 0}, 1.0}, {{0, 6}, 1.0}})},
               {"v1^2+v2^2+v3^4", Polynomial(3, {{{2, 0, 0}, 1.0}, {{0, 2, 0}, 1.0}, {{0, 0, 4}, 1.0}})}},
              seed);
}

Corpus Corpus::one_variable() const {
  Corpus c;
  c.seed = seed;
  for (const auto& e : entries)
    if (e.g.dim() == 1) c.entries.push_back(e);
  return c;
}

std::string Corpus::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  };
  feed(std::to_string(seed));
  for (const auto& e : entries) {
    feed("\n#" + e.name + "\n");
    feed(e.g.to_text());
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool SuiteReport::constants_finite() const {
  return std::all_of(constants.begin(), constants.end(), [](const auto& kv) { return std::isfinite(kv.second); });
}

std::string SuiteReport::to_json() const {
  std::ostringstream os;
  os << "{\"suite\":" << quoted(suite) << ",\"corpus_hash\":" << quoted(corpus_hash) << ",\"cases\":" << cases
     << ",\"passed\":" << (passed() ? "true" : "false") << ",\"failures\":[";
  for (std::size_t i = 0; i < failures.size(); ++i)
    os << (i ? "," : "") << "{\"case\":" << quoted(failures[i].case_name)
       << ",\"detail\":" << quoted(failures[i].detail) << '}';
  os << "],\"constants\":{";
  bool first = true;
  for (const auto& [k, v] : constants) {
    os << (first ? "" : ",") << quoted(k) << ':' << (std::isfinite(v) ? fmt17(v) : quoted(fmt17(v)));
    first = false;
  }
  os << "}}";
  return os.str();
}

double sphere_average(const Polynomial& g, double a, const VerifyConfig& cfg) {
  if (!(a > 0.0)) throw Error("sphere_average: radius must be positive");
  const SphereRule rule = sphere_rule(g.dim(), cfg.sphere_order);
  double s = 0.0, w = 0.0;
  for (std::size_t k = 0; k < rule.points.size(); ++k) {
    s += rule.weights[k] * g(Vec(a * rule.points[k]));
    w += rule.weights[k];
  }
  return s / w;
}

SuiteReport coeff_bound_suite(const Corpus& corpus, double a, const VerifyConfig& cfg) {
  SuiteReport r = run_entries("coeff_bound", corpus, [&](const CorpusEntry& e, std::size_t idx) {
    SuiteReport p;
    p.cases = 1;
    if (has_affine_part(e.g)) {
      p.failures.push_back({e.name, "constant or linear terms present"});
      return p;
    }
    const double coef = e.g.abs_coefficient_sum();
    const double ratio = coef / sphere_average(e.g, a, cfg);
    p.constants["ratio[" + e.name + "]"] = ratio;
    const Polynomial scaled = e.g * 7.0;
    const double ratio7 = scaled.abs_coefficient_sum() / sphere_average(scaled, a, cfg);
    if (!(std::abs(ratio7 / ratio - 1.0) <= 1e-12))
      p.failures.push_back({e.name, "ratio not invariant under g -> 7 g: " + fmt17(ratio) + " vs " + fmt17(ratio7)});

    // lower bound g >= C2 sum |c| on the sphere |x| = a, for bodies with a ball sandwich
    const int n = e.g.dim();
    const SublevelSet unit{e.g, 1.0};
    double r_in = std::numeric_limits<double>::infinity();
    for (const Vec& u : hemisphere_directions(n, n == 1 ? 1 : 64)) {
      r_in = std::min(r_in, ray_distance(unit, u));
      r_in = std::min(r_in, ray_distance(unit, Vec(-u)));
    }
    const double r_out = bounding_radius(unit);
    if (r_in > 0.0 && std::isfinite(r_out)) {
      CounterRng rng(cfg.seed, idx);
      double c2 = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg.sample_points; ++k) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = rng.normal();
        x *= a / x.norm();
        c2 = std::min(c2, e.g(x) / coef);
      }
      p.constants["C2[" + e.name + "]"] = c2;
      if (!(c2 > 0.0)) p.failures.push_back({e.name, "lower coefficient constant not positive: " + fmt17(c2)});
    } else {
      p.failures.push_back({e.name, "no ball sandwich: inner " + fmt17(r_in) + ", outer " + fmt17(r_out)});
    }
    return p;
  });
  double overall = 0.0;
  for (const auto& e : corpus.entries) {
    const double v = r.constants["ratio[" + e.name + "]"];
    overall = std::max(overall, v);
    double& cls = r.constants["max_ratio" + degree_label(e.m)];
    cls = std::max(cls, v);
  }
  r.constants["max_ratio"] = overall;
  return r;
}

SuiteReport bnw_suite(const Corpus& corpus, const VerifyConfig& cfg) {
  const Corpus one = corpus.one_variable();
  SuiteReport r = run_entries("bnw", one, [&](const CorpusEntry& e, std::size_t) {
    SuiteReport p;
    p.cases = 1;
    std::vector<int> j;
    std::vector<double> c;
    for (const auto& t : e.g.terms()) {
      j.push_back(t.exponent[0]);
      c.push_back(t.coefficient);
    }
    if (e.g.coefficient({0}) != 0.0 || e.g.coefficient({1}) != 0.0) {
      p.failures.push_back({e.name, "p(0) or p'(0) nonzero"});
      return p;
    }
    double c_m = std::numeric_limits<double>::infinity();
    double c_d = std::numeric_limits<double>::infinity();
    int upper_failures = 0;
    double worst_t = 0.0;
    for (int k = 1; k < cfg.bnw_points; ++k) {
      const double t = cfg.bnw_t_max * k / (cfg.bnw_points - 1);
      double pv = 0.0, uv = 0.0, dp = 0.0, du = 0.0;
      for (std::size_t q = 0; q < j.size(); ++q) {
        const double pw = std::pow(t, j[q]);
        const double pd = j[q] * std::pow(t, j[q] - 1);
        pv += c[q] * pw;
        uv += std::abs(c[q]) * pw;
        dp += c[q] * pd;
        du += std::abs(c[q]) * pd;
      }
      if (pv > uv) {
        ++upper_failures;
        worst_t = t;
      }
      c_m = std::min(c_m, pv / uv);
      c_d = std::min(c_d, dp / du);
    }
    if (upper_failures)
      p.failures.push_back({e.name, std::to_string(upper_failures) + " grid points violate p <= sum |a_j| t^j, e.g. t = " +
                                        fmt17(worst_t)});
    p.constants["C_M[" + e.name + "]"] = c_m;
    p.constants["C_M_derivative[" + e.name + "]"] = c_d;
    if (!(c_m > 0.0)) p.failures.push_back({e.name, "C_M not positive: " + fmt17(c_m)});
    if (!(c_d > 0.0)) p.failures.push_back({e.name, "derivative constant not positive: " + fmt17(c_d)});
    return p;
  });
  double c_m = std::numeric_limits<double>::infinity(), c_d = c_m;
  for (const auto& e : one.entries) {
    c_m = std::min(c_m, r.constants["C_M[" + e.name + "]"]);
    c_d = std::min(c_d, r.constants["C_M_derivative[" + e.name + "]"]);
  }
  r.corpus_hash = corpus.hash();
  r.constants["C_M"] = c_m;
  r.constants["C_M_derivative"] = c_d;
  return r;
}

SuiteReport appendix_suite(const Corpus& corpus, const VerifyConfig& cfg) {
  SuiteReport r = run_entries("appendix", corpus, [&](const CorpusEntry& e, std::size_t) {
    SuiteReport p;
    std::vector<double> lambdas = cfg.lambdas;
    lambdas.push_back(1.0);
    for (double x : cfg.levels)
      for (double lam : lambdas) {
        ++p.cases;
        const ScalingCheck s = scaling_check(e.g, x, lam, cfg.volume);
        if (!s.holds)
          p.failures.push_back({e.name + " lambda=" + fmt17(lam) + " x=" + fmt17(x),
                                "vol(lambda x) = " + fmt17(s.vol_lambda_x) + " < lambda^n vol(x) = " +
                                    fmt17(std::pow(lam, e.g.dim()) * s.vol_x)});
      }
    ++p.cases;
    const ExpIntegralEquiv q = exp_integral_equiv(e.g, cfg.volume);
    p.constants["I_over_V[" + e.name + "]"] = q.ratio;
    const double lo = std::exp(-1.0);
    if (!(q.ratio >= lo && q.ratio <= q.upper_bound))
      p.failures.push_back({e.name, "I/V = " + fmt17(q.ratio) + " outside [" + fmt17(lo) + ", " +
                                        fmt17(q.upper_bound) + "]"});
    return p;
  });
  return r;
}

Polynomial normalised(const Polynomial& g, const EllipsoidConfig& cfg) {
  const int n = g.dim();
  const MuFactors f = mu_factors(g, 1.0, cfg);
  Mat q = f.axes * f.mu.asDiagonal();
  const Mat& a = f.ellipsoid.shape;
  bool even = true;  // even in every coordinate: the inscribed ellipsoid is axis-aligned by symmetry
  for (const auto& t : g.terms())
    for (int e : t.exponent) even = even && e % 2 == 0;
  const Mat off = a - Mat(a.diagonal().asDiagonal());
  if (even || off.cwiseAbs().maxCoeff() <= 1e-6 * a.diagonal().cwiseAbs().maxCoeff()) {
    const double c_star = f.sandwich_outer;
    q = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) q(i, i) = c_star / std::sqrt(a(i, i));
  }
  return g.substitute_affine(q, Vec::Zero(n)).without_affine_part();
}

double decay_window_scale(const Polynomial& g, int axis, const VerifyConfig& cfg) {
  const int n = g.dim();
  const auto m = combined_degree(g);
  if (!m) return 1.0;
  Exponent top(static_cast<std::size_t>(n), 0);
  top[axis] = 2 * m->m[axis];
  const double c = g.coefficient(top);
  double scale = 1.0;
  for (int k = 0; k < 12; ++k, scale *= 4.0) {
    Vec eta = Vec::Zero(n);
    eta[axis] = cfg.decay_lo * scale;
    const LegendreResult r = legendre(g, eta, cfg.theta.legendre);
    const double gv = g(r.v0);
    if (gv > 0.0 && c * std::pow(r.v0[axis], top[axis]) >= cfg.dominance * gv) break;
  }
  return scale;
}

std::vector<RayDecay> axis_decay(const Polynomial& g, const VerifyConfig& cfg, const std::vector<double>& scales) {
  const int n = g.dim();
  const auto m = combined_degree(g);
  std::vector<RayDecay> out;
  for (int i = 0; i < n; ++i) {
    RayDecay d;
    d.axis = i;
    d.expected = m ? 2.0 * m->m[i] / (2.0 * m->m[i] - 1.0) : std::numeric_limits<double>::quiet_NaN();
    d.window_scale = scales.empty() ? decay_window_scale(g, i, cfg) : scales[i];
    std::vector<double> s, lt;
    Vec warm = Vec::Zero(n);
    for (int k = 0; k < cfg.decay_points; ++k) {
      const double x = d.window_scale * (cfg.decay_lo + (cfg.decay_hi - cfg.decay_lo) * k / (cfg.decay_points - 1));
      Vec eta = Vec::Zero(n);
      eta[i] = x;
      const ThetaValue tv = denominator_integral(g, eta, cfg.theta, &warm);
      warm = tv.v0;
      s.push_back(x);
      lt.push_back(-tv.log_I);
    }
    d.fit = fit_decay_exponent(s, lt);
    out.push_back(d);
  }
  return out;
}

SuiteReport decay_suite(const Corpus& corpus, const VerifyConfig& cfg) {
  return run_entries("decay", corpus, [&](const CorpusEntry& e, std::size_t) {
    SuiteReport p;
    const Polynomial gn = normalised(e.g);
    const Polynomial vn = normalised(e.g + sum_of_squares(e.g.dim(), cfg.perturbation));
    const bool aligned = combined_degree(gn).has_value() && combined_degree(vn).has_value();
    std::vector<double> scales(e.g.dim());
    for (int i = 0; i < e.g.dim(); ++i)
      scales[i] = std::max(decay_window_scale(gn, i, cfg), decay_window_scale(vn, i, cfg));
    const std::vector<RayDecay> base = axis_decay(gn, cfg, scales);
    const std::vector<RayDecay> pert = axis_decay(vn, cfg, scales);
    for (std::size_t i = 0; i < base.size(); ++i) {
      const std::string tag = e.name + ",axis " + std::to_string(i);
      p.constants["exponent[" + tag + "]"] = base[i].fit.exponent;
      p.constants["raw_slope[" + tag + "]"] = base[i].fit.raw_slope;
      p.constants["coefficient[" + tag + "]"] = base[i].fit.coefficient;
      p.constants["coefficient_perturbed[" + tag + "]"] = pert[i].fit.coefficient;
      p.constants["window_scale[" + tag + "]"] = scales[i];
      if (!aligned) continue;  // rotated rescaling: no axis exponent to compare against
      ++p.cases;
      if (!(std::abs(base[i].fit.exponent - base[i].expected) <= cfg.decay_exponent_tol))
        p.failures.push_back({tag, "exponent " + fmt17(base[i].fit.exponent) + ", expected " +
                                       fmt17(base[i].expected)});
      ++p.cases;
      const double c1 = base[i].fit.coefficient, c2 = pert[i].fit.coefficient;
      if (!(c1 > 0.0 && c2 > 0.0 && std::max(c1 / c2, c2 / c1) <= cfg.decay_constant_factor))
        p.failures.push_back({tag, "decay constants " + fmt17(c1) + " and " + fmt17(c2) +
                                       " differ by more than a factor " + fmt17(cfg.decay_constant_factor)});
    }
    return p;
  });
}

}  // namespace szego

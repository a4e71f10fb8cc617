#include "szego/polynomial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "szego/random.hpp"

namespace szego {

bool GradLexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = std::accumulate(a.begin(), a.end(), 0);
  const int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db;
  return a < b;
}

namespace {

// Power table pw[i * stride + k] = v_i^k. Small tables stay on the stack.
class PowerTable {
 public:
  PowerTable(std::span<const double> v, const std::vector<int>& max_exp) {
    stride_ = 1;
    for (int e : max_exp) stride_ = std::max(stride_, e + 1);
    const std::size_t need = v.size() * static_cast<std::size_t>(stride_);
    if (need <= stack_.size()) {
      data_ = stack_.data();
    } else {
      heap_.resize(need);
      data_ = heap_.data();
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      double* row = data_ + i * stride_;
      row[0] = 1.0;
      for (int k = 1; k < stride_; ++k) row[k] = row[k - 1] * v[i];
    }
  }
  double operator()(std::size_t i, int k) const { return data_[i * stride_ + k]; }

 private:
  std::array<double, 96> stack_;
  std::vector<double> heap_;
  double* data_;
  int stride_;
};

}  // namespace

Polynomial::Polynomial(int dim) : dim_(dim), max_exp_(static_cast<std::size_t>(dim), 0) {
  if (dim < 1) throw Error("polynomial dimension must be positive");
}

Polynomial::Polynomial(int dim, const TermMap& terms) : Polynomial(dim) { build(terms); }

Polynomial::Polynomial(int dim, std::initializer_list<std::pair<Exponent, double>> terms)
    : Polynomial(dim) {
  TermMap m;
  for (const auto& [alpha, c] : terms) m[alpha] += c;
  build(m);
}

Polynomial Polynomial::constant(int dim, double c) {
  return Polynomial(dim, {{Exponent(static_cast<std::size_t>(dim), 0), c}});
}

Polynomial Polynomial::variable(int dim, int i) {
  Exponent e(static_cast<std::size_t>(dim), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Polynomial(dim, {{e, 1.0}});
}

void Polynomial::build(const TermMap& terms) {
  exps_.clear();
  coefs_.clear();
  std::fill(max_exp_.begin(), max_exp_.end(), 0);
  for (const auto& [alpha, c] : terms) {
    if (alpha.size() != static_cast<std::size_t>(dim_)) throw DimensionMismatch(dim_, alpha.size());
    for (int e : alpha)
      if (e < 0) throw Error("negative exponent");
    if (std::abs(c) < kDropTolerance) continue;
    exps_.insert(exps_.end(), alpha.begin(), alpha.end());
    coefs_.push_back(c);
    for (int i = 0; i < dim_; ++i) max_exp_[i] = std::max(max_exp_[i], alpha[i]);
  }
}

TermMap Polynomial::term_map() const {
  TermMap m;
  for (std::size_t t = 0; t < coefs_.size(); ++t)
    m.emplace(Exponent(exps_.begin() + t * dim_, exps_.begin() + (t + 1) * dim_), coefs_[t]);
  return m;
}

std::vector<Polynomial::Term> Polynomial::terms() const {
  std::vector<Term> out;
  out.reserve(coefs_.size());
  for (std::size_t t = 0; t < coefs_.size(); ++t)
    out.push_back({Exponent(exps_.begin() + t * dim_, exps_.begin() + (t + 1) * dim_), coefs_[t]});
  return out;
}

double Polynomial::coefficient(const Exponent& alpha) const {
  for (std::size_t t = 0; t < coefs_.size(); ++t)
    if (std::equal(alpha.begin(), alpha.end(), exps_.begin() + t * dim_)) return coefs_[t];
  return 0.0;
}

int Polynomial::total_degree() const {
  int d = 0;
  for (std::size_t t = 0; t < coefs_.size(); ++t)
    d = std::max(d, std::accumulate(exps_.begin() + t * dim_, exps_.begin() + (t + 1) * dim_, 0));
  return d;
}

double Polynomial::abs_coefficient_sum() const {
  double s = 0.0;
  for (double c : coefs_) s += std::abs(c);
  return s;
}

void Polynomial::check_dim(std::size_t n) const {
  if (n != static_cast<std::size_t>(dim_)) throw DimensionMismatch(dim_, n);
}

double Polynomial::evaluate(std::span<const double> v) const {
  check_dim(v.size());
  const PowerTable pw(v, max_exp_);
  double sum = 0.0;
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += dim_) {
    double term = coefs_[t];
    for (int i = 0; i < dim_; ++i) term *= pw(i, e[i]);
    sum += term;
  }
  return sum;
}

Vec Polynomial::gradient(std::span<const double> v) const {
  check_dim(v.size());
  const PowerTable pw(v, max_exp_);
  Vec g = Vec::Zero(dim_);
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += dim_) {
    for (int i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      double term = coefs_[t] * e[i];
      for (int j = 0; j < dim_; ++j) term *= pw(j, j == i ? e[j] - 1 : e[j]);
      g[i] += term;
    }
  }
  return g;
}

Mat Polynomial::hessian(std::span<const double> v) const {
  double value;
  Vec g;
  Mat h;
  value_gradient_hessian(v, value, g, h);
  return h;
}

void Polynomial::value_gradient_hessian(std::span<const double> v, double& value, Vec& grad,
                                        Mat& hess) const {
  check_dim(v.size());
  const PowerTable pw(v, max_exp_);
  value = 0.0;
  grad = Vec::Zero(dim_);
  hess = Mat::Zero(dim_, dim_);
  std::array<int, 16> d{};
  std::vector<int> dheap;
  int* dd = d.data();
  if (dim_ > 16) {
    dheap.resize(static_cast<std::size_t>(dim_));
    dd = dheap.data();
  }
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += dim_) {
    const double c = coefs_[t];
    double term = c;
    for (int i = 0; i < dim_; ++i) term *= pw(i, e[i]);
    value += term;
    for (int i = 0; i < dim_; ++i) {
      if (e[i] == 0) continue;
      std::copy(e, e + dim_, dd);
      dd[i] -= 1;
      double gi = c * e[i];
      for (int j = 0; j < dim_; ++j) gi *= pw(j, dd[j]);
      grad[i] += gi;
      for (int k = i; k < dim_; ++k) {
        if (dd[k] == 0) continue;
        double hik = c * e[i] * dd[k];
        dd[k] -= 1;
        for (int j = 0; j < dim_; ++j) hik *= pw(j, dd[j]);
        dd[k] += 1;
        hess(i, k) += hik;
      }
    }
  }
  for (int i = 0; i < dim_; ++i)
    for (int k = 0; k < i; ++k) hess(i, k) = hess(k, i);
}

Polynomial Polynomial::derivative(int var) const {
  TermMap m;
  for (const auto& [alpha, c] : term_map()) {
    if (alpha[var] == 0) continue;
    Exponent a = alpha;
    a[var] -= 1;
    m[a] += c * alpha[var];
  }
  return Polynomial(dim_, m);
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch(dim_, o.dim_);
  TermMap m = term_map();
  for (const auto& [alpha, c] : o.term_map()) m[alpha] += c;
  return Polynomial(dim_, m);
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0; }

Polynomial Polynomial::operator*(double s) const {
  TermMap m = term_map();
  for (auto& [alpha, c] : m) c *= s;
  return Polynomial(dim_, m);
}

Polynomial operator*(double s, const Polynomial& p) { return p * s; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (o.dim_ != dim_) throw DimensionMismatch(dim_, o.dim_);
  TermMap m;
  const TermMap a = term_map();
  const TermMap b = o.term_map();
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponent e(ea.size());
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      m[e] += ca * cb;
    }
  return Polynomial(dim_, m);
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw Error("negative polynomial power");
  Polynomial result = constant(dim_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::substitute_affine(const Mat& q, const Vec& c) const {
  if (q.rows() != dim_) throw DimensionMismatch(dim_, static_cast<std::size_t>(q.rows()));
  if (c.size() != dim_) throw DimensionMismatch(dim_, static_cast<std::size_t>(c.size()));
  const int out_dim = static_cast<int>(q.cols());
  // powers[i][k] = (sum_j q_ij v_j + c_i)^k
  std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(dim_));
  for (int i = 0; i < dim_; ++i) {
    TermMap lin;
    lin[Exponent(static_cast<std::size_t>(out_dim), 0)] = c[i];
    for (int j = 0; j < out_dim; ++j) {
      Exponent e(static_cast<std::size_t>(out_dim), 0);
      e[j] = 1;
      lin[e] += q(i, j);
    }
    const Polynomial l(out_dim, lin);
    auto& row = powers[i];
    row.push_back(constant(out_dim, 1.0));
    for (int k = 1; k <= max_exp_[i]; ++k) row.push_back(row.back() * l);
  }
  TermMap acc;
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += dim_) {
    Polynomial term = constant(out_dim, coefs_[t]);
    for (int i = 0; i < dim_; ++i)
      if (e[i] > 0) term = term * powers[i][e[i]];
    for (const auto& [alpha, cf] : term.term_map()) acc[alpha] += cf;
  }
  return Polynomial(out_dim, acc);
}

Polynomial Polynomial::shift(const Vec& c) const {
  return substitute_affine(Mat::Identity(dim_, dim_), c);
}

Polynomial Polynomial::without_affine_part() const {
  TermMap m;
  for (const auto& [alpha, c] : term_map())
    if (std::accumulate(alpha.begin(), alpha.end(), 0) >= 2) m.emplace(alpha, c);
  return Polynomial(dim_, m);
}

std::string Polynomial::to_text() const {
  std::ostringstream os;
  os << std::setprecision(17);
  const int* e = exps_.data();
  for (std::size_t t = 0; t < coefs_.size(); ++t, e += dim_) {
    os << coefs_[t];
    for (int i = 0; i < dim_; ++i) os << ' ' << e[i];
    os << '\n';
  }
  return os.str();
}

Polynomial Polynomial::from_text(const std::string& text, int dim) {
  TermMap m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  int width = dim;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // Tokenize while tracking columns for error messages.
    std::vector<std::pair<std::string, int>> tokens;
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      tokens.emplace_back(line.substr(start, i - start), static_cast<int>(start) + 1);
    }
    if (tokens.empty()) continue;
    if (tokens.size() < 2) throw ParseError("record needs a coefficient and exponents", lineno, tokens[0].second);
    if (width == 0) width = static_cast<int>(tokens.size()) - 1;
    if (static_cast<int>(tokens.size()) - 1 != width)
      throw ParseError("expected " + std::to_string(width) + " exponents, got " +
                           std::to_string(tokens.size() - 1),
                       lineno, tokens.back().second);
    double c;
    try {
      std::size_t used = 0;
      c = std::stod(tokens[0].first, &used);
      if (used != tokens[0].first.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("bad coefficient '" + tokens[0].first + "'", lineno, tokens[0].second);
    }
    if (!std::isfinite(c)) throw ParseError("non-finite coefficient", lineno, tokens[0].second);
    Exponent alpha;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto& [tok, col] = tokens[k];
      if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw ParseError("bad exponent '" + tok + "'", lineno, col);
      alpha.push_back(std::stoi(tok));
    }
    m[alpha] += c;
  }
  if (width == 0) throw ParseError("empty polynomial", std::max(lineno, 1), 1);
  Polynomial p(width, m);
  if (p.is_zero()) throw ParseError("empty polynomial", std::max(lineno, 1), 1);
  return p;
}

bool Polynomial::operator==(const Polynomial& o) const {
  return dim_ == o.dim_ && exps_ == o.exps_ && coefs_ == o.coefs_;
}

// ---------------------------------------------------------------------------
// combined degree

namespace {

struct Classification {
  std::optional<CombinedDegree> degree;
  std::string reason;
};

std::string format_alpha(const int* e, int n) {
  std::string s = "(";
  for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(e[i]);
  return s + ")";
}

Classification classify(const Polynomial& p) {
  const int n = p.dim();
  if (p.is_zero()) return {std::nullopt, "zero polynomial"};
  const auto terms = p.terms();
  std::vector<int> top(static_cast<std::size_t>(n), 0);
  for (const auto& t : terms) {
    int nonzero = 0, var = -1;
    for (int i = 0; i < n; ++i)
      if (t.exponent[i] > 0) ++nonzero, var = i;
    if (nonzero == 1) top[var] = std::max(top[var], t.exponent[var]);
  }
  CombinedDegree cd;
  for (int i = 0; i < n; ++i) {
    if (top[i] == 0) return {std::nullopt, "no pure term in variable " + std::to_string(i + 1)};
    if (top[i] % 2 != 0)
      return {std::nullopt, "highest pure power of variable " + std::to_string(i + 1) + " is odd (" +
                                std::to_string(top[i]) + ")"};
    cd.m.push_back(top[i] / 2);
  }
  // sum alpha_i / (2 m_i) compared against 1 with integer cross-multiplication.
  long long lcm = 1;
  for (int mi : cd.m) lcm = std::lcm(lcm, 2LL * mi);
  for (const auto& t : terms) {
    long long weighted = 0;
    bool hits_top = false;
    for (int i = 0; i < n; ++i) {
      weighted += static_cast<long long>(t.exponent[i]) * (lcm / (2LL * cd.m[i]));
      if (t.exponent[i] == 2 * cd.m[i]) hits_top = true;
    }
    const std::string a = format_alpha(t.exponent.data(), n);
    if (weighted > lcm) return {std::nullopt, "condition (1) violated by alpha=" + a};
    if ((weighted == lcm) != hits_top) return {std::nullopt, "condition (2) violated by alpha=" + a};
  }
  return {cd, ""};
}

}  // namespace

std::optional<CombinedDegree> combined_degree(const Polynomial& p) { return classify(p).degree; }

std::string combined_degree_rejection(const Polynomial& p) { return classify(p).reason; }

// ---------------------------------------------------------------------------
// sampling utilities

namespace {

Vec sample_in_ball(CounterRng& rng, int n, double radius) {
  Vec d(n);
  double norm = 0.0;
  do {
    for (int i = 0; i < n; ++i) d[i] = rng.normal();
    norm = d.norm();
  } while (norm == 0.0);
  const double r = radius * std::pow(rng.uniform(), 1.0 / n);
  return d * (r / norm);
}

}  // namespace

ConvexityReport check_convexity(const Polynomial& p, double radius, std::size_t samples,
                                std::uint64_t seed) {
  if (!(radius > 0.0)) throw Error("convexity radius must be positive");
  if (samples == 0) throw Error("convexity check needs at least one sample");
  CounterRng rng(seed, 0xc0ffee);
  ConvexityReport rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  double value;
  Vec grad;
  Mat hess;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec v = sample_in_ball(rng, p.dim(), radius);
    p.value_gradient_hessian({v.data(), static_cast<std::size_t>(v.size())}, value, grad, hess);
    const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(hess, Eigen::EigenvaluesOnly).eigenvalues()[0];
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, lmin);
  }
  rep.sampled_points = samples;
  rep.strictly_convex = rep.min_eigenvalue > kConvexityTolerance;
  return rep;
}

Polynomial r_majorant(const CombinedDegree& m) {
  const int n = m.dim();
  TermMap t;
  for (int i = 0; i < n; ++i) {
    Exponent e(static_cast<std::size_t>(n), 0);
    e[i] = 2 * m.m[i];
    t[e] = 1.0;
  }
  return Polynomial(n, t);
}

double dominance_constant(const Polynomial& g, const CombinedDegree& m, double radius,
                          std::size_t samples, std::uint64_t seed) {
  const auto cd = combined_degree(g);
  if (!cd || !(*cd == m)) throw NotCombinedDegree("polynomial is not of the given combined degree");
  const Polynomial r = r_majorant(m);
  CounterRng rng(seed, 0xd0d0);
  double sup = -std::numeric_limits<double>::infinity();
  const Vec zero = Vec::Zero(g.dim());
  sup = std::max(sup, g(zero) / (1.0 + r(zero)));
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec v = sample_in_ball(rng, g.dim(), radius);
    sup = std::max(sup, g(v) / (1.0 + r(v)));
  }
  return sup;
}

}  // namespace szego

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "szego/errors.hpp"

namespace szego {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Exponent = std::vector<int>;

/// Graded-lexicographic order: total degree first, then lexicographic.
struct GradLexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

using TermMap = std::map<Exponent, double, GradLexLess>;

/// Sparse multivariate polynomial with real coefficients.
///
/// Immutable after construction. Terms are kept in graded-lex order and every
/// reduction (evaluation, coefficient sums) walks them in that order, so
/// results do not depend on how the polynomial was assembled. Coefficients
/// with magnitude below kDropTolerance are discarded.
class Polynomial {
 public:
  static constexpr double kDropTolerance = 1e-14;

  struct Term {
    Exponent exponent;
    double coefficient;
  };

  explicit Polynomial(int dim = 1);
  Polynomial(int dim, const TermMap& terms);
  Polynomial(int dim, std::initializer_list<std::pair<Exponent, double>> terms);

  static Polynomial constant(int dim, double c);
  /// The coordinate function v_i.
  static Polynomial variable(int dim, int i);

  int dim() const { return dim_; }
  std::size_t size() const { return coefs_.size(); }
  bool is_zero() const { return coefs_.empty(); }
  std::vector<Term> terms() const;
  double coefficient(const Exponent& alpha) const;
  int total_degree() const;
  int max_exponent(int var) const { return max_exp_[var]; }
  /// Sum of |c_alpha| over all stored terms.
  double abs_coefficient_sum() const;

  double evaluate(std::span<const double> v) const;
  double operator()(std::span<const double> v) const { return evaluate(v); }
  double operator()(const Vec& v) const { return evaluate(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); }
  Vec gradient(std::span<const double> v) const;
  Vec gradient(const Vec& v) const { return gradient(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); }
  Mat hessian(std::span<const double> v) const;
  Mat hessian(const Vec& v) const { return hessian(std::span<const double>(v.data(), static_cast<std::size_t>(v.size()))); }
  /// Value, gradient and Hessian in one pass over the terms.
  void value_gradient_hessian(std::span<const double> v, double& value, Vec& grad, Mat& hess) const;

  Polynomial derivative(int var) const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial pow(int k) const;

  /// p(Q v + c) expanded into monomials of v.
  Polynomial substitute_affine(const Mat& q, const Vec& c) const;
  /// p(v + c), the exact binomial shift.
  Polynomial shift(const Vec& c) const;
  /// Removes terms of total degree 0 and 1.
  Polynomial without_affine_part() const;

  /// One record per line: `coefficient e_1 ... e_n`.
  std::string to_text() const;
  /// Parses the record form above. Blank lines and `#` comments are skipped.
  static Polynomial from_text(const std::string& text, int dim = 0);

  bool operator==(const Polynomial& o) const;

 private:
  void build(const TermMap& terms);
  TermMap term_map() const;
  void check_dim(std::size_t n) const;

  int dim_;
  std::vector<int> exps_;  // size() * dim_, row per term
  std::vector<double> coefs_;
  std::vector<int> max_exp_;
};

Polynomial operator*(double s, const Polynomial& p);

/// Anisotropic degree (m_1, ..., m_n) with every m_i >= 1.
struct CombinedDegree {
  std::vector<int> m;
  int dim() const { return static_cast<int>(m.size()); }
  bool operator==(const CombinedDegree&) const = default;
};

/// Returns (m_1..m_n) if p is of combined degree, absent otherwise.
std::optional<CombinedDegree> combined_degree(const Polynomial& p);

/// Why combined_degree rejected p; empty when it accepts.
std::string combined_degree_rejection(const Polynomial& p);

struct ConvexityReport {
  std::size_t sampled_points = 0;
  double min_eigenvalue = 0.0;
  bool strictly_convex = false;
};

inline constexpr double kConvexityTolerance = 1e-9;

/// Samples `samples` points uniformly in the ball of `radius` and records the
/// smallest Hessian eigenvalue seen.
ConvexityReport check_convexity(const Polynomial& p, double radius, std::size_t samples,
                                std::uint64_t seed);

/// r(v) = v_1^{2 m_1} + ... + v_n^{2 m_n}.
Polynomial r_majorant(const CombinedDegree& m);

/// Empirical sup of g(v) / (1 + r(v)) over samples in the ball of `radius`.
/// Throws NotCombinedDegree unless g has combined degree m.
double dominance_constant(const Polynomial& g, const CombinedDegree& m, double radius,
                          std::size_t samples, std::uint64_t seed);

}  // namespace szego

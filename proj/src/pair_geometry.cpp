#include "szego/pair_geometry.hpp"

#include <cmath>
#include <iomanip>
#include <regex>
#include <sstream>

namespace szego {

namespace {

void check(const Polynomial& b, const Vec& v) {
  if (v.size() != b.dim()) throw DimensionMismatch(b.dim(), static_cast<std::size_t>(v.size()));
}

// Neumaier summation.
double compensated_sum(std::initializer_list<double> xs) {
  double sum = 0.0, comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

}  // namespace

Polynomial tilde_b(const Polynomial& b, const Vec& x, const Vec& x_prime) {
  check(b, x);
  check(b, x_prime);
  const Vec mid = 0.5 * (x + x_prime);
  // The tangent plane at mid is exactly the affine part of the shifted polynomial.
  return b.shift(mid).without_affine_part();
}

double delta(const Polynomial& b, const Vec& x, const Vec& x_prime) {
  check(b, x);
  check(b, x_prime);
  if (x == x_prime) return 0.0;
  const Vec mid = 0.5 * (x + x_prime);
  return compensated_sum({b(x), b(x_prime), -2.0 * b(mid)});
}

double w_offset(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime) {
  check(b, p.x);
  check(b, p.y);
  check(b, p_prime.x);
  check(b, p_prime.y);
  const Vec mid = 0.5 * (p.x + p_prime.x);
  return (p_prime.t - p.t) + b.gradient(mid).dot(p_prime.y - p.y);
}

PairData pair_data(const Polynomial& b, const BoundaryPoint& p, const BoundaryPoint& p_prime) {
  PairData d;
  d.b_tilde = tilde_b(b, p.x, p_prime.x);
  d.delta = delta(b, p.x, p_prime.x);
  d.w = w_offset(b, p, p_prime);
  d.gamma = p.y - p_prime.y;
  return d;
}

namespace {

Vec parse_vector(const std::string& body) {
  std::vector<double> xs;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const std::string trimmed = std::regex_replace(item, std::regex("^\\s+|\\s+$"), "");
    if (trimmed.empty()) continue;
    xs.push_back(std::stod(trimmed, &used));
    if (used != trimmed.size()) throw std::invalid_argument(trimmed);
  }
  return Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

}  // namespace

BoundaryPoint parse_boundary_point(const std::string& record) {
  static const std::regex re(
      R"(^\s*x\s*=\s*\[([^\]]*)\]\s+y\s*=\s*\[([^\]]*)\]\s+t\s*=\s*([-+0-9.eE]+)\s*$)");
  std::smatch m;
  if (!std::regex_match(record, m, re))
    throw ConfigError("bad boundary point record '" + record + "' (want x=[..] y=[..] t=..)");
  BoundaryPoint p;
  try {
    p.x = parse_vector(m[1].str());
    p.y = parse_vector(m[2].str());
    p.t = std::stod(m[3].str());
  } catch (const std::exception&) {
    throw ConfigError("bad number in boundary point record '" + record + "'");
  }
  if (p.x.size() != p.y.size() || p.x.size() == 0)
    throw ConfigError("x and y must have the same positive length in '" + record + "'");
  return p;
}

std::string format_boundary_point(const BoundaryPoint& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  auto vec = [&os](const Vec& v) {
    os << '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
  };
  os << "x=";
  vec(p.x);
  os << " y=";
  vec(p.y);
  os << " t=" << p.t;
  return os.str();
}

}  // namespace szego

#include "cochainflow/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "cochainflow/errors.hpp"

namespace cochainflow {

namespace {

// (P_m(x), P_{m-1}(x)) by the three-term recurrence.
std::pair<double, double> legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

LineRule gauss_legendre(int points) {
  if (points < 1) throw ValidationError("Gauss rule needs at least one point");
  LineRule rule{Eigen::VectorXd(points), Eigen::VectorXd(points)};
  for (int i = 0; i < points; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      auto [p, q] = legendre(points, x);
      const double step = p / (points * (x * p - q) / (x * x - 1.0));
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    auto [p, q] = legendre(points, x);
    const double derivative = points * (x * p - q) / (x * x - 1.0);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * derivative * derivative);
  }
  return rule;
}

namespace {

SimplexRule build_rule(int dim, int degree) {
  SimplexRule rule;
  rule.dim = dim;
  rule.degree = degree;
  if (dim == 0) {
    rule.barycentric = Eigen::MatrixXd::Ones(1, 1);
    rule.weights = Eigen::VectorXd::Ones(1);
    return rule;
  }
  // The Duffy Jacobian adds up to dim-1 powers per direction.
  const int m = (degree + dim) / 2 + 1;
  const LineRule line = gauss_legendre(m);
  long total = 1;
  for (int a = 0; a < dim; ++a) total *= m;
  rule.barycentric.resize(dim + 1, total);
  rule.weights.resize(total);
  std::vector<int> idx(dim, 0);
  for (long p = 0; p < total; ++p) {
    long rest = p;
    for (int a = 0; a < dim; ++a) {
      idx[a] = static_cast<int>(rest % m);
      rest /= m;
    }
    // x_1 = u_1, x_2 = (1-u_1) u_2, ...; remaining mass goes to vertex 0.
    double remaining = 1.0, weight = 1.0;
    for (int a = 0; a < dim; ++a) {
      const double u = line.nodes[idx[a]];
      rule.barycentric(a + 1, p) = remaining * u;
      weight *= line.weights[idx[a]];
      weight *= std::pow(1.0 - u, dim - 1 - a);
      remaining *= 1.0 - u;
    }
    rule.barycentric(0, p) = remaining;
    rule.weights[p] = weight;
  }
  return rule;
}

}  // namespace

const SimplexRule& simplex_rule(int dim, int degree) {
  if (dim < 0) throw ValidationError("negative simplex dimension");
  if (degree < 0) throw ValidationError("negative quadrature degree");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SimplexRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({dim, degree});
  if (it == cache.end()) it = cache.emplace(std::make_pair(dim, degree), build_rule(dim, degree)).first;
  return it->second;
}

}  // namespace cochainflow

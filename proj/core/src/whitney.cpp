#include "cochainflow/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "cochainflow/quadrature.hpp"

namespace cochainflow {

namespace {

double factorial_d(int n) { return static_cast<double>(detail::factorial(n)); }

void require_torus_match(const SimplicialComplex& complex, const AnalyticForm& form) {
  if (!complex.embedded() || complex.ambient_dim() != form.dim()) {
    throw ValidationError("analytic form of dimension " + std::to_string(form.dim()) +
                          " does not match the embedding of the complex");
  }
}

// One piece rewritten in ambient components: sum over monomials of mu^alpha
// times a fixed coefficient vector.
struct AmbientPiece {
  std::vector<std::array<std::uint8_t, kMaxVars>> exponents;
  std::vector<Eigen::VectorXd> coefficients;

  AmbientPiece(const PolyForm<double>& piece, const Eigen::MatrixXd& gradients) {
    const int d = static_cast<int>(gradients.cols());
    const auto& masks = basis_masks(d, piece.degree());
    for (const auto& [t, c] : piece.terms()) {
      auto it = std::find(exponents.begin(), exponents.end(), t.exponents);
      std::size_t slot = static_cast<std::size_t>(it - exponents.begin());
      if (it == exponents.end()) {
        exponents.push_back(t.exponents);
        coefficients.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(masks.size())));
      }
      for (std::size_t j = 0; j < masks.size(); ++j) {
        coefficients[slot][static_cast<Eigen::Index>(j)] += c * detail::masked_det(gradients, t.mask, masks[j]);
      }
    }
  }

  Eigen::VectorXd operator()(const double* bary, Eigen::Index components) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(components);
    for (std::size_t m = 0; m < exponents.size(); ++m) {
      double w = 1.0;
      for (int i = 0; i < kMaxVars; ++i) {
        for (int e = 0; e < exponents[m][i]; ++e) w *= bary[i];
      }
      out += w * coefficients[m];
    }
    return out;
  }
};

struct QuadratureSum {
  double value = 0.0;
  double magnitude = 0.0;  // same sum with |integrand|
  double operands = 0.0;   // integral of |u|^2 + |v|^2, a floor for near-zero results
};

// Integral over all top simplices of g(W-values, analytic values) at one
// quadrature degree.
template <class Integrand>
QuadratureSum integrate_against(const PiecewisePolyForm<double>& a, const AnalyticForm& b, int degree,
                                const std::vector<SimplexGeometry>& geometry, Integrand integrand) {
  const SimplicialComplex& complex = a.complex();
  const int n = complex.dim();
  const SimplexRule& rule = simplex_rule(n, degree);
  const auto components = static_cast<Eigen::Index>(basis_masks(complex.ambient_dim(), a.degree()).size());
  const double nfact = factorial_d(n);
  QuadratureSum total;
  std::array<double, kMaxVars> bary{};
  for (std::size_t t = 0; t < a.size(); ++t) {
    const SimplexGeometry& g = geometry[t];
    const AmbientPiece piece(a.piece(t), g.gradients);
    double value = 0.0;
    double magnitude = 0.0;
    double operands = 0.0;
    for (Eigen::Index q = 0; q < rule.weights.size(); ++q) {
      for (int i = 0; i <= n; ++i) bary[i] = rule.barycentric(i, q);
      const Eigen::VectorXd x = g.points * rule.barycentric.col(q);
      const Eigen::VectorXd u = piece(bary.data(), components);
      const Eigen::VectorXd v = b.evaluate({x.data(), static_cast<std::size_t>(x.size())});
      const double f = integrand(u, v);
      value += rule.weights[q] * f;
      magnitude += rule.weights[q] * std::abs(f);
      operands += rule.weights[q] * (u.squaredNorm() + v.squaredNorm());
    }
    const double jacobian = g.volume * nfact;
    total.value += value * jacobian;
    total.magnitude += magnitude * jacobian;
    total.operands += operands * jacobian;
  }
  return total;
}

template <class Integrand>
double adaptive_integral(const PiecewisePolyForm<double>& a, const AnalyticForm& b, const QuadratureOptions& options,
                         Integrand integrand) {
  require_torus_match(a.complex(), b);
  if (a.degree() != b.degree()) throw ValidationError("L2 pairing of forms of different degree");
  const auto geometry = top_geometry(a.complex());
  int degree = std::max(options.degree, 1);
  QuadratureSum coarse = integrate_against(a, b, degree, geometry, integrand);
  while (2 * degree <= options.max_degree) {
    const QuadratureSum fine = integrate_against(a, b, 2 * degree, geometry, integrand);
    const double scale = std::max({std::abs(fine.value), fine.magnitude, 1e-16 * fine.operands});
    if (std::abs(fine.value - coarse.value) <= options.tolerance * scale) return fine.value;
    coarse = fine;
    degree *= 2;
  }
  throw NumericalError("quadrature did not converge up to degree " + std::to_string(options.max_degree));
}

}  // namespace

SimplexGeometry simplex_geometry(const Eigen::MatrixXd& points) {
  const auto n = points.cols() - 1;
  SimplexGeometry g;
  g.points = points;
  const Eigen::MatrixXd edges = points.rightCols(n).colwise() - points.col(0);
  const Eigen::MatrixXd metric = edges.transpose() * edges;
  const double det = n == 0 ? 1.0 : metric.determinant();
  double diameter = 0.0;
  for (Eigen::Index i = 0; i <= n; ++i) {
    for (Eigen::Index j = i + 1; j <= n; ++j) diameter = std::max(diameter, (points.col(i) - points.col(j)).norm());
  }
  const double volume = std::sqrt(std::max(det, 0.0)) / factorial_d(static_cast<int>(n));
  if (n > 0 && !(volume > 1e-12 * std::pow(diameter, static_cast<double>(n)))) {
    throw ValidationError("degenerate simplex (volume " + std::to_string(volume) + ")");
  }
  g.volume = volume;
  g.gradients = Eigen::MatrixXd::Zero(n + 1, points.rows());
  if (n > 0) {
    const Eigen::MatrixXd tail = metric.inverse() * edges.transpose();  // n x d
    g.gradients.bottomRows(n) = tail;
    g.gradients.row(0) = -tail.colwise().sum();
  }
  g.gram = g.gradients * g.gradients.transpose();
  return g;
}

std::vector<SimplexGeometry> top_geometry(const SimplicialComplex& complex) {
  if (!complex.embedded()) throw ValidationError("geometry requested for a non-embedded complex");
  const int n = complex.dim();
  std::vector<SimplexGeometry> out;
  out.reserve(complex.size(n));
  for (std::size_t t = 0; t < complex.size(n); ++t) out.push_back(simplex_geometry(complex.points(n, t)));
  return out;
}

PiecewisePolyForm<double> whitney_map(const Cochain& c) {
  return detail::whitney_map_impl<double>(c.complex(), c.degree(), c.values());
}

PiecewisePolyForm<Rational> whitney_map_exact(const SimplicialComplex& complex, int degree,
                                              std::span<const Rational> values) {
  if (values.size() != complex.size(degree)) throw ValidationError("cochain size does not match the complex");
  return detail::whitney_map_impl<Rational>(complex, degree, values);
}

Cochain de_rham(const PiecewisePolyForm<double>& form) {
  const auto values = de_rham_values(form);
  return Cochain(form.complex(), form.degree(),
                 Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

Cochain de_rham(const AnalyticForm& form, const SimplicialComplex& complex, const QuadratureOptions& options) {
  require_torus_match(complex, form);
  const int k = form.degree();
  if (k > complex.dim()) throw ValidationError("form degree exceeds complex dimension");
  const std::size_t count = complex.size(k);
  Eigen::VectorXd values(static_cast<Eigen::Index>(count));
  if (k == 0) {
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::VectorXd x = complex.points(0, i).col(0);
      values[static_cast<Eigen::Index>(i)] = form.evaluate({x.data(), static_cast<std::size_t>(x.size())})[0];
    }
    return Cochain(complex, 0, std::move(values));
  }

  const auto& masks = basis_masks(form.dim(), k);
  std::vector<Eigen::MatrixXd> points(count);
  std::vector<Eigen::VectorXd> pullback(count);  // det of the tangent rows per mask
  for (std::size_t i = 0; i < count; ++i) {
    points[i] = complex.points(k, i);
    const Eigen::MatrixXd tangent = points[i].rightCols(k).colwise() - points[i].col(0);
    pullback[i].resize(static_cast<Eigen::Index>(masks.size()));
    for (std::size_t j = 0; j < masks.size(); ++j) {
      Eigen::MatrixXd rows(k, k);
      int r = 0;
      for (unsigned bits = masks[j]; bits; bits &= bits - 1, ++r) rows.row(r) = tangent.row(std::countr_zero(bits));
      pullback[i][static_cast<Eigen::Index>(j)] = k == 1 ? rows(0, 0) : rows.determinant();
    }
  }

  auto integrate = [&](int degree, Eigen::VectorXd& out, double& scale) {
    const SimplexRule& rule = simplex_rule(k, degree);
    scale = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      double value = 0.0;
      double magnitude = 0.0;
      for (Eigen::Index q = 0; q < rule.weights.size(); ++q) {
        const Eigen::VectorXd x = points[i] * rule.barycentric.col(q);
        const double f = form.evaluate({x.data(), static_cast<std::size_t>(x.size())}).dot(pullback[i]);
        value += rule.weights[q] * f;
        magnitude += rule.weights[q] * std::abs(f);
      }
      out[static_cast<Eigen::Index>(i)] = value;
      scale = std::max(scale, magnitude);
    }
  };

  int degree = std::max(options.degree, 1);
  double scale = 0.0;
  integrate(degree, values, scale);
  Eigen::VectorXd fine(values.size());
  while (2 * degree <= options.max_degree) {
    integrate(2 * degree, fine, scale);
    if ((fine - values).lpNorm<Eigen::Infinity>() <= options.tolerance * scale) {
      return Cochain(complex, k, std::move(fine));
    }
    values = fine;
    degree *= 2;
  }
  throw NumericalError("de Rham quadrature did not converge up to degree " + std::to_string(options.max_degree));
}

Eigen::SparseMatrix<double> whitney_mass_matrix(const SimplicialComplex& complex, int k) {
  if (!complex.embedded()) throw ValidationError("the Whitney metric needs an embedded complex");
  const int n = complex.dim();
  if (k < 0 || k > n) throw ValidationError("mass matrix degree out of range");
  const auto& faces = local_faces(n, k);
  std::vector<PolyForm<double>> basis;
  for (const auto& f : faces) basis.push_back(whitney_local<double>(n, f));

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(complex.size(n) * faces.size() * faces.size());
  for (std::size_t t = 0; t < complex.size(n); ++t) {
    const SimplexGeometry g = simplex_geometry(complex.points(n, t));
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const auto row = static_cast<int>(complex.top_face(k, t, s));
      for (std::size_t r = s; r < faces.size(); ++r) {
        const auto col = static_cast<int>(complex.top_face(k, t, r));
        const double v = basis[s].inner(basis[r], g.gram, g.volume);
        triplets.emplace_back(row, col, v);
        if (r != s) triplets.emplace_back(col, row, v);
      }
    }
  }
  const auto size = static_cast<Eigen::Index>(complex.size(k));
  Eigen::SparseMatrix<double> m(size, size);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::VectorXd evaluate(const PiecewisePolyForm<double>& form, std::size_t top, std::span<const double> bary) {
  const SimplicialComplex& complex = form.complex();
  const SimplexGeometry g = simplex_geometry(complex.points(complex.dim(), top));
  return form.piece(top).evaluate_ambient(bary, g.gradients);
}

double l2_inner(const PiecewisePolyForm<double>& a, const PiecewisePolyForm<double>& b) {
  if (&a.complex() != &b.complex() || a.degree() != b.degree()) {
    throw ValidationError("L2 inner product of incompatible forms");
  }
  const SimplicialComplex& complex = a.complex();
  double total = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const SimplexGeometry g = simplex_geometry(complex.points(complex.dim(), t));
    total += a.piece(t).inner(b.piece(t), g.gram, g.volume);
  }
  return total;
}

double l2_distance(const PiecewisePolyForm<double>& a, const PiecewisePolyForm<double>& b) {
  PiecewisePolyForm<double> diff = a;
  diff -= b;
  return std::sqrt(std::max(l2_inner(diff, diff), 0.0));
}

double l2_inner(const PiecewisePolyForm<double>& a, const AnalyticForm& b, const QuadratureOptions& options) {
  return adaptive_integral(a, b, options,
                           [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(v); });
}

double l2_distance(const PiecewisePolyForm<double>& a, const AnalyticForm& b, const QuadratureOptions& options) {
  const double sq = adaptive_integral(a, b, options, [](const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return (u - v).squaredNorm();
  });
  return std::sqrt(std::max(sq, 0.0));
}

double l2_distance(const AnalyticForm& a, const AnalyticForm& b) { return l2_norm(a - b); }

}  // namespace cochainflow

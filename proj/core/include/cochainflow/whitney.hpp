#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cochainflow/analytic_form.hpp"
#include "cochainflow/cochain.hpp"
#include "cochainflow/complex.hpp"
#include "cochainflow/poly_form.hpp"

namespace cochainflow {

/// Constant metric data of one embedded simplex.
struct SimplexGeometry {
  double volume = 0.0;
  Eigen::MatrixXd points;     // d x (n+1), lifted
  Eigen::MatrixXd gradients;  // (n+1) x d, row i = grad mu_i
  Eigen::MatrixXd gram;       // (n+1) x (n+1), <dmu_k, dmu_l>
};

/// Throws ValidationError for a degenerate simplex.
SimplexGeometry simplex_geometry(const Eigen::MatrixXd& points);
std::vector<SimplexGeometry> top_geometry(const SimplicialComplex& complex);

/// A differential form given by one polynomial form per top simplex.
template <class S>
class PiecewisePolyForm {
 public:
  PiecewisePolyForm(const SimplicialComplex& complex, int degree) : complex_(&complex), degree_(degree) {
    pieces_.assign(complex.size(complex.dim()), PolyForm<S>(complex.dim(), degree));
  }

  const SimplicialComplex& complex() const { return *complex_; }
  int degree() const { return degree_; }
  std::size_t size() const { return pieces_.size(); }
  const PolyForm<S>& piece(std::size_t top) const { return pieces_[top]; }
  PolyForm<S>& piece(std::size_t top) { return pieces_[top]; }

  PiecewisePolyForm d() const {
    if (degree_ == complex_->dim()) throw ValidationError("d of a top-degree form");
    PiecewisePolyForm out(*complex_, degree_ + 1);
    for (std::size_t t = 0; t < pieces_.size(); ++t) out.pieces_[t] = pieces_[t].d();
    return out;
  }

  friend PiecewisePolyForm wedge(const PiecewisePolyForm& a, const PiecewisePolyForm& b) {
    if (a.complex_ != b.complex_) throw ValidationError("wedge of forms on different complexes");
    if (a.degree_ + b.degree_ > a.complex_->dim()) throw ValidationError("wedge degree exceeds complex dimension");
    PiecewisePolyForm out(*a.complex_, a.degree_ + b.degree_);
    for (std::size_t t = 0; t < a.pieces_.size(); ++t) out.pieces_[t] = wedge(a.pieces_[t], b.pieces_[t]);
    return out;
  }

  PiecewisePolyForm& operator+=(const PiecewisePolyForm& other) {
    for (std::size_t t = 0; t < pieces_.size(); ++t) pieces_[t] += other.pieces_[t];
    return *this;
  }
  PiecewisePolyForm& operator-=(const PiecewisePolyForm& other) {
    for (std::size_t t = 0; t < pieces_.size(); ++t) pieces_[t] -= other.pieces_[t];
    return *this;
  }

  /// Piecewise equality after removing the mu_0 redundancy.
  bool equivalent(const PiecewisePolyForm& other) const {
    if (complex_ != other.complex_ || degree_ != other.degree_) return false;
    for (std::size_t t = 0; t < pieces_.size(); ++t) {
      if (!(pieces_[t].canonical() == other.pieces_[t].canonical())) return false;
    }
    return true;
  }

 private:
  const SimplicialComplex* complex_;
  int degree_;
  std::vector<PolyForm<S>> pieces_;
};

namespace detail {

template <class S, class Values>
PiecewisePolyForm<S> whitney_map_impl(const SimplicialComplex& complex, int k, const Values& values) {
  if (!complex.embedded()) throw ValidationError("the Whitney map needs an embedded complex");
  const int n = complex.dim();
  if (k < 0 || k > n) throw ValidationError("cochain degree out of range");
  const auto& faces = local_faces(n, k);
  std::vector<PolyForm<S>> basis;
  basis.reserve(faces.size());
  for (const auto& f : faces) basis.push_back(whitney_local<S>(n, f));
  PiecewisePolyForm<S> out(complex, k);
  for (std::size_t t = 0; t < out.size(); ++t) {
    PolyForm<S>& piece = out.piece(t);
    for (std::size_t s = 0; s < faces.size(); ++s) {
      const S& v = values[complex.top_face(k, t, s)];
      if (v == S(0)) continue;
      piece += v * basis[s];
    }
  }
  return out;
}

}  // namespace detail

PiecewisePolyForm<double> whitney_map(const Cochain& c);
PiecewisePolyForm<Rational> whitney_map_exact(const SimplicialComplex& complex, int degree,
                                              std::span<const Rational> values);

/// Integral of a piecewise polynomial form over every k-simplex, exact in S.
template <class S>
std::vector<S> de_rham_values(const PiecewisePolyForm<S>& form) {
  const SimplicialComplex& complex = form.complex();
  const int n = complex.dim();
  const int k = form.degree();
  const auto& faces = local_faces(n, k);
  std::vector<S> out(complex.size(k), S(0));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto [top, slot] = complex.first_coface(k, i);
    out[i] = form.piece(top).restrict_to(faces[slot]).integrate_top();
  }
  return out;
}

Cochain de_rham(const PiecewisePolyForm<double>& form);

struct QuadratureOptions {
  int degree = 8;          // starting polynomial exactness
  double tolerance = 1e-8;  // relative change allowed when the degree is doubled
  int max_degree = 64;
};

/// Integrates a smooth form over every simplex of matching degree with
/// adaptive Gauss quadrature. Throws NumericalError if doubling the degree
/// never settles within `max_degree`.
Cochain de_rham(const AnalyticForm& form, const SimplicialComplex& complex, const QuadratureOptions& options = {});

/// M_k[a, b] = integral of <W e_a, W e_b>, assembled exactly per top simplex.
Eigen::SparseMatrix<double> whitney_mass_matrix(const SimplicialComplex& complex, int k);

/// Ambient components (`basis_masks(d, degree)` order) of the form at the
/// point with barycentric coordinates `bary` inside top simplex `top`.
Eigen::VectorXd evaluate(const PiecewisePolyForm<double>& form, std::size_t top, std::span<const double> bary);

double l2_inner(const PiecewisePolyForm<double>& a, const PiecewisePolyForm<double>& b);
double l2_distance(const PiecewisePolyForm<double>& a, const PiecewisePolyForm<double>& b);

/// Quadrature over each top simplex with degree doubling; the complex must
/// be embedded in the same flat torus the analytic form lives on.
double l2_inner(const PiecewisePolyForm<double>& a, const AnalyticForm& b, const QuadratureOptions& options = {});
double l2_distance(const PiecewisePolyForm<double>& a, const AnalyticForm& b,
                   const QuadratureOptions& options = {});
double l2_distance(const AnalyticForm& a, const AnalyticForm& b);

}  // namespace cochainflow

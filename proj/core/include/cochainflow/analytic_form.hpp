#pragma once

#include <array>
#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cochainflow {

/// Integer wave vector k; the mode is exp(2 pi i k.x) on the unit torus.
using Wavevector = std::array<int, 3>;

/// Finite Fourier sum on the unit torus [0,1)^dim. Real-valued functions are
/// kept with conjugate-symmetric coefficients, so every operation below is
/// exact up to floating-point rounding of the coefficients.
class TrigPolynomial {
 public:
  explicit TrigPolynomial(int dim = 2) : dim_(dim) {}

  static TrigPolynomial constant(int dim, double value);
  /// cos(2 pi k.x) and sin(2 pi k.x).
  static TrigPolynomial cosine(int dim, const Wavevector& k);
  static TrigPolynomial sine(int dim, const Wavevector& k);

  int dim() const { return dim_; }
  const std::map<Wavevector, std::complex<double>>& modes() const { return modes_; }

  double evaluate(std::span<const double> x) const;
  TrigPolynomial derivative(int axis) const;

  TrigPolynomial& operator+=(const TrigPolynomial& other);
  TrigPolynomial& operator-=(const TrigPolynomial& other);
  TrigPolynomial& operator*=(double s);
  friend TrigPolynomial operator+(TrigPolynomial a, const TrigPolynomial& b) { return a += b; }
  friend TrigPolynomial operator-(TrigPolynomial a, const TrigPolynomial& b) { return a -= b; }
  friend TrigPolynomial operator*(TrigPolynomial a, double s) { return a *= s; }
  friend TrigPolynomial operator*(double s, TrigPolynomial a) { return a *= s; }
  friend TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b);

  void add_mode(const Wavevector& k, std::complex<double> c);
  /// Drops modes with |c| <= tol * (largest |c|).
  TrigPolynomial& prune(double relative_tol = 1e-14);
  TrigPolynomial& drop_below(double absolute_tol);
  double max_abs_coefficient() const;
  bool empty() const { return modes_.empty(); }

 private:
  int dim_;
  std::map<Wavevector, std::complex<double>> modes_;
};

/// Increasing-order bitmasks of the k-subsets of {0..dim-1}; the component
/// order used by `AnalyticForm::evaluate` and by Whitney form evaluation.
const std::vector<unsigned>& basis_masks(int dim, int degree);

/// Sign of dx_A ^ dx_B relative to dx_{A u B} (0 if A and B overlap).
int merge_sign(unsigned a, unsigned b);

/// A smooth k-form on the flat unit torus: sum over increasing multi-indices
/// J of f_J dx_J with trigonometric coefficient functions f_J.
class AnalyticForm {
 public:
  AnalyticForm(int dim, int degree);

  static AnalyticForm function(const TrigPolynomial& f);
  static AnalyticForm constant(int dim, double value);
  static AnalyticForm differential(int dim, int axis);
  /// cos(2pi x) sin(2pi y) dx - sin(2pi x) cos(2pi y) dy
  static AnalyticForm taylor_green();

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<unsigned, TrigPolynomial>& components() const { return components_; }
  TrigPolynomial component(unsigned mask) const;
  void add(unsigned mask, const TrigPolynomial& f);

  /// Components at x in `basis_masks(dim, degree)` order.
  Eigen::VectorXd evaluate(std::span<const double> x) const;

  AnalyticForm d() const;
  AnalyticForm star() const;
  AnalyticForm codifferential() const;

  AnalyticForm& operator+=(const AnalyticForm& other);
  AnalyticForm& operator-=(const AnalyticForm& other);
  AnalyticForm& operator*=(double s);
  friend AnalyticForm operator+(AnalyticForm a, const AnalyticForm& b) { return a += b; }
  friend AnalyticForm operator-(AnalyticForm a, const AnalyticForm& b) { return a -= b; }
  friend AnalyticForm operator*(double s, AnalyticForm a) { return a *= s; }

  AnalyticForm& prune(double relative_tol = 1e-14);
  double max_abs_coefficient() const;
  /// Coefficient-wise comparison, relative to the larger operand.
  bool approx_equal(const AnalyticForm& other, double relative_tol = 1e-12) const;
  bool is_zero(double absolute_tol) const { return max_abs_coefficient() <= absolute_tol; }

  /// Highest |k|_inf over all modes.
  int max_frequency() const;

  std::string to_string() const;

 private:
  int dim_;
  int degree_;
  std::map<unsigned, TrigPolynomial> components_;
};

AnalyticForm wedge(const AnalyticForm& a, const AnalyticForm& b);

/// For a 1-form w: the (k-1)-form A with <A, eta> = <alpha, w ^ eta> for all eta.
AnalyticForm wedge_adjoint(const AnalyticForm& w, const AnalyticForm& alpha);

/// Exact L2 inner product over the unit torus (Parseval).
double inner(const AnalyticForm& a, const AnalyticForm& b);
double l2_norm(const AnalyticForm& a);

/// Orthogonal projection of a 1-form onto the co-closed 1-forms, done mode by
/// mode in Fourier space.
AnalyticForm project_coclosed(const AnalyticForm& one_form);

/// T(w): the 1-form with <T(w), eta> = <dw, w ^ eta>.
AnalyticForm euler_operator(const AnalyticForm& w);
/// T_nu(w) = T(w) - nu d*d w.
AnalyticForm navier_stokes_operator(const AnalyticForm& w, double nu);
/// pi(T_nu(w)): the time derivative of the smooth flow through w.
AnalyticForm smooth_flow_vector(const AnalyticForm& w, double nu);

}  // namespace cochainflow

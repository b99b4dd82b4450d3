#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "cochainflow/cochain.hpp"
#include "cochainflow/complex.hpp"

namespace cochainflow {

enum class Metric { Toy, Whitney };

Metric parse_metric(std::string_view name);
std::string to_string(Metric metric);

/// Inner products on every C^k: identity matrices for the toy model, Whitney
/// mass matrices otherwise. Factorizations are built once in the constructor;
/// all member functions are const and safe to call from several threads.
class InnerProductModel {
 public:
  InnerProductModel(const SimplicialComplex& complex, Metric metric);

  const SimplicialComplex& complex() const { return *complex_; }
  Metric metric() const { return metric_; }

  /// M_k (assembled identity for the toy model).
  const Eigen::SparseMatrix<double>& mass(int k) const;
  /// delta_k as a floating-point matrix.
  const Eigen::SparseMatrix<double>& coboundary(int k) const;

  Eigen::VectorXd apply_mass(int k, const Eigen::VectorXd& x) const;
  Eigen::VectorXd solve_mass(int k, const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve_mass(int k, const Eigen::MatrixXd& b) const;

  double inner(int k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  double inner(const Cochain& a, const Cochain& b) const;
  double norm(const Cochain& a) const;
  double norm(int k, const Eigen::VectorXd& a) const;

  /// delta*_k : C^{k+1} -> C^k, i.e. M_k^{-1} delta_k^T M_{k+1}.
  Eigen::VectorXd adjoint_coboundary(int k, const Eigen::VectorXd& b) const;

  void require_member(const Cochain& c) const;

 private:
  const SimplicialComplex* complex_;
  Metric metric_;
  std::vector<Eigen::SparseMatrix<double>> mass_;
  std::vector<Eigen::SparseMatrix<double>> delta_;
  std::vector<std::unique_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>> factor_;
};

/// The adjoint of delta applied to a (k+1)-cochain.
Cochain adjoint_coboundary(const InnerProductModel& model, const Cochain& b);

/// Orthogonal projection of C^1 onto ker(delta*_0), the co-closed 1-cochains.
/// One factorization of the vertex Laplacian delta_0^T M_1 delta_0 with one
/// vertex per connected component held at zero.
class CoclosedProjector {
 public:
  explicit CoclosedProjector(const InnerProductModel& model);

  const InnerProductModel& model() const { return *model_; }

  Eigen::VectorXd project(const Eigen::VectorXd& c) const;
  Cochain project(const Cochain& c) const;

  /// The potential f with c - pi(c) = delta_0 f, mean zero on every
  /// connected component.
  Eigen::VectorXd potential(const Eigen::VectorXd& c) const;

 private:
  const InnerProductModel* model_;
  std::vector<int> component_;
  std::vector<int> reduced_index_;  // -1 for grounded vertices
  Eigen::SparseMatrix<double> laplacian_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> factor_;
};

Cochain project_coclosed(const InnerProductModel& model, const Cochain& c);

struct HodgeDecomposition {
  Cochain exact;
  Cochain coexact;
  Cochain harmonic;
  Eigen::VectorXd potential;  // f with exact = delta_0 f
  int cg_iterations = 0;
  double cg_residual = 0.0;
};

struct SolverOptions {
  double relative_tolerance = 1e-12;
  int max_iterations = 0;  // 0: 10 * system size
};

/// c = delta_0 f + delta*_1 g + h. Throws NumericalError if the C^2-side
/// conjugate gradient solve misses its tolerance.
HodgeDecomposition hodge_decompose(const CoclosedProjector& projector, const Cochain& c,
                                   const SolverOptions& options = {});
HodgeDecomposition hodge_decompose(const InnerProductModel& model, const Cochain& c,
                                   const SolverOptions& options = {});

struct HarmonicBasis {
  std::vector<Cochain> vectors;      // orthonormal in the model inner product
  std::vector<double> eigenvalues;   // smallest Laplacian eigenvalues, ascending
  double largest_eigenvalue = 0.0;
  double threshold = 0.0;
  double gap = 0.0;                  // first rejected / last accepted eigenvalue
};

struct HarmonicOptions {
  double relative_threshold = 1e-9;
  double minimum_gap = 10.0;
  int max_dense_size = 6000;
  int reported_eigenvalues = 8;
};

/// Kernel of the Hodge Laplacian delta_0 delta_0* + delta_1* delta_1 on C^1,
/// from a dense generalized eigensolve. Throws NumericalError if the accepted
/// and rejected eigenvalues are separated by less than `minimum_gap`.
HarmonicBasis harmonic_basis(const InnerProductModel& model, const HarmonicOptions& options = {});

}  // namespace cochainflow

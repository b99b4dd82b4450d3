#pragma once

#include <Eigen/Core>

namespace cochainflow {

/// Gauss-Legendre rule with m points on [0, 1].
struct LineRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};
LineRule gauss_legendre(int points);

/// Quadrature on the reference k-simplex, exact for polynomials of total
/// degree <= `degree`. Points are barycentric columns ((k+1) x npts);
/// weights sum to the reference volume 1/k!.
struct SimplexRule {
  int dim = 0;
  int degree = 0;
  Eigen::MatrixXd barycentric;
  Eigen::VectorXd weights;
};

/// Tensor Gauss rule collapsed onto the simplex (Duffy map). Cached and
/// safe to call concurrently.
const SimplexRule& simplex_rule(int dim, int degree);

}  // namespace cochainflow

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/rational.hpp>
#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cochainflow/cochain.hpp"
#include "cochainflow/complex.hpp"

namespace cochainflow {

using Rational = boost::rational<std::int64_t>;

/// One nonzero structure constant of the cup product: e_a ∪ e_b has
/// `coefficient` on the (j+k)-simplex c.
struct CupEntry {
  std::size_t a;
  std::size_t b;
  std::size_t c;
  Rational coefficient;
  double value;
};

/// Sign of the permutation that sorts (vertices of a without the shared one,
/// shared, vertices of b without the shared one), multiplied by the signs of
/// moving the shared vertex to the back of a and to the front of b.
/// Arguments are sorted position lists inside the spanned simplex.
int cup_sign(std::span<const int> a, std::span<const int> b, int shared);

/// Magnitude j! k! / (j+k+1)! of the elementary cup coefficient.
Rational cup_magnitude(int j, int k);

/// Structure constants of the cup product for every degree pair j + k <= n.
/// Depends only on the combinatorics of the complex; build once and share.
class CupTable {
 public:
  explicit CupTable(const SimplicialComplex& complex);

  const SimplicialComplex& complex() const { return *complex_; }
  std::span<const CupEntry> entries(int j, int k) const;

  /// a ∪ b on raw coefficient vectors.
  Eigen::VectorXd apply(int j, const Eigen::VectorXd& a, int k, const Eigen::VectorXd& b) const;

  /// Exact version on rational coefficient vectors.
  std::vector<Rational> apply_exact(int j, std::span<const Rational> a, int k,
                                    std::span<const Rational> b) const;

  /// Matrix of b -> c ∪ b for a 1-cochain c (C^1 -> C^2).
  Eigen::SparseMatrix<double> left_cup_matrix(const Eigen::VectorXd& c) const;

  /// Transpose of the matrix above applied to w in C^2, without assembling it.
  Eigen::VectorXd left_cup_adjoint(const Eigen::VectorXd& c, const Eigen::VectorXd& w) const;

 private:
  void check(int j, int k) const;

  const SimplicialComplex* complex_;
  std::vector<std::vector<std::vector<CupEntry>>> entries_;  // [j][k]
};

Cochain cup(const CupTable& table, const Cochain& a, const Cochain& b);

/// Convenience overload; builds a table for the complex on every call.
Cochain cup(const Cochain& a, const Cochain& b);

/// L_c : C^1 -> C^2, b -> c ∪ b.
Eigen::SparseMatrix<double> cup_right_multiplication_matrix(const CupTable& table, const Cochain& c);

}  // namespace cochainflow

#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "cochainflow/complex.hpp"

namespace cochainflow {

/// A degree-k cochain: coefficients over the elementary k-cochains of a fixed
/// complex. The complex must outlive the cochain.
class Cochain {
 public:
  Cochain(const SimplicialComplex& complex, int degree)
      : complex_(&complex), degree_(degree), values_(Eigen::VectorXd::Zero(complex.size(degree))) {}

  Cochain(const SimplicialComplex& complex, int degree, Eigen::VectorXd values)
      : complex_(&complex), degree_(degree), values_(std::move(values)) {
    if (values_.size() != static_cast<Eigen::Index>(complex.size(degree))) {
      throw ValidationError("cochain of degree " + std::to_string(degree) + " needs " +
                            std::to_string(complex.size(degree)) + " values, got " +
                            std::to_string(values_.size()));
    }
  }

  static Cochain elementary(const SimplicialComplex& complex, int degree, std::size_t simplex) {
    Cochain c(complex, degree);
    c.values_[static_cast<Eigen::Index>(simplex)] = 1.0;
    return c;
  }

  const SimplicialComplex& complex() const { return *complex_; }
  int degree() const { return degree_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  void require_compatible(const Cochain& other) const {
    if (complex_ != other.complex_) throw ValidationError("cochains live on different complexes");
  }

 private:
  const SimplicialComplex* complex_;
  int degree_;
  Eigen::VectorXd values_;
};

/// Inner product that declares the elementary cochains orthonormal.
inline double toy_inner_product(const Cochain& a, const Cochain& b) {
  a.require_compatible(b);
  if (a.degree() != b.degree()) throw ValidationError("inner product of cochains of different degree");
  return a.values().dot(b.values());
}

/// delta applied to a cochain.
Cochain coboundary(const Cochain& c);

}  // namespace cochainflow

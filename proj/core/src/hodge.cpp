#include "cochainflow/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "cochainflow/whitney.hpp"

namespace cochainflow {

Metric parse_metric(std::string_view name) {
  if (name == "toy") return Metric::Toy;
  if (name == "whitney") return Metric::Whitney;
  throw ValidationError("unknown metric '" + std::string(name) + "' (expected toy or whitney)");
}

std::string to_string(Metric metric) { return metric == Metric::Toy ? "toy" : "whitney"; }

InnerProductModel::InnerProductModel(const SimplicialComplex& complex, Metric metric)
    : complex_(&complex), metric_(metric) {
  const int n = complex.dim();
  for (int k = 0; k <= n; ++k) {
    const auto size = static_cast<Eigen::Index>(complex.size(k));
    if (metric == Metric::Toy) {
      Eigen::SparseMatrix<double> id(size, size);
      id.setIdentity();
      mass_.push_back(std::move(id));
      factor_.push_back(nullptr);
    } else {
      mass_.push_back(whitney_mass_matrix(complex, k));
      auto factor = std::make_unique<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>>>(mass_.back());
      if (factor->info() != Eigen::Success) {
        throw NumericalError("Cholesky factorization of the degree-" + std::to_string(k) +
                             " Whitney mass matrix failed");
      }
      factor_.push_back(std::move(factor));
    }
    if (k < n) delta_.push_back(complex.coboundary(k).cast<double>());
  }
}

const Eigen::SparseMatrix<double>& InnerProductModel::mass(int k) const {
  if (k < 0 || k >= static_cast<int>(mass_.size())) throw ValidationError("mass matrix degree out of range");
  return mass_[static_cast<std::size_t>(k)];
}

const Eigen::SparseMatrix<double>& InnerProductModel::coboundary(int k) const {
  if (k < 0 || k >= static_cast<int>(delta_.size())) throw ValidationError("coboundary degree out of range");
  return delta_[static_cast<std::size_t>(k)];
}

Eigen::VectorXd InnerProductModel::apply_mass(int k, const Eigen::VectorXd& x) const {
  if (metric_ == Metric::Toy) return x;
  return mass(k) * x;
}

Eigen::VectorXd InnerProductModel::solve_mass(int k, const Eigen::VectorXd& b) const {
  if (metric_ == Metric::Toy) return b;
  mass(k);
  return factor_[static_cast<std::size_t>(k)]->solve(b);
}

Eigen::MatrixXd InnerProductModel::solve_mass(int k, const Eigen::MatrixXd& b) const {
  if (metric_ == Metric::Toy) return b;
  mass(k);
  return factor_[static_cast<std::size_t>(k)]->solve(b);
}

double InnerProductModel::inner(int k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
  if (metric_ == Metric::Toy) return a.dot(b);
  return a.dot(mass(k) * b);
}

double InnerProductModel::inner(const Cochain& a, const Cochain& b) const {
  require_member(a);
  require_member(b);
  if (a.degree() != b.degree()) throw ValidationError("inner product of cochains of different degree");
  return inner(a.degree(), a.values(), b.values());
}

double InnerProductModel::norm(const Cochain& a) const { return std::sqrt(std::max(inner(a, a), 0.0)); }

double InnerProductModel::norm(int k, const Eigen::VectorXd& a) const {
  return std::sqrt(std::max(inner(k, a, a), 0.0));
}

Eigen::VectorXd InnerProductModel::adjoint_coboundary(int k, const Eigen::VectorXd& b) const {
  return solve_mass(k, Eigen::VectorXd(coboundary(k).transpose() * apply_mass(k + 1, b)));
}

void InnerProductModel::require_member(const Cochain& c) const {
  if (&c.complex() != complex_) throw ValidationError("cochain does not belong to the model's complex");
}

Cochain adjoint_coboundary(const InnerProductModel& model, const Cochain& b) {
  model.require_member(b);
  if (b.degree() < 1) throw ValidationError("the adjoint of delta needs a cochain of degree >= 1");
  return Cochain(model.complex(), b.degree() - 1, model.adjoint_coboundary(b.degree() - 1, b.values()));
}

CoclosedProjector::CoclosedProjector(const InnerProductModel& model) : model_(&model) {
  const SimplicialComplex& complex = model.complex();
  if (complex.dim() < 1) throw ValidationError("projection onto co-closed 1-cochains needs a complex of dimension >= 1");
  component_ = complex.vertex_components();
  const int components = complex.component_count();
  std::vector<bool> grounded(static_cast<std::size_t>(components), false);
  reduced_index_.assign(component_.size(), -1);
  int next = 0;
  for (std::size_t v = 0; v < component_.size(); ++v) {
    const auto c = static_cast<std::size_t>(component_[v]);
    if (!grounded[c]) {
      grounded[c] = true;
      continue;
    }
    reduced_index_[v] = next++;
  }

  const auto& d0 = model.coboundary(0);
  const Eigen::SparseMatrix<double> full = Eigen::SparseMatrix<double>(d0.transpose()) * (model.mass(1) * d0);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < full.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
      const int r = reduced_index_[static_cast<std::size_t>(it.row())];
      const int c = reduced_index_[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  laplacian_.resize(next, next);
  laplacian_.setFromTriplets(triplets.begin(), triplets.end());
  if (next > 0) {
    factor_.compute(laplacian_);
    if (factor_.info() != Eigen::Success) throw NumericalError("factorization of the vertex Laplacian failed");
  }
}

Eigen::VectorXd CoclosedProjector::potential(const Eigen::VectorXd& c) const {
  const InnerProductModel& model = *model_;
  const auto& d0 = model.coboundary(0);
  const Eigen::VectorXd rhs_full = d0.transpose() * model.apply_mass(1, c);
  const auto reduced = laplacian_.rows();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(reduced_index_.size()));
  if (reduced == 0) return f;
  Eigen::VectorXd rhs(reduced);
  for (std::size_t v = 0; v < reduced_index_.size(); ++v) {
    if (reduced_index_[v] >= 0) rhs[reduced_index_[v]] = rhs_full[static_cast<Eigen::Index>(v)];
  }
  Eigen::VectorXd x = factor_.solve(rhs);
  x += factor_.solve(Eigen::VectorXd(rhs - laplacian_ * x));  // one step of iterative refinement
  for (std::size_t v = 0; v < reduced_index_.size(); ++v) {
    if (reduced_index_[v] >= 0) f[static_cast<Eigen::Index>(v)] = x[reduced_index_[v]];
  }
  const int components = *std::max_element(component_.begin(), component_.end()) + 1;
  std::vector<double> sum(static_cast<std::size_t>(components), 0.0);
  std::vector<int> count(static_cast<std::size_t>(components), 0);
  for (std::size_t v = 0; v < component_.size(); ++v) {
    sum[static_cast<std::size_t>(component_[v])] += f[static_cast<Eigen::Index>(v)];
    ++count[static_cast<std::size_t>(component_[v])];
  }
  for (std::size_t v = 0; v < component_.size(); ++v) {
    const auto c = static_cast<std::size_t>(component_[v]);
    f[static_cast<Eigen::Index>(v)] -= sum[c] / count[c];
  }
  return f;
}

Eigen::VectorXd CoclosedProjector::project(const Eigen::VectorXd& c) const {
  if (c.size() != static_cast<Eigen::Index>(model_->complex().size(1))) {
    throw ValidationError("projection expects a 1-cochain");
  }
  return c - model_->coboundary(0) * potential(c);
}

Cochain CoclosedProjector::project(const Cochain& c) const {
  model_->require_member(c);
  if (c.degree() != 1) throw ValidationError("projection onto co-closed cochains is defined on degree 1");
  return Cochain(c.complex(), 1, project(c.values()));
}

Cochain project_coclosed(const InnerProductModel& model, const Cochain& c) {
  return CoclosedProjector(model).project(c);
}

namespace {

struct CgResult {
  Eigen::VectorXd x;
  int iterations = 0;
  double relative_residual = 0.0;
};

template <class Op>
CgResult conjugate_gradient(const Op& apply, const Eigen::VectorXd& b, const SolverOptions& options) {
  CgResult out;
  out.x = Eigen::VectorXd::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) return out;
  const int cap = options.max_iterations > 0 ? options.max_iterations : 10 * static_cast<int>(b.size()) + 10;
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  for (int it = 1; it <= cap; ++it) {
    const Eigen::VectorXd ap = apply(p);
    const double pap = p.dot(ap);
    if (!(pap > 0.0)) break;
    const double alpha = rr / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    const double rr_next = r.squaredNorm();
    out.iterations = it;
    if (std::sqrt(rr_next) <= options.relative_tolerance * bnorm) {
      // confirm with the true residual
      r = b - apply(out.x);
      if (r.norm() <= options.relative_tolerance * bnorm) {
        out.relative_residual = r.norm() / bnorm;
        return out;
      }
      p = r;
      rr = r.squaredNorm();
      continue;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  out.relative_residual = (b - apply(out.x)).norm() / bnorm;
  throw NumericalError("conjugate gradient stopped after " + std::to_string(out.iterations) +
                       " iterations with relative residual " + std::to_string(out.relative_residual));
}

}  // namespace

HodgeDecomposition hodge_decompose(const CoclosedProjector& projector, const Cochain& c,
                                   const SolverOptions& options) {
  const InnerProductModel& model = projector.model();
  model.require_member(c);
  if (c.degree() != 1) throw ValidationError("Hodge decomposition is implemented for 1-cochains");
  const SimplicialComplex& complex = model.complex();

  Eigen::VectorXd f = projector.potential(c.values());
  Eigen::VectorXd exact = model.coboundary(0) * f;

  Eigen::VectorXd coexact = Eigen::VectorXd::Zero(c.values().size());
  int iterations = 0;
  double residual = 0.0;
  if (complex.dim() >= 2) {
    // coexact = M1^{-1} d1^T y with (d1 M1^{-1} d1^T) y = d1 c
    const auto& d1 = model.coboundary(1);
    auto op = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return d1 * model.solve_mass(1, Eigen::VectorXd(d1.transpose() * y));
    };
    const Eigen::VectorXd rhs = d1 * c.values();
    CgResult cg = conjugate_gradient(op, rhs, options);
    coexact = model.solve_mass(1, Eigen::VectorXd(d1.transpose() * cg.x));
    iterations = cg.iterations;
    residual = cg.relative_residual;
  }
  Eigen::VectorXd harmonic = c.values() - exact - coexact;
  return HodgeDecomposition{Cochain(complex, 1, std::move(exact)), Cochain(complex, 1, std::move(coexact)),
                            Cochain(complex, 1, std::move(harmonic)), std::move(f), iterations, residual};
}

HodgeDecomposition hodge_decompose(const InnerProductModel& model, const Cochain& c, const SolverOptions& options) {
  return hodge_decompose(CoclosedProjector(model), c, options);
}

HarmonicBasis harmonic_basis(const InnerProductModel& model, const HarmonicOptions& options) {
  const SimplicialComplex& complex = model.complex();
  if (complex.dim() < 1) throw ValidationError("harmonic 1-cochains need a complex of dimension >= 1");
  const auto edges = static_cast<Eigen::Index>(complex.size(1));
  if (edges > options.max_dense_size) {
    throw ValidationError("harmonic basis: " + std::to_string(edges) +
                          " edges exceeds the dense eigensolver limit of " + std::to_string(options.max_dense_size));
  }
  const Eigen::MatrixXd m1 = Eigen::MatrixXd(model.mass(1));
  const Eigen::MatrixXd d0 = Eigen::MatrixXd(model.coboundary(0));
  // M1 (d0 d0* + d1* d1) = M1 d0 M0^{-1} d0^T M1 + d1^T M2 d1
  const Eigen::MatrixXd d0t_m1 = d0.transpose() * m1;
  Eigen::MatrixXd a = d0t_m1.transpose() * model.solve_mass(0, d0t_m1);
  if (complex.dim() >= 2) {
    const Eigen::MatrixXd d1 = Eigen::MatrixXd(model.coboundary(1));
    a += d1.transpose() * (Eigen::MatrixXd(model.mass(2)) * d1);
  }
  a = 0.5 * (a + a.transpose()).eval();

  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  if (model.metric() == Metric::Toy) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) throw NumericalError("Hodge Laplacian eigensolve failed");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  } else {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, m1);
    if (solver.info() != Eigen::Success) throw NumericalError("Hodge Laplacian eigensolve failed");
    values = solver.eigenvalues();
    vectors = solver.eigenvectors();
  }

  HarmonicBasis out;
  out.largest_eigenvalue = values.cwiseAbs().maxCoeff();
  out.threshold = options.relative_threshold * out.largest_eigenvalue;
  Eigen::Index accepted = 0;
  while (accepted < values.size() && std::abs(values[accepted]) < out.threshold) ++accepted;
  const double floor = out.largest_eigenvalue * std::numeric_limits<double>::epsilon();
  if (accepted == values.size()) {
    out.gap = std::numeric_limits<double>::infinity();
  } else if (accepted == 0) {
    out.gap = values[0] / out.threshold;
  } else {
    out.gap = values[accepted] / std::max(std::abs(values[accepted - 1]), floor);
  }
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(values.size(), options.reported_eigenvalues); ++i) {
    out.eigenvalues.push_back(values[i]);
  }
  if (out.gap < options.minimum_gap) {
    throw NumericalError("harmonic threshold is ambiguous: spectral gap " + std::to_string(out.gap) +
                         " below " + std::to_string(options.minimum_gap));
  }
  for (Eigen::Index i = 0; i < accepted; ++i) {
    Eigen::VectorXd v = vectors.col(i);
    // fix the sign so the output does not depend on the eigensolver's choice
    Eigen::Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v[pivot] < 0) v = -v;
    out.vectors.emplace_back(complex, 1, v / model.norm(1, v));
  }
  return out;
}

}  // namespace cochainflow

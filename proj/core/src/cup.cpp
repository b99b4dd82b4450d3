#include "cochainflow/cup.hpp"

#include <algorithm>

namespace cochainflow {

namespace {

std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int permutation_sign(const std::vector<int>& seq) {
  int inversions = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::size_t j = i + 1; j < seq.size(); ++j) inversions += seq[i] > seq[j];
  }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

Cochain coboundary(const Cochain& c) {
  const auto& complex = c.complex();
  Eigen::SparseMatrix<double> delta = complex.coboundary(c.degree()).cast<double>();
  return Cochain(complex, c.degree() + 1, delta * c.values());
}

int cup_sign(std::span<const int> a, std::span<const int> b, int shared) {
  const auto after = std::count_if(a.begin(), a.end(), [&](int v) { return v > shared; });
  const auto before = std::count_if(b.begin(), b.end(), [&](int v) { return v < shared; });
  std::vector<int> seq;
  seq.reserve(a.size() + b.size() - 1);
  for (int v : a) {
    if (v != shared) seq.push_back(v);
  }
  seq.push_back(shared);
  for (int v : b) {
    if (v != shared) seq.push_back(v);
  }
  const int move_sign = ((after + before) % 2 == 0) ? 1 : -1;
  return move_sign * permutation_sign(seq);
}

Rational cup_magnitude(int j, int k) {
  return Rational(factorial(j) * factorial(k), factorial(j + k + 1));
}

CupTable::CupTable(const SimplicialComplex& complex) : complex_(&complex) {
  const int n = complex.dim();
  entries_.assign(n + 1, std::vector<std::vector<CupEntry>>(n + 1));
  for (int m = 0; m <= n; ++m) {
    for (int j = 0; j <= m; ++j) {
      const int k = m - j;
      const Rational magnitude = cup_magnitude(j, k);
      auto& out = entries_[j][k];
      // Splits of the m+1 vertex positions into a (j+1) and b (k+1) that
      // overlap in exactly one position.
      struct Split {
        std::vector<int> a, b;
        int sign;
      };
      std::vector<Split> splits;
      for (int shared = 0; shared <= m; ++shared) {
        std::vector<int> others;
        for (int p = 0; p <= m; ++p) {
          if (p != shared) others.push_back(p);
        }
        const auto& choices = j == 0 ? std::vector<std::vector<int>>{{}}
                                     : local_faces(static_cast<int>(others.size()) - 1, j - 1);
        for (const auto& pick : choices) {
          Split s;
          std::vector<bool> in_a(m + 1, false);
          in_a[shared] = true;
          for (int idx : pick) in_a[others[idx]] = true;
          for (int p = 0; p <= m; ++p) {
            if (in_a[p]) s.a.push_back(p);
            if (!in_a[p] || p == shared) s.b.push_back(p);
          }
          s.sign = cup_sign(s.a, s.b, shared);
          splits.push_back(std::move(s));
        }
      }
      out.reserve(complex.size(m) * splits.size());
      for (std::size_t c = 0; c < complex.size(m); ++c) {
        for (const auto& s : splits) {
          const Rational coefficient = magnitude * s.sign;
          out.push_back(CupEntry{complex.face_index(m, c, s.a), complex.face_index(m, c, s.b), c,
                                 coefficient, boost::rational_cast<double>(coefficient)});
        }
      }
    }
  }
}

void CupTable::check(int j, int k) const {
  const int n = complex_->dim();
  if (j < 0 || k < 0 || j + k > n) {
    throw ValidationError("cup product degrees " + std::to_string(j) + " + " + std::to_string(k) +
                          " exceed complex dimension " + std::to_string(n));
  }
}

std::span<const CupEntry> CupTable::entries(int j, int k) const {
  check(j, k);
  return entries_[j][k];
}

Eigen::VectorXd CupTable::apply(int j, const Eigen::VectorXd& a, int k, const Eigen::VectorXd& b) const {
  check(j, k);
  if (a.size() != static_cast<Eigen::Index>(complex_->size(j)) ||
      b.size() != static_cast<Eigen::Index>(complex_->size(k))) {
    throw ValidationError("cup product operand size mismatch");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex_->size(j + k)));
  for (const auto& e : entries_[j][k]) out[e.c] += e.value * a[e.a] * b[e.b];
  return out;
}

std::vector<Rational> CupTable::apply_exact(int j, std::span<const Rational> a, int k,
                                            std::span<const Rational> b) const {
  check(j, k);
  if (a.size() != complex_->size(j) || b.size() != complex_->size(k)) {
    throw ValidationError("cup product operand size mismatch");
  }
  std::vector<Rational> out(complex_->size(j + k));
  for (const auto& e : entries_[j][k]) {
    if (a[e.a] != Rational(0) && b[e.b] != Rational(0)) out[e.c] += e.coefficient * a[e.a] * b[e.b];
  }
  return out;
}

Eigen::SparseMatrix<double> CupTable::left_cup_matrix(const Eigen::VectorXd& c) const {
  check(1, 1);
  if (c.size() != static_cast<Eigen::Index>(complex_->size(1))) {
    throw ValidationError("L_c needs a 1-cochain");
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries_[1][1].size());
  for (const auto& e : entries_[1][1]) {
    if (c[e.a] != 0.0) {
      triplets.emplace_back(static_cast<int>(e.c), static_cast<int>(e.b), e.value * c[e.a]);
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(complex_->size(2)),
                                static_cast<Eigen::Index>(complex_->size(1)));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::VectorXd CupTable::left_cup_adjoint(const Eigen::VectorXd& c, const Eigen::VectorXd& w) const {
  check(1, 1);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(complex_->size(1)));
  for (const auto& e : entries_[1][1]) out[e.b] += e.value * c[e.a] * w[e.c];
  return out;
}

Cochain cup(const CupTable& table, const Cochain& a, const Cochain& b) {
  a.require_compatible(b);
  if (&table.complex() != &a.complex()) throw ValidationError("cup table built for another complex");
  return Cochain(a.complex(), a.degree() + b.degree(),
                 table.apply(a.degree(), a.values(), b.degree(), b.values()));
}

Cochain cup(const Cochain& a, const Cochain& b) {
  CupTable table(a.complex());
  return cup(table, a, b);
}

Eigen::SparseMatrix<double> cup_right_multiplication_matrix(const CupTable& table, const Cochain& c) {
  if (c.degree() != 1) throw ValidationError("L_c is defined for 1-cochains");
  if (&table.complex() != &c.complex()) throw ValidationError("cup table built for another complex");
  return table.left_cup_matrix(c.values());
}

}  // namespace cochainflow

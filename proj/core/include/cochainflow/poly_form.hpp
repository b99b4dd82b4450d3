#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <span>
#include <string>

#include <boost/rational.hpp>
#include <Eigen/Core>
#include <Eigen/LU>

#include "cochainflow/analytic_form.hpp"
#include "cochainflow/errors.hpp"

namespace cochainflow {

using Rational = boost::rational<std::int64_t>;

inline double as_double(double x) { return x; }
inline double as_double(const Rational& x) { return boost::rational_cast<double>(x); }

/// Barycentric variables per simplex: at most a 3-simplex.
inline constexpr int kMaxVars = 4;

/// mu^exponents dmu_{mask}, with the wedge taken in increasing variable order.
struct PolyTerm {
  std::uint8_t mask = 0;
  std::array<std::uint8_t, kMaxVars> exponents{};

  int total_degree() const {
    int s = 0;
    for (auto e : exponents) s += e;
    return s;
  }
  auto operator<=>(const PolyTerm&) const = default;
};

namespace detail {

inline std::int64_t factorial(int n) {
  std::int64_t f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// det of the |I| x |J| block of a matrix selected by two bitmasks.
inline double masked_det(const Eigen::MatrixXd& m, unsigned rows, unsigned cols) {
  const int k = std::popcount(rows);
  if (k == 0) return 1.0;
  Eigen::MatrixXd block(k, k);
  int r = 0;
  for (unsigned ri = rows; ri; ri &= ri - 1, ++r) {
    int c = 0;
    for (unsigned ci = cols; ci; ci &= ci - 1, ++c) {
      block(r, c) = m(std::countr_zero(ri), std::countr_zero(ci));
    }
  }
  if (k == 1) return block(0, 0);
  return block.determinant();
}

}  // namespace detail

/// Polynomial differential form on one n-simplex, written in the full set of
/// barycentric coordinates mu_0..mu_n and their differentials. The
/// representation is not unique (sum mu_i = 1); `canonical` removes mu_0.
template <class S>
class PolyForm {
 public:
  PolyForm(int simplex_dim, int degree) : n_(simplex_dim), degree_(degree) {
    if (n_ < 0 || n_ + 1 > kMaxVars) throw ValidationError("polynomial forms support simplices of dimension <= 3");
    if (degree_ < 0 || degree_ > n_) throw ValidationError("polynomial form degree out of range");
  }

  static PolyForm constant(int n, S value) {
    PolyForm f(n, 0);
    f.add_term(PolyTerm{}, value);
    return f;
  }
  static PolyForm variable(int n, int i) {
    PolyForm f(n, 0);
    PolyTerm t;
    t.exponents[static_cast<std::size_t>(i)] = 1;
    f.add_term(t, S(1));
    return f;
  }
  static PolyForm differential(int n, int i) {
    PolyForm f(n, 1);
    PolyTerm t;
    t.mask = static_cast<std::uint8_t>(1u << i);
    f.add_term(t, S(1));
    return f;
  }

  int simplex_dim() const { return n_; }
  int degree() const { return degree_; }
  int variables() const { return n_ + 1; }
  const std::map<PolyTerm, S>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const PolyTerm& t, const S& c) {
    if (c == S(0)) return;
    auto [it, inserted] = terms_.try_emplace(t, c);
    if (!inserted) {
      it->second += c;
      if (it->second == S(0)) terms_.erase(it);
    }
  }

  PolyForm& operator+=(const PolyForm& other) {
    require_same_shape(other);
    for (const auto& [t, c] : other.terms_) add_term(t, c);
    return *this;
  }
  PolyForm& operator-=(const PolyForm& other) {
    require_same_shape(other);
    for (const auto& [t, c] : other.terms_) add_term(t, -c);
    return *this;
  }
  PolyForm& operator*=(const S& s) {
    if (s == S(0)) {
      terms_.clear();
      return *this;
    }
    for (auto& [t, c] : terms_) c *= s;
    return *this;
  }
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend PolyForm operator*(const S& s, PolyForm a) { return a *= s; }
  PolyForm operator-() const { return S(-1) * *this; }

  friend PolyForm wedge(const PolyForm& a, const PolyForm& b) {
    if (a.n_ != b.n_) throw ValidationError("wedge of forms on different simplices");
    if (a.degree_ + b.degree_ > a.n_) throw ValidationError("wedge degree exceeds simplex dimension");
    PolyForm out(a.n_, a.degree_ + b.degree_);
    for (const auto& [ta, ca] : a.terms_) {
      for (const auto& [tb, cb] : b.terms_) {
        const int sign = merge_sign(ta.mask, tb.mask);
        if (sign == 0) continue;
        PolyTerm t;
        t.mask = static_cast<std::uint8_t>(ta.mask | tb.mask);
        for (int i = 0; i < kMaxVars; ++i) {
          t.exponents[i] = static_cast<std::uint8_t>(ta.exponents[i] + tb.exponents[i]);
        }
        out.add_term(t, S(sign) * ca * cb);
      }
    }
    return out;
  }

  PolyForm d() const {
    if (degree_ == n_) return PolyForm(n_, n_);
    PolyForm out(n_, degree_ + 1);
    for (const auto& [t, c] : terms_) {
      for (int i = 0; i <= n_; ++i) {
        if (t.exponents[i] == 0) continue;
        const unsigned bit = 1u << i;
        const int sign = merge_sign(bit, t.mask);
        if (sign == 0) continue;
        PolyTerm dt = t;
        dt.exponents[i] -= 1;
        dt.mask = static_cast<std::uint8_t>(t.mask | bit);
        out.add_term(dt, S(sign * t.exponents[i]) * c);
      }
    }
    return out;
  }

  /// Restriction (pullback) to the face spanned by the given sorted vertex
  /// positions, expressed in that face's own barycentric coordinates.
  PolyForm restrict_to(std::span<const int> positions) const {
    const int m = static_cast<int>(positions.size()) - 1;
    if (m < degree_) throw ValidationError("cannot restrict a form to a face of lower dimension than its degree");
    PolyForm out(m, degree_);
    unsigned kept = 0;
    for (int p : positions) kept |= 1u << p;
    for (const auto& [t, c] : terms_) {
      if (t.mask & ~kept) continue;
      bool vanishes = false;
      for (int i = 0; i <= n_; ++i) {
        if (t.exponents[i] != 0 && !(kept & (1u << i))) vanishes = true;
      }
      if (vanishes) continue;
      PolyTerm r;
      for (int j = 0; j <= m; ++j) {
        r.exponents[j] = t.exponents[positions[j]];
        if (t.mask & (1u << positions[j])) r.mask |= static_cast<std::uint8_t>(1u << j);
      }
      out.add_term(r, c);
    }
    return out;
  }

  /// Unique representation: mu_0 = 1 - sum_{i>0} mu_i and
  /// dmu_0 = -sum_{i>0} dmu_i substituted everywhere.
  PolyForm canonical() const {
    if (n_ == 0) return *this;
    PolyForm one_minus = constant(n_, S(1));
    PolyForm d_mu0(n_, 1);
    for (int i = 1; i <= n_; ++i) {
      one_minus -= variable(n_, i);
      d_mu0 -= differential(n_, i);
    }
    PolyForm out(n_, degree_);
    for (const auto& [t, c] : terms_) {
      PolyTerm rest;
      for (int i = 1; i <= n_; ++i) rest.exponents[i] = t.exponents[i];
      PolyForm f(n_, 0);
      f.add_term(rest, c);
      for (int e = 0; e < t.exponents[0]; ++e) f = wedge(f, one_minus);
      for (unsigned bits = t.mask; bits; bits &= bits - 1) {
        const int i = std::countr_zero(bits);
        f = wedge(f, i == 0 ? d_mu0 : differential(n_, i));
      }
      out += f;
    }
    return out;
  }

  /// Integral of a top-degree form over the simplex, oriented by vertex order.
  S integrate_top() const {
    if (degree_ != n_) throw ValidationError("only top-degree forms integrate over a simplex");
    S total(0);
    const unsigned all = (1u << (n_ + 1)) - 1;
    for (const auto& [t, c] : terms_) {
      // dmu_{all but m} = (-1)^m dmu_1 ^ ... ^ dmu_n
      const int missing = std::countr_zero(all & ~static_cast<unsigned>(t.mask));
      std::int64_t num = 1;
      for (int i = 0; i <= n_; ++i) num *= detail::factorial(t.exponents[i]);
      const S moment = S(num) / S(detail::factorial(t.total_degree() + n_));
      total += (missing % 2 == 0 ? c : -c) * moment;
    }
    return total;
  }

  /// Component values at a barycentric point, keyed by dmu-mask.
  std::map<unsigned, double> evaluate(std::span<const double> bary) const {
    std::map<unsigned, double> out;
    for (const auto& [t, c] : terms_) {
      double v = as_double(c);
      for (int i = 0; i <= n_; ++i) {
        for (int e = 0; e < t.exponents[i]; ++e) v *= bary[i];
      }
      out[t.mask] += v;
    }
    return out;
  }

  /// Pointwise components in the ambient coordinate basis
  /// (`basis_masks(d, degree)` order), given the barycentric gradients as the
  /// rows of a (n+1) x d matrix.
  Eigen::VectorXd evaluate_ambient(std::span<const double> bary, const Eigen::MatrixXd& gradients) const {
    const int d = static_cast<int>(gradients.cols());
    const auto& masks = basis_masks(d, degree_);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(masks.size()));
    for (const auto& [mask, value] : evaluate(bary)) {
      for (std::size_t j = 0; j < masks.size(); ++j) {
        out[static_cast<Eigen::Index>(j)] += value * detail::masked_det(gradients, mask, masks[j]);
      }
    }
    return out;
  }

  /// Integral over the simplex of the pointwise inner product, using the
  /// moment formula int mu^a dV = a! n! / (|a| + n)! vol and
  /// <dmu_I, dmu_J> = det G[I, J] with G the Gram matrix of all gradients.
  double inner(const PolyForm& other, const Eigen::MatrixXd& gram, double volume) const {
    require_same_shape(other);
    double total = 0.0;
    const double nfact = static_cast<double>(detail::factorial(n_));
    for (const auto& [ta, ca] : terms_) {
      for (const auto& [tb, cb] : other.terms_) {
        double num = nfact;
        int sum = 0;
        for (int i = 0; i <= n_; ++i) {
          const int e = ta.exponents[i] + tb.exponents[i];
          num *= static_cast<double>(detail::factorial(e));
          sum += e;
        }
        const double moment = num / static_cast<double>(detail::factorial(sum + n_));
        total += as_double(ca) * as_double(cb) * detail::masked_det(gram, ta.mask, tb.mask) * moment;
      }
    }
    return total * volume;
  }

  bool operator==(const PolyForm& other) const {
    return n_ == other.n_ && degree_ == other.degree_ && terms_ == other.terms_;
  }

  template <class T>
  PolyForm<T> cast() const {
    PolyForm<T> out(n_, degree_);
    for (const auto& [t, c] : terms_) out.add_term(t, T(as_double(c)));
    return out;
  }

  std::string to_string() const {
    if (terms_.empty()) return "0";
    std::string s;
    for (const auto& [t, c] : terms_) {
      if (!s.empty()) s += " + ";
      s += "(" + scalar_string(c) + ")";
      for (int i = 0; i <= n_; ++i) {
        if (t.exponents[i]) s += " mu" + std::to_string(i) + "^" + std::to_string(t.exponents[i]);
      }
      for (unsigned bits = t.mask; bits; bits &= bits - 1) s += " dmu" + std::to_string(std::countr_zero(bits));
    }
    return s;
  }

 private:
  static std::string scalar_string(const double& x) { return std::to_string(x); }
  static std::string scalar_string(const Rational& x) {
    return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
  }

  void require_same_shape(const PolyForm& other) const {
    if (n_ != other.n_ || degree_ != other.degree_) {
      throw ValidationError("polynomial forms of different shape");
    }
  }

  int n_;
  int degree_;
  std::map<PolyTerm, S> terms_;
};

/// Whitney form of the face with the given sorted vertex positions, written
/// on an n-simplex: k! sum_i (-1)^i mu_{p_i} dmu_{p_0} ^ .. (omit p_i) .. ^ dmu_{p_k}.
template <class S>
PolyForm<S> whitney_local(int n, std::span<const int> positions) {
  const int k = static_cast<int>(positions.size()) - 1;
  PolyForm<S> out(n, k);
  const S scale(detail::factorial(k));
  for (int i = 0; i <= k; ++i) {
    PolyTerm t;
    t.exponents[static_cast<std::size_t>(positions[i])] = 1;
    for (int j = 0; j <= k; ++j) {
      if (j != i) t.mask |= static_cast<std::uint8_t>(1u << positions[j]);
    }
    out.add_term(t, i % 2 == 0 ? scale : -scale);
  }
  return out;
}

}  // namespace cochainflow

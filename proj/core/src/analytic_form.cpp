#include "cochainflow/analytic_form.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "cochainflow/errors.hpp"

namespace cochainflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Wavevector negate(const Wavevector& k) { return {-k[0], -k[1], -k[2]}; }

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw ValidationError("analytic forms support dimensions 1..3");
}

}  // namespace

TrigPolynomial TrigPolynomial::constant(int dim, double value) {
  TrigPolynomial p(dim);
  p.add_mode({0, 0, 0}, value);
  return p;
}

TrigPolynomial TrigPolynomial::cosine(int dim, const Wavevector& k) {
  TrigPolynomial p(dim);
  p.add_mode(k, 0.5);
  p.add_mode(negate(k), 0.5);
  return p;
}

TrigPolynomial TrigPolynomial::sine(int dim, const Wavevector& k) {
  TrigPolynomial p(dim);
  p.add_mode(k, std::complex<double>(0.0, -0.5));
  p.add_mode(negate(k), std::complex<double>(0.0, 0.5));
  return p;
}

void TrigPolynomial::add_mode(const Wavevector& k, std::complex<double> c) {
  for (int a = dim_; a < 3; ++a) {
    if (k[a] != 0) throw ValidationError("wave vector has components beyond the torus dimension");
  }
  auto [it, inserted] = modes_.try_emplace(k, c);
  if (!inserted) it->second += c;
  if (it->second == 0.0) modes_.erase(it);
}

double TrigPolynomial::evaluate(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& [k, c] : modes_) {
    double phase = 0.0;
    for (int a = 0; a < dim_; ++a) phase += k[a] * x[a];
    phase *= kTwoPi;
    sum += c.real() * std::cos(phase) - c.imag() * std::sin(phase);
  }
  return sum;
}

TrigPolynomial TrigPolynomial::derivative(int axis) const {
  TrigPolynomial out(dim_);
  for (const auto& [k, c] : modes_) {
    if (k[axis] != 0) out.modes_.emplace(k, c * std::complex<double>(0.0, kTwoPi * k[axis]));
  }
  return out;
}

TrigPolynomial& TrigPolynomial::operator+=(const TrigPolynomial& other) {
  for (const auto& [k, c] : other.modes_) add_mode(k, c);
  return *this;
}

TrigPolynomial& TrigPolynomial::operator-=(const TrigPolynomial& other) {
  for (const auto& [k, c] : other.modes_) add_mode(k, -c);
  return *this;
}

TrigPolynomial& TrigPolynomial::operator*=(double s) {
  if (s == 0.0) {
    modes_.clear();
    return *this;
  }
  for (auto& [k, c] : modes_) c *= s;
  return *this;
}

TrigPolynomial operator*(const TrigPolynomial& a, const TrigPolynomial& b) {
  TrigPolynomial out(std::max(a.dim(), b.dim()));
  for (const auto& [ka, ca] : a.modes_) {
    for (const auto& [kb, cb] : b.modes_) {
      out.add_mode({ka[0] + kb[0], ka[1] + kb[1], ka[2] + kb[2]}, ca * cb);
    }
  }
  return out;
}

TrigPolynomial& TrigPolynomial::prune(double relative_tol) {
  return drop_below(relative_tol * max_abs_coefficient());
}

TrigPolynomial& TrigPolynomial::drop_below(double absolute_tol) {
  std::erase_if(modes_, [&](const auto& entry) { return std::abs(entry.second) <= absolute_tol; });
  return *this;
}

double TrigPolynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [k, c] : modes_) m = std::max(m, std::abs(c));
  return m;
}

const std::vector<unsigned>& basis_masks(int dim, int degree) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<unsigned>> cache;
  if (dim < 0 || degree < 0 || degree > dim || dim > 16) {
    throw ValidationError("form degree " + std::to_string(degree) + " invalid in dimension " +
                          std::to_string(dim));
  }
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({dim, degree});
  if (inserted) {
    for (unsigned m = 0; m < (1u << dim); ++m) {
      if (std::popcount(m) == degree) it->second.push_back(m);
    }
  }
  return it->second;
}

int merge_sign(unsigned a, unsigned b) {
  if (a & b) return 0;
  int swaps = 0;
  for (unsigned rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    swaps += std::popcount(a >> (j + 1));
  }
  return swaps % 2 == 0 ? 1 : -1;
}

AnalyticForm::AnalyticForm(int dim, int degree) : dim_(dim), degree_(degree) {
  check_dim(dim);
  if (degree < 0 || degree > dim) throw ValidationError("form degree out of range");
}

AnalyticForm AnalyticForm::function(const TrigPolynomial& f) {
  AnalyticForm form(f.dim(), 0);
  form.add(0u, f);
  return form;
}

AnalyticForm AnalyticForm::constant(int dim, double value) {
  return function(TrigPolynomial::constant(dim, value));
}

AnalyticForm AnalyticForm::differential(int dim, int axis) {
  AnalyticForm form(dim, 1);
  if (axis < 0 || axis >= dim) throw ValidationError("differential axis out of range");
  form.add(1u << axis, TrigPolynomial::constant(dim, 1.0));
  return form;
}

AnalyticForm AnalyticForm::taylor_green() {
  AnalyticForm form(2, 1);
  form.add(1u, TrigPolynomial::cosine(2, {1, 0, 0}) * TrigPolynomial::sine(2, {0, 1, 0}));
  form.add(2u, -1.0 * (TrigPolynomial::sine(2, {1, 0, 0}) * TrigPolynomial::cosine(2, {0, 1, 0})));
  return form;
}

TrigPolynomial AnalyticForm::component(unsigned mask) const {
  auto it = components_.find(mask);
  return it == components_.end() ? TrigPolynomial(dim_) : it->second;
}

void AnalyticForm::add(unsigned mask, const TrigPolynomial& f) {
  if (std::popcount(mask) != degree_ || mask >= (1u << dim_)) {
    throw ValidationError("component does not match form degree");
  }
  auto [it, inserted] = components_.try_emplace(mask, f);
  if (!inserted) it->second += f;
  if (it->second.empty()) components_.erase(it);
}

Eigen::VectorXd AnalyticForm::evaluate(std::span<const double> x) const {
  const auto& masks = basis_masks(dim_, degree_);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(masks.size()));
  for (std::size_t i = 0; i < masks.size(); ++i) {
    auto it = components_.find(masks[i]);
    if (it != components_.end()) values[static_cast<Eigen::Index>(i)] = it->second.evaluate(x);
  }
  return values;
}

AnalyticForm AnalyticForm::d() const {
  if (degree_ == dim_) return AnalyticForm(dim_, dim_);
  AnalyticForm out(dim_, degree_ + 1);
  for (const auto& [mask, f] : components_) {
    for (int axis = 0; axis < dim_; ++axis) {
      const unsigned bit = 1u << axis;
      if (mask & bit) continue;
      TrigPolynomial df = f.derivative(axis);
      if (df.empty()) continue;
      out.add(mask | bit, merge_sign(bit, mask) * df);
    }
  }
  return out;
}

AnalyticForm AnalyticForm::star() const {
  const unsigned full = (1u << dim_) - 1;
  AnalyticForm out(dim_, dim_ - degree_);
  for (const auto& [mask, f] : components_) {
    const unsigned rest = full ^ mask;
    out.add(rest, merge_sign(mask, rest) * f);
  }
  return out;
}

AnalyticForm AnalyticForm::codifferential() const {
  if (degree_ == 0) throw ValidationError("codifferential of a 0-form");
  const int exponent = dim_ * (degree_ + 1) + 1;
  AnalyticForm out = star().d().star();
  if (exponent % 2 != 0) out *= -1.0;
  return out;
}

AnalyticForm& AnalyticForm::operator+=(const AnalyticForm& other) {
  if (other.dim_ != dim_ || other.degree_ != degree_) throw ValidationError("form shape mismatch");
  for (const auto& [mask, f] : other.components_) add(mask, f);
  return *this;
}

AnalyticForm& AnalyticForm::operator-=(const AnalyticForm& other) {
  if (other.dim_ != dim_ || other.degree_ != degree_) throw ValidationError("form shape mismatch");
  for (const auto& [mask, f] : other.components_) add(mask, -1.0 * f);
  return *this;
}

AnalyticForm& AnalyticForm::operator*=(double s) {
  if (s == 0.0) {
    components_.clear();
    return *this;
  }
  for (auto& [mask, f] : components_) f *= s;
  return *this;
}

AnalyticForm& AnalyticForm::prune(double relative_tol) {
  const double cutoff = relative_tol * max_abs_coefficient();
  for (auto& [mask, f] : components_) f.drop_below(cutoff);
  std::erase_if(components_, [](const auto& entry) { return entry.second.empty(); });
  return *this;
}

double AnalyticForm::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [mask, f] : components_) m = std::max(m, f.max_abs_coefficient());
  return m;
}

bool AnalyticForm::approx_equal(const AnalyticForm& other, double relative_tol) const {
  if (other.dim_ != dim_ || other.degree_ != degree_) return false;
  const double scale = std::max(max_abs_coefficient(), other.max_abs_coefficient());
  AnalyticForm diff = *this;
  diff -= other;
  return diff.max_abs_coefficient() <= relative_tol * scale;
}

int AnalyticForm::max_frequency() const {
  int m = 0;
  for (const auto& [mask, f] : components_) {
    for (const auto& [k, c] : f.modes()) {
      for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(k[a]));
    }
  }
  return m;
}

std::string AnalyticForm::to_string() const {
  static const char* axes[] = {"x", "y", "z"};
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [mask, f] : components_) {
    for (const auto& [k, c] : f.modes()) {
      if (!first) out << " + ";
      first = false;
      out << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)*exp(2pi i(";
      bool any = false;
      for (int a = 0; a < dim_; ++a) {
        if (k[a] == 0) continue;
        out << (any && k[a] > 0 ? "+" : "") << k[a] << axes[a];
        any = true;
      }
      if (!any) out << "0";
      out << "))";
      for (int a = 0; a < dim_; ++a) {
        if (mask & (1u << a)) out << " d" << axes[a];
      }
    }
  }
  if (first) out << "0";
  return out.str();
}

AnalyticForm wedge(const AnalyticForm& a, const AnalyticForm& b) {
  if (a.dim() != b.dim()) throw ValidationError("wedge of forms on different tori");
  if (a.degree() + b.degree() > a.dim()) throw ValidationError("wedge degree exceeds dimension");
  AnalyticForm out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, fa] : a.components()) {
    for (const auto& [mb, fb] : b.components()) {
      const int sign = merge_sign(ma, mb);
      if (sign == 0) continue;
      out.add(ma | mb, static_cast<double>(sign) * (fa * fb));
    }
  }
  return out;
}

AnalyticForm wedge_adjoint(const AnalyticForm& w, const AnalyticForm& alpha) {
  if (w.degree() != 1) throw ValidationError("wedge_adjoint expects a 1-form multiplier");
  if (alpha.degree() < 1) throw ValidationError("wedge_adjoint of a 0-form");
  AnalyticForm out(alpha.dim(), alpha.degree() - 1);
  for (const auto& [mk, fk] : alpha.components()) {
    for (const auto& [mi, wi] : w.components()) {
      if (!(mk & mi)) continue;
      const unsigned rest = mk ^ mi;
      out.add(rest, static_cast<double>(merge_sign(mi, rest)) * (wi * fk));
    }
  }
  return out;
}

double inner(const AnalyticForm& a, const AnalyticForm& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) throw ValidationError("inner product shape mismatch");
  double sum = 0.0;
  for (const auto& [mask, fa] : a.components()) {
    auto it = b.components().find(mask);
    if (it == b.components().end()) continue;
    for (const auto& [k, c] : fa.modes()) {
      auto jt = it->second.modes().find(negate(k));
      if (jt != it->second.modes().end()) sum += (c * jt->second).real();
    }
  }
  return sum;
}

double l2_norm(const AnalyticForm& a) { return std::sqrt(std::max(inner(a, a), 0.0)); }

AnalyticForm project_coclosed(const AnalyticForm& one_form) {
  if (one_form.degree() != 1) throw ValidationError("project_coclosed expects a 1-form");
  const int dim = one_form.dim();
  std::map<Wavevector, std::array<std::complex<double>, 3>> vectors;
  for (const auto& [mask, f] : one_form.components()) {
    const int axis = std::countr_zero(mask);
    for (const auto& [k, c] : f.modes()) vectors[k][axis] += c;
  }
  AnalyticForm out(dim, 1);
  for (auto& [k, v] : vectors) {
    double k2 = 0.0;
    std::complex<double> kv = 0.0;
    for (int a = 0; a < dim; ++a) {
      k2 += static_cast<double>(k[a]) * k[a];
      kv += static_cast<double>(k[a]) * v[a];
    }
    for (int a = 0; a < dim; ++a) {
      std::complex<double> c = v[a];
      if (k2 > 0.0) c -= kv * (static_cast<double>(k[a]) / k2);
      if (c != 0.0) {
        TrigPolynomial mode(dim);
        mode.add_mode(k, c);
        out.add(1u << a, mode);
      }
    }
  }
  return out;
}

AnalyticForm euler_operator(const AnalyticForm& w) { return wedge_adjoint(w, w.d()); }

AnalyticForm navier_stokes_operator(const AnalyticForm& w, double nu) {
  AnalyticForm t = euler_operator(w);
  if (nu != 0.0) t -= nu * w.d().codifferential();
  return t;
}

AnalyticForm smooth_flow_vector(const AnalyticForm& w, double nu) {
  return project_coclosed(navier_stokes_operator(w, nu)).prune();
}

}  // namespace cochainflow

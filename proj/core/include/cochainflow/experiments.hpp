#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cochainflow/analytic_form.hpp"
#include "cochainflow/hodge.hpp"
#include "cochainflow/whitney.hpp"

namespace cochainflow {

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points_used = 0;
  bool valid = false;  // false when fewer than two usable (positive) errors remain
};

/// Least squares of log(error) against log(eta). Errors at or below
/// `zero_floor` carry no rate information and are skipped.
LogLogFit fit_loglog(std::span<const double> eta, std::span<const double> error, double zero_floor = 0.0);

struct StudyPoint {
  int resolution = 0;
  double eta = 0.0;
  double error = 0.0;
};

struct RefinementStudy {
  std::string kind;
  std::vector<StudyPoint> points;
  LogLogFit fit;
  /// Every error below the floor: the discrete side reproduces the form.
  bool exact = false;
};

struct ExperimentOptions {
  Metric metric = Metric::Whitney;
  QuadratureOptions quadrature;
  int threads = 1;
  int dim = 2;
  /// Errors below zero_floor_relative * |reference| count as exact zeros.
  double zero_floor_relative = 1e-12;
};

/// Checks resolutions (>= 3, increasing) and throws ValidationError otherwise.
void validate_resolutions(std::span<const int> resolutions);

/// ||W R w - w|| on torus(n) for each n.
RefinementStudy converge_wr(const AnalyticForm& form, std::span<const int> resolutions,
                            const ExperimentOptions& options = {});

/// ||W(R a ∪ R b) - a ^ b|| on torus(n) for each n.
RefinementStudy converge_cup(const AnalyticForm& a, const AnalyticForm& b, std::span<const int> resolutions,
                             const ExperimentOptions& options = {});

/// Results of the symbolic checks run before any smooth reference is used.
struct OracleCheck {
  bool dd_zero = false;                 // d(d w) = 0
  bool codifferential_squared_zero = false;  // d*(d*(d w)) = 0
  bool reference_coclosed = false;      // d* pi(T_nu w) = 0
  bool projection_idempotent = false;   // pi(pi(T_nu w)) = pi(T_nu w)
  /// pi(T_0 w) = 0, i.e. the nonlinear term is a gradient for this form.
  bool nonlinear_term_exact = false;
  /// pi(T_nu w) = -nu d*d w (holds exactly when the nonlinear term is exact).
  bool purely_viscous = false;
  AnalyticForm reference{2, 1};         // pi(T_nu w)

  bool consistent() const {
    return dd_zero && codifferential_squared_zero && reference_coclosed && projection_idempotent &&
           (!nonlinear_term_exact || purely_viscous);
  }
};

/// Runs the checks above; throws NumericalError if an identity fails.
OracleCheck verify_smooth_oracle(const AnalyticForm& form, double nu);

struct NamedForm {
  std::string id;
  AnalyticForm form;
};

/// Test forms used when the caller gives none: the Taylor-Green form, its
/// two halves, and a form with a harmonic and a non-axis-aligned part.
std::vector<NamedForm> default_test_forms();

struct WeakRow {
  int resolution = 0;
  double eta = 0.0;
  std::string test_id;
  double discrete = 0.0;   // <W pi(T_nu R w), eta>
  double reference = 0.0;  // <pi(T_nu w), eta>
  double gap = 0.0;
};

struct WeakConvergenceReport {
  double nu = 0.0;
  OracleCheck oracle;
  std::vector<NamedForm> tests;
  std::vector<WeakRow> rows;  // ordered by resolution, then test
  /// Per test form: gaps non-increasing, with `wobble` relative slack at the
  /// coarsest pair.
  std::vector<bool> monotone;
  bool all_monotone() const;
};

WeakConvergenceReport converge_weak_flow(const AnalyticForm& form, double nu, const std::vector<NamedForm>& tests,
                                         std::span<const int> resolutions, const ExperimentOptions& options = {},
                                         double wobble = 0.05);

/// Gap sequence check used by the weak study. Gaps below `floor` count as zero.
bool gaps_non_increasing(std::span<const double> gaps, double wobble, double floor);

struct SteadyRow {
  int resolution = 0;
  double eta = 0.0;
  double residual = 0.0;           // |pi T_nu(R w)|
  double relative_residual = 0.0;  // residual / |R w|
};

struct SteadyScanReport {
  double nu = 0.0;
  OracleCheck oracle;
  std::vector<SteadyRow> rows;
  std::vector<WeakRow> pairings;
  /// Smooth steady residual |pi T_nu w|.
  double smooth_residual = 0.0;
};

SteadyScanReport steady_state_scan(const AnalyticForm& form, double nu, std::span<const int> resolutions,
                                   const std::vector<NamedForm>& tests, const ExperimentOptions& options = {});

/// Runs f(0..count-1) on up to `threads` threads; results keep index order.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f);

}  // namespace cochainflow

#include "cochainflow/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "cochainflow/cup.hpp"
#include "cochainflow/flow.hpp"

namespace cochainflow {

LogLogFit fit_loglog(std::span<const double> eta, std::span<const double> error, double zero_floor) {
  if (eta.size() != error.size()) throw ValidationError("fit needs as many errors as mesh sizes");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(error[i] > zero_floor) || !(eta[i] > 0)) continue;
    const double x = std::log(eta[i]);
    const double y = std::log(error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  LogLogFit fit;
  fit.points_used = count;
  if (count < 2) return fit;
  const double denom = count * sxx - sx * sx;
  if (!(std::abs(denom) > 0)) return fit;
  fit.slope = (count * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / count;
  fit.valid = true;
  return fit;
}

void validate_resolutions(std::span<const int> resolutions) {
  if (resolutions.size() < 3) throw ValidationError("a refinement study needs at least 3 resolutions");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 1) throw ValidationError("resolutions must be positive");
    if (i > 0 && resolutions[i] <= resolutions[i - 1]) {
      throw ValidationError("resolutions must be strictly increasing");
    }
  }
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& f) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

namespace {

struct Mesh {
  SimplicialComplex complex;
  double eta;
};

Mesh torus_mesh(int resolution, int dim) {
  SimplicialComplex complex = build_flat_torus(resolution, dim);
  const double eta = mesh_quality(complex).eta;
  return Mesh{std::move(complex), eta};
}

void require_torus_form(const AnalyticForm& form, const ExperimentOptions& options) {
  if (form.dim() != options.dim) {
    throw ValidationError("form lives on a " + std::to_string(form.dim()) + "-torus but the study uses dimension " +
                          std::to_string(options.dim));
  }
}

RefinementStudy finish_study(std::string kind, std::vector<StudyPoint> points, double zero_floor) {
  RefinementStudy study;
  study.kind = std::move(kind);
  std::vector<double> eta, err;
  for (const auto& p : points) {
    eta.push_back(p.eta);
    err.push_back(p.error);
  }
  study.points = std::move(points);
  study.fit = fit_loglog(eta, err, zero_floor);
  study.exact = std::all_of(err.begin(), err.end(), [&](double e) { return e <= zero_floor; });
  return study;
}

double symbolic_tolerance(std::initializer_list<const AnalyticForm*> forms) {
  double scale = 0.0;
  for (const auto* f : forms) scale = std::max(scale, f->max_abs_coefficient());
  return 1e-10 * std::max(scale, 1e-300);
}

}  // namespace

RefinementStudy converge_wr(const AnalyticForm& form, std::span<const int> resolutions,
                            const ExperimentOptions& options) {
  validate_resolutions(resolutions);
  require_torus_form(form, options);
  if (!form.d().d().is_zero(symbolic_tolerance({&form}))) throw NumericalError("symbolic check d(d w) = 0 failed");
  std::vector<StudyPoint> points(resolutions.size());
  parallel_for(resolutions.size(), options.threads, [&](std::size_t i) {
    const Mesh mesh = torus_mesh(resolutions[i], options.dim);
    const Cochain c = de_rham(form, mesh.complex, options.quadrature);
    points[i] = StudyPoint{resolutions[i], mesh.eta, l2_distance(whitney_map(c), form, options.quadrature)};
  });
  return finish_study("converge-wr", std::move(points), options.zero_floor_relative * l2_norm(form));
}

RefinementStudy converge_cup(const AnalyticForm& a, const AnalyticForm& b, std::span<const int> resolutions,
                             const ExperimentOptions& options) {
  validate_resolutions(resolutions);
  require_torus_form(a, options);
  require_torus_form(b, options);
  if (a.degree() + b.degree() > options.dim) throw ValidationError("cup degree exceeds the torus dimension");
  const AnalyticForm target = wedge(a, b);
  std::vector<StudyPoint> points(resolutions.size());
  parallel_for(resolutions.size(), options.threads, [&](std::size_t i) {
    const Mesh mesh = torus_mesh(resolutions[i], options.dim);
    const CupTable table(mesh.complex);
    const Cochain ra = de_rham(a, mesh.complex, options.quadrature);
    const Cochain rb = de_rham(b, mesh.complex, options.quadrature);
    const Cochain product = cup(table, ra, rb);
    points[i] = StudyPoint{resolutions[i], mesh.eta, l2_distance(whitney_map(product), target, options.quadrature)};
  });
  const double scale = std::max(l2_norm(target), l2_norm(a) * l2_norm(b));
  return finish_study("converge-cup", std::move(points), options.zero_floor_relative * scale);
}

OracleCheck verify_smooth_oracle(const AnalyticForm& form, double nu) {
  if (form.degree() != 1) throw ValidationError("the smooth flow oracle takes a 1-form");
  OracleCheck check;
  const AnalyticForm dw = form.d();
  const AnalyticForm euler = euler_operator(form);
  const AnalyticForm viscous = dw.codifferential();
  const AnalyticForm total = euler - nu * viscous;
  const double tol = symbolic_tolerance({&form, &dw, &euler, &viscous});

  check.dd_zero = dw.d().is_zero(tol);
  check.codifferential_squared_zero = dw.codifferential().codifferential().is_zero(tol);
  check.reference = project_coclosed(total);
  check.reference_coclosed = check.reference.codifferential().is_zero(tol);
  check.projection_idempotent = (project_coclosed(check.reference) - check.reference).is_zero(tol);
  check.nonlinear_term_exact = project_coclosed(euler).is_zero(tol);
  check.purely_viscous = (check.reference + nu * viscous).is_zero(tol);
  if (!check.consistent()) throw NumericalError("smooth oracle self-check failed for " + form.to_string());
  return check;
}

std::vector<NamedForm> default_test_forms() {
  const TrigPolynomial cx_sy = TrigPolynomial::cosine(2, {1, 0, 0}) * TrigPolynomial::sine(2, {0, 1, 0});
  const TrigPolynomial sx_cy = TrigPolynomial::sine(2, {1, 0, 0}) * TrigPolynomial::cosine(2, {0, 1, 0});
  AnalyticForm half_x(2, 1);
  half_x.add(0b01, cx_sy);
  AnalyticForm half_y(2, 1);
  half_y.add(0b10, sx_cy);
  AnalyticForm mixed(2, 1);
  mixed.add(0b01, cx_sy + TrigPolynomial::constant(2, 1.0));
  mixed.add(0b10, 0.5 * TrigPolynomial::cosine(2, {1, 1, 0}));
  return {{"taylor-green", AnalyticForm::taylor_green()},
          {"cos(2pi x)*sin(2pi y) dx", half_x},
          {"sin(2pi x)*cos(2pi y) dy", half_y},
          {"(cos(2pi x)*sin(2pi y) + 1) dx + 0.5*cos(2pi(x+y)) dy", mixed}};
}

bool gaps_non_increasing(std::span<const double> gaps, double wobble, double floor) {
  for (std::size_t i = 1; i < gaps.size(); ++i) {
    const double allowed = i == 1 ? gaps[0] * (1.0 + wobble) : gaps[i - 1];
    if (gaps[i] > allowed && gaps[i] > floor) return false;
  }
  return true;
}

bool WeakConvergenceReport::all_monotone() const {
  return std::all_of(monotone.begin(), monotone.end(), [](bool b) { return b; });
}

namespace {

// Discrete weak pairings <W pi(T_nu R w), eta> on one mesh.
std::vector<WeakRow> weak_rows(const Mesh& mesh, int resolution, const AnalyticForm& form, double nu,
                               const AnalyticForm& reference, const std::vector<NamedForm>& tests,
                               const ExperimentOptions& options, double* steady_residual = nullptr,
                               double* state_norm = nullptr) {
  const InnerProductModel model(mesh.complex, options.metric);
  const FlowSystem flow(model);
  const Cochain c = de_rham(form, mesh.complex, options.quadrature);
  const Cochain v = flow.flow_vector(c, nu);
  if (steady_residual) *steady_residual = model.norm(v);
  if (state_norm) *state_norm = model.norm(c);
  const auto wv = whitney_map(v);
  std::vector<WeakRow> rows;
  for (const auto& test : tests) {
    WeakRow row;
    row.resolution = resolution;
    row.eta = mesh.eta;
    row.test_id = test.id;
    row.discrete = l2_inner(wv, test.form, options.quadrature);
    row.reference = inner(reference, test.form);
    row.gap = std::abs(row.discrete - row.reference);
    rows.push_back(std::move(row));
  }
  return rows;
}

void require_tests(const std::vector<NamedForm>& tests, const AnalyticForm& form) {
  for (const auto& t : tests) {
    if (t.form.dim() != form.dim() || t.form.degree() != 1) {
      throw ValidationError("test form '" + t.id + "' must be a 1-form on the same torus");
    }
  }
}

}  // namespace

WeakConvergenceReport converge_weak_flow(const AnalyticForm& form, double nu, const std::vector<NamedForm>& tests,
                                         std::span<const int> resolutions, const ExperimentOptions& options,
                                         double wobble) {
  validate_resolutions(resolutions);
  require_torus_form(form, options);
  if (tests.empty()) throw ValidationError("the weak study needs at least one test form");
  require_tests(tests, form);
  WeakConvergenceReport report;
  report.nu = nu;
  report.oracle = verify_smooth_oracle(form, nu);
  report.tests = tests;

  std::vector<std::vector<WeakRow>> per_mesh(resolutions.size());
  parallel_for(resolutions.size(), options.threads, [&](std::size_t i) {
    const Mesh mesh = torus_mesh(resolutions[i], options.dim);
    per_mesh[i] = weak_rows(mesh, resolutions[i], form, nu, report.oracle.reference, tests, options);
  });
  for (auto& rows : per_mesh) {
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }

  const double scale = l2_norm(report.oracle.reference) + l2_norm(euler_operator(form));
  for (std::size_t t = 0; t < tests.size(); ++t) {
    std::vector<double> gaps;
    for (std::size_t i = 0; i < resolutions.size(); ++i) gaps.push_back(report.rows[i * tests.size() + t].gap);
    const double floor = 1e-10 * scale * l2_norm(tests[t].form);
    report.monotone.push_back(gaps_non_increasing(gaps, wobble, floor));
  }
  return report;
}

SteadyScanReport steady_state_scan(const AnalyticForm& form, double nu, std::span<const int> resolutions,
                                   const std::vector<NamedForm>& tests, const ExperimentOptions& options) {
  validate_resolutions(resolutions);
  require_torus_form(form, options);
  require_tests(tests, form);
  SteadyScanReport report;
  report.nu = nu;
  report.oracle = verify_smooth_oracle(form, nu);
  report.smooth_residual = l2_norm(report.oracle.reference);

  report.rows.resize(resolutions.size());
  std::vector<std::vector<WeakRow>> per_mesh(resolutions.size());
  parallel_for(resolutions.size(), options.threads, [&](std::size_t i) {
    const Mesh mesh = torus_mesh(resolutions[i], options.dim);
    double residual = 0.0, norm = 0.0;
    per_mesh[i] = weak_rows(mesh, resolutions[i], form, nu, report.oracle.reference, tests, options, &residual, &norm);
    report.rows[i] = SteadyRow{resolutions[i], mesh.eta, residual, norm > 0 ? residual / norm : 0.0};
  });
  for (auto& rows : per_mesh) {
    for (auto& r : rows) report.pairings.push_back(std::move(r));
  }
  return report;
}

}  // namespace cochainflow

#include "cochainflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "cochainflow/form_parser.hpp"
#include "cochainflow/whitney.hpp"

namespace cochainflow {

Integrator parse_integrator(std::string_view name) {
  if (name == "rk4") return Integrator::RK4;
  if (name == "euler" || name == "forward-euler") return Integrator::ForwardEuler;
  throw ValidationError("unknown integrator '" + std::string(name) + "' (expected rk4 or euler)");
}

std::string to_string(Integrator integrator) { return integrator == Integrator::RK4 ? "rk4" : "euler"; }

void FlowParams::validate() const {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ValidationError("viscosity must be finite and >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time step must be finite and > 0");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw ValidationError("final time must be finite and >= 0");
  if (reprojection_period < 1) throw ValidationError("reprojection period must be >= 1");
  if (stride < 1) throw ValidationError("diagnostics stride must be >= 1");
}

namespace {

const InnerProductModel& require_surface(const InnerProductModel& model) {
  if (model.complex().dim() < 2) throw ValidationError("the flow needs a complex of dimension >= 2");
  return model;
}

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

FlowSystem::FlowSystem(const InnerProductModel& model)
    : model_(&require_surface(model)), cup_(model.complex()), projector_(model) {}

Eigen::VectorXd FlowSystem::apply_T(const Eigen::VectorXd& c, double nu) const {
  const InnerProductModel& m = *model_;
  const Eigen::VectorXd w = m.apply_mass(2, Eigen::VectorXd(m.coboundary(1) * c));
  Eigen::VectorXd rhs = cup_.left_cup_adjoint(c, w);
  if (nu != 0.0) rhs -= nu * (m.coboundary(1).transpose() * w);
  return m.solve_mass(1, rhs);
}

Cochain FlowSystem::apply_T(const Cochain& c, double nu) const {
  model_->require_member(c);
  if (c.degree() != 1) throw ValidationError("T_nu acts on 1-cochains");
  return Cochain(c.complex(), 1, apply_T(c.values(), nu));
}

Eigen::VectorXd FlowSystem::flow_vector(const Eigen::VectorXd& c, double nu) const {
  return projector_.project(apply_T(c, nu));
}

Cochain FlowSystem::flow_vector(const Cochain& c, double nu) const {
  model_->require_member(c);
  if (c.degree() != 1) throw ValidationError("the flow acts on 1-cochains");
  return Cochain(c.complex(), 1, flow_vector(c.values(), nu));
}

double FlowSystem::steady_residual(const Eigen::VectorXd& c, double nu) const {
  return model_->norm(1, flow_vector(c, nu));
}

SteadyReport FlowSystem::steady_report(const Eigen::VectorXd& c, double nu) const {
  SteadyReport report;
  report.residual = steady_residual(c, nu);
  if (nu == 0.0) {
    // |P_{im L_c} dc| in the M2 norm: with M2 = L L^T, orthonormalize L^T L_c.
    const InnerProductModel& m = *model_;
    const Eigen::MatrixXd lc = Eigen::MatrixXd(cup_.left_cup_matrix(c));
    const Eigen::VectorXd w = m.coboundary(1) * c;
    Eigen::MatrixXd b;
    Eigen::VectorXd y;
    if (m.metric() == Metric::Toy) {
      b = lc;
      y = w;
    } else {
      const Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(m.mass(2)));
      const Eigen::MatrixXd lt = llt.matrixU();
      b = lt * lc;
      y = lt * w;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
    const double scale = b.cwiseAbs().maxCoeff();
    qr.setThreshold(1e-12);
    const auto rank = scale > 0.0 ? qr.rank() : 0;
    if (rank == 0) {
      report.orthogonality_defect = 0.0;
    } else {
      const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).leftCols(rank);
      report.orthogonality_defect = (q.transpose() * y).norm();
    }
  }
  return report;
}

FlowState FlowSystem::make_state(double t, Eigen::VectorXd c) const {
  FlowState s;
  s.t = t;
  s.vorticity = model_->coboundary(1) * c;
  s.c = std::move(c);
  return s;
}

DiagnosticsRow FlowSystem::diagnose(const FlowState& state, double nu) const {
  const InnerProductModel& m = *model_;
  DiagnosticsRow row;
  row.t = state.t;
  row.energy = m.inner(1, state.c, state.c);
  row.vorticity_sq = m.inner(2, state.vorticity, state.vorticity);
  row.steady_residual = steady_residual(state.c, nu);
  row.coclosed_residual = m.norm(0, m.adjoint_coboundary(0, state.c));
  return row;
}

FlowState FlowSystem::step(const FlowState& state, const FlowParams& params, long step_index, double dt) const {
  const double nu = params.nu;
  Eigen::VectorXd next;
  if (params.integrator == Integrator::ForwardEuler) {
    next = state.c + dt * flow_vector(state.c, nu);
  } else {
    const Eigen::VectorXd k1 = flow_vector(state.c, nu);
    const Eigen::VectorXd k2 = flow_vector(state.c + 0.5 * dt * k1, nu);
    const Eigen::VectorXd k3 = flow_vector(state.c + 0.5 * dt * k2, nu);
    const Eigen::VectorXd k4 = flow_vector(state.c + dt * k3, nu);
    next = state.c + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  if ((step_index + 1) % params.reprojection_period == 0) next = projector_.project(next);
  if (!finite(next)) {
    throw NumericalError("non-finite state after step " + std::to_string(step_index + 1) + " at t = " +
                         std::to_string(state.t) + "; the time step is too large");
  }
  return make_state(state.t + dt, std::move(next));
}

Trajectory FlowSystem::run(const Cochain& initial, const FlowParams& params) const {
  params.validate();
  model_->require_member(initial);
  if (initial.degree() != 1) throw ValidationError("the flow starts from a 1-cochain");

  Trajectory out;
  FlowState state = make_state(0.0, projector_.project(initial.values()));
  auto record = [&](const FlowState& s) {
    out.diagnostics.push_back(diagnose(s, params.nu));
    if (params.record_states) out.states.push_back(s);
  };
  record(state);

  const double ratio = params.t_final / params.dt;
  const long steps = static_cast<long>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
  for (long i = 0; i < steps; ++i) {
    const double t_next = i + 1 == steps ? params.t_final : static_cast<double>(i + 1) * params.dt;
    try {
      state = step(state, params, i, t_next - state.t);
    } catch (const NumericalError& e) {
      out.blew_up = true;
      out.error = e.what();
      break;
    }
    state.t = t_next;
    ++out.steps;
    if ((i + 1) % params.stride == 0 || i + 1 == steps) record(state);
  }
  out.final_state = state;
  return out;
}

double default_time_step(const SimplicialComplex& complex, double nu) {
  const double h = min_edge_length(complex);
  return 0.1 * h * h / std::max(nu, h);
}

Eigen::VectorXd seeded_uniform(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(static_cast<Eigen::Index>(size));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v[i] = 2.0 * u - 1.0;
  }
  return v;
}

Cochain random_coclosed(const CoclosedProjector& projector, std::uint64_t seed) {
  const SimplicialComplex& complex = projector.model().complex();
  Eigen::VectorXd c = projector.project(seeded_uniform(complex.size(1), seed));
  const double norm = projector.model().norm(1, c);
  if (norm > 0.0) c /= norm;
  return Cochain(complex, 1, std::move(c));
}

namespace {

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string_view::npos) {
    throw ValidationError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  try {
    return std::stoull(std::string(text));
  } catch (const std::exception&) {
    throw ValidationError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
}

}  // namespace

Cochain initial_condition(const FlowSystem& system, std::string_view init) {
  const InnerProductModel& model = system.model();
  const SimplicialComplex& complex = model.complex();
  if (init.starts_with("random:")) return random_coclosed(system.projector(), parse_unsigned(init.substr(7), "seed"));
  if (init.starts_with("harmonic:")) {
    const auto k = parse_unsigned(init.substr(9), "harmonic index");
    const HarmonicBasis basis = harmonic_basis(model);
    if (k >= basis.vectors.size()) {
      throw ValidationError("harmonic index " + std::to_string(k) + " out of range; the complex has " +
                            std::to_string(basis.vectors.size()) + " harmonic cochains");
    }
    return basis.vectors[k];
  }
  if (!complex.periodic()) throw ValidationError("form initial conditions need a flat torus mesh");
  const AnalyticForm form = parse_form(init, complex.ambient_dim());
  if (form.degree() != 1) throw ValidationError("the initial condition must be a 1-form");
  return system.projector().project(de_rham(form, complex));
}

}  // namespace cochainflow

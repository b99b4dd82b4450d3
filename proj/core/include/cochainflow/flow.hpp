#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "cochainflow/cochain.hpp"
#include "cochainflow/cup.hpp"
#include "cochainflow/hodge.hpp"

namespace cochainflow {

enum class Integrator { RK4, ForwardEuler };

Integrator parse_integrator(std::string_view name);
std::string to_string(Integrator integrator);

struct FlowParams {
  double nu = 0.0;
  double dt = 1e-3;
  double t_final = 1.0;
  Integrator integrator = Integrator::RK4;
  int reprojection_period = 1;
  int stride = 1;             // diagnostics every `stride` steps (and at the end)
  bool record_states = false;  // keep the cochain at every recorded time

  void validate() const;
};

struct FlowState {
  double t = 0.0;
  Eigen::VectorXd c;
  Eigen::VectorXd vorticity;  // delta c
};

struct DiagnosticsRow {
  double t = 0.0;
  double energy = 0.0;             // <c, c>
  double vorticity_sq = 0.0;       // <delta c, delta c>
  double steady_residual = 0.0;    // |pi T_nu(c)|
  double coclosed_residual = 0.0;  // |delta* c|
};

struct Trajectory {
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<FlowState> states;  // only with record_states
  FlowState final_state;
  long steps = 0;
  bool blew_up = false;
  std::string error;
};

struct SteadyReport {
  double residual = 0.0;  // |pi T_nu(c)|
  /// For nu = 0: norm of the orthogonal projection of delta c onto im(L_c).
  std::optional<double> orthogonality_defect;
};

/// The flow dc/dt = pi(T_nu(c)) on C^1 for one complex and inner product.
/// Holds the cup table and the projector; member functions are const and
/// independent runs may share one instance.
class FlowSystem {
 public:
  explicit FlowSystem(const InnerProductModel& model);

  const InnerProductModel& model() const { return *model_; }
  const CoclosedProjector& projector() const { return projector_; }
  const CupTable& cup_table() const { return cup_; }

  /// T_nu(c) = M1^{-1} (L_c^T M2 dc - nu d1^T M2 dc).
  Eigen::VectorXd apply_T(const Eigen::VectorXd& c, double nu) const;
  Cochain apply_T(const Cochain& c, double nu) const;

  Eigen::VectorXd flow_vector(const Eigen::VectorXd& c, double nu) const;
  Cochain flow_vector(const Cochain& c, double nu) const;

  double steady_residual(const Eigen::VectorXd& c, double nu) const;
  SteadyReport steady_report(const Eigen::VectorXd& c, double nu) const;

  FlowState make_state(double t, Eigen::VectorXd c) const;
  DiagnosticsRow diagnose(const FlowState& state, double nu) const;

  /// One integrator step of size dt. `step_index` counts from 0 and drives
  /// the reprojection schedule. Throws NumericalError on non-finite values.
  FlowState step(const FlowState& state, const FlowParams& params, long step_index, double dt) const;
  FlowState step(const FlowState& state, const FlowParams& params, long step_index = 0) const {
    return step(state, params, step_index, params.dt);
  }

  /// Projects the initial cochain, then integrates to t_final. A blow-up
  /// stops the run; the trajectory then ends at the last finite state.
  Trajectory run(const Cochain& initial, const FlowParams& params) const;

 private:
  const InnerProductModel* model_;
  CupTable cup_;
  CoclosedProjector projector_;
};

/// dt = 0.1 h^2 / max(nu, h) with h the shortest edge.
double default_time_step(const SimplicialComplex& complex, double nu);

/// Uniform [-1, 1) entries from a seeded 64-bit Mersenne twister, mapped
/// bit-exactly so the result does not depend on the standard library.
Eigen::VectorXd seeded_uniform(std::size_t size, std::uint64_t seed);

/// pi applied to seeded random values, scaled to unit energy.
Cochain random_coclosed(const CoclosedProjector& projector, std::uint64_t seed);

/// Initial condition from a string: "random:SEED", "harmonic:K",
/// "taylor-green" or any form expression accepted by parse_form.
/// Always projected onto the co-closed cochains.
Cochain initial_condition(const FlowSystem& system, std::string_view init);

}  // namespace cochainflow

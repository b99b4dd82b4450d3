#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cochainflow/flow.hpp"
#include "oracles.hpp"

using namespace cochainflow;
using Catch::Approx;

namespace {

struct Fixture {
  SimplicialComplex complex;
  InnerProductModel model;
  FlowSystem system;

  Fixture(int n, Metric metric) : complex(build_flat_torus(n, 2)), model(complex, metric), system(model) {}
};

}  // namespace

TEST_CASE("flow parameters", "[flow]") {
  CHECK(parse_integrator("rk4") == Integrator::RK4);
  CHECK(parse_integrator("forward-euler") == Integrator::ForwardEuler);
  CHECK(to_string(Integrator::ForwardEuler) == "euler");
  CHECK_THROWS_AS(parse_integrator("leapfrog"), ValidationError);
  FlowParams p;
  CHECK_NOTHROW(p.validate());
  p.dt = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = FlowParams{};
  p.nu = -1.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = FlowParams{};
  p.reprojection_period = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK(default_time_step(build_flat_torus(4, 2), 0.01) == Approx(0.1 * 0.0625 / 0.25));
  CHECK(default_time_step(build_flat_torus(4, 2), 1.0) == Approx(0.1 * 0.0625));
}

TEST_CASE("seeded random cochains", "[flow]") {
  const Eigen::VectorXd a = seeded_uniform(1000, 42);
  CHECK(a == seeded_uniform(1000, 42));
  CHECK(a != seeded_uniform(1000, 43));
  CHECK(a.minCoeff() >= -1.0);
  CHECK(a.maxCoeff() < 1.0);
  CHECK(std::abs(a.mean()) < 0.1);
  Fixture f(4, Metric::Whitney);
  const Cochain c = random_coclosed(f.system.projector(), 5);
  CHECK(f.model.norm(c) == Approx(1.0));
  CHECK(f.model.norm(0, f.model.adjoint_coboundary(0, c.values())) < 1e-12);
}

TEST_CASE("the operator T_nu", "[flow]") {
  std::mt19937_64 rng(21);
  for (Metric metric : {Metric::Toy, Metric::Whitney}) {
    Fixture f(4, metric);
    const auto& m = f.model;
    const CupTable& cup = f.system.cup_table();
    const Eigen::VectorXd c = oracle::uniform_vector(rng, static_cast<Eigen::Index>(f.complex.size(1)));
    const double nu = 0.03;
    const Eigen::VectorXd t = f.system.apply_T(c, nu);
    const Eigen::VectorXd dc = m.coboundary(1) * c;
    DYNAMIC_SECTION("defining pairing (" << to_string(metric) << ")") {
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd b = oracle::uniform_vector(rng, c.size());
        const double expected = m.inner(2, dc, cup.apply(1, c, 1, b)) - nu * m.inner(2, dc, m.coboundary(1) * b);
        CHECK(m.inner(1, t, b) == Approx(expected).epsilon(1e-10));
      }
    }
    DYNAMIC_SECTION("the nonlinear part does no work (" << to_string(metric) << ")") {
      CHECK(std::abs(m.inner(1, f.system.apply_T(c, 0.0), c)) <= 1e-11 * m.norm(1, c) * m.norm(1, t));
    }
    DYNAMIC_SECTION("affine in nu (" << to_string(metric) << ")") {
      const Eigen::VectorXd t0 = f.system.apply_T(c, 0.0);
      const Eigen::VectorXd t1 = f.system.apply_T(c, 1.0);
      CHECK((t - (t0 + nu * (t1 - t0))).norm() <= 1e-11 * t.norm());
    }
    DYNAMIC_SECTION("instantaneous energy law (" << to_string(metric) << ")") {
      const Eigen::VectorXd pc = f.system.projector().project(c);
      const Eigen::VectorXd v = f.system.flow_vector(pc, nu);
      const Eigen::VectorXd dpc = m.coboundary(1) * pc;
      CHECK(2.0 * m.inner(1, pc, v) == Approx(-2.0 * nu * m.inner(2, dpc, dpc)).epsilon(1e-9));
      CHECK(m.norm(0, m.adjoint_coboundary(0, v)) <= 1e-10 * m.norm(1, v));
    }
  }
}

TEST_CASE("steady states", "[flow]") {
  for (Metric metric : {Metric::Toy, Metric::Whitney}) {
    Fixture f(4, metric);
    const HarmonicBasis basis = harmonic_basis(f.model);
    DYNAMIC_SECTION("harmonic cochains are steady (" << to_string(metric) << ")") {
      for (const auto& h : basis.vectors) {
        for (double nu : {0.0, 0.01}) CHECK(f.system.steady_residual(h.values(), nu) <= 1e-10);
        const SteadyReport r = f.system.steady_report(h.values(), 0.0);
        REQUIRE(r.orthogonality_defect.has_value());
        CHECK(*r.orthogonality_defect <= 1e-10);
      }
    }
    DYNAMIC_SECTION("Euler criterion on random cochains (" << to_string(metric) << ")") {
      // orthogonality of delta c to im(L_c) forces a zero residual, so a
      // nonzero residual must come with a nonzero defect
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Cochain c = random_coclosed(f.system.projector(), seed);
        const SteadyReport r = f.system.steady_report(c.values(), 0.0);
        REQUIRE(r.orthogonality_defect.has_value());
        CHECK(r.residual > 1e-6);
        CHECK(*r.orthogonality_defect > 1e-6);
      }
      CHECK_FALSE(f.system.steady_report(basis.vectors[0].values(), 0.1).orthogonality_defect.has_value());
    }
  }
}

TEST_CASE("flow integration", "[flow]") {
  SECTION("zero stays zero") {
    Fixture f(4, Metric::Whitney);
    FlowParams p;
    p.nu = 0.01;
    p.t_final = 0.05;
    p.dt = 0.01;
    const Trajectory tr = f.system.run(Cochain(f.complex, 1), p);
    CHECK(tr.steps == 5);
    CHECK(tr.final_state.c.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tr.final_state.t == 0.05);
  }
  SECTION("step count lands on t_final") {
    Fixture f(3, Metric::Toy);
    FlowParams p;
    p.dt = 0.3;
    p.t_final = 1.0;
    const Trajectory tr = f.system.run(random_coclosed(f.system.projector(), 1), p);
    CHECK(tr.steps == 4);
    CHECK(tr.diagnostics.back().t == 1.0);
    CHECK(tr.diagnostics.size() == 5);
  }
  for (Metric metric : {Metric::Toy, Metric::Whitney}) {
    Fixture f(6, metric);
    const Cochain c0 = random_coclosed(f.system.projector(), 3);
    DYNAMIC_SECTION("energy is conserved without viscosity (" << to_string(metric) << ")") {
      FlowParams p;
      p.dt = 2e-3;
      p.t_final = 0.2;
      const Trajectory tr = f.system.run(c0, p);
      const double e0 = tr.diagnostics.front().energy;
      for (const auto& row : tr.diagnostics) {
        CHECK(std::abs(row.energy - e0) <= 1e-9 * e0);
        CHECK(row.coclosed_residual <= 1e-8 * std::sqrt(row.energy));
      }
    }
    DYNAMIC_SECTION("energy decays with viscosity and the state approaches its harmonic part (" << to_string(metric) << ")") {
      FlowParams p;
      p.nu = 0.2;
      p.dt = 1e-3;
      p.t_final = 0.5;
      const Trajectory tr = f.system.run(c0, p);
      for (std::size_t i = 1; i < tr.diagnostics.size(); ++i) {
        CHECK(tr.diagnostics[i].energy < tr.diagnostics[i - 1].energy);
      }
      const HarmonicBasis basis = harmonic_basis(f.model);
      auto distance_to_harmonic = [&](const Eigen::VectorXd& c) {
        Eigen::VectorXd h = Eigen::VectorXd::Zero(c.size());
        for (const auto& v : basis.vectors) h += f.model.inner(1, v.values(), c) * v.values();
        return f.model.norm(1, c - h);
      };
      CHECK(distance_to_harmonic(tr.final_state.c) < 0.9 * distance_to_harmonic(c0.values()));
    }
    DYNAMIC_SECTION("runs are deterministic (" << to_string(metric) << ")") {
      FlowParams p;
      p.nu = 0.01;
      p.dt = 1e-3;
      p.t_final = 0.02;
      p.record_states = true;
      const Trajectory a = f.system.run(c0, p);
      const Trajectory b = f.system.run(c0, p);
      REQUIRE(a.states.size() == b.states.size());
      for (std::size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i].c == b.states[i].c);
    }
  }
  SECTION("blow-up is reported, not clamped") {
    Fixture f(4, Metric::Whitney);
    FlowParams p;
    p.nu = 1.0;
    p.dt = 1.0;
    p.t_final = 2000.0;
    p.integrator = Integrator::ForwardEuler;
    const Trajectory tr = f.system.run(random_coclosed(f.system.projector(), 2), p);
    CHECK(tr.blew_up);
    CHECK_FALSE(tr.error.empty());
    CHECK(tr.final_state.c.allFinite());
    CHECK(tr.steps < 2000);
  }
}

TEST_CASE("initial conditions", "[flow]") {
  Fixture f(4, Metric::Whitney);
  CHECK(initial_condition(f.system, "random:7").values() == random_coclosed(f.system.projector(), 7).values());
  const Cochain h = initial_condition(f.system, "harmonic:1");
  CHECK(f.model.norm(h) == Approx(1.0));
  const Cochain tg = initial_condition(f.system, "taylor-green");
  CHECK(f.model.norm(0, f.model.adjoint_coboundary(0, tg.values())) < 1e-12);
  CHECK_THROWS_AS(initial_condition(f.system, "harmonic:2"), ValidationError);
  CHECK_THROWS_AS(initial_condition(f.system, "random:x"), ValidationError);
  CHECK_THROWS_AS(initial_condition(f.system, "sin(2pi x)"), ValidationError);
  const auto sphere = build_icosahedron();
  const InnerProductModel sm(sphere, Metric::Toy);
  const FlowSystem ss(sm);
  CHECK_THROWS_AS(initial_condition(ss, "taylor-green"), ValidationError);
}

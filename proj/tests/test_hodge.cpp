#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cochainflow/form_parser.hpp"
#include "cochainflow/hodge.hpp"
#include "cochainflow/whitney.hpp"
#include "oracles.hpp"

using namespace cochainflow;
using Catch::Approx;

namespace {

Eigen::VectorXd random_vec(const SimplicialComplex& c, int k, std::mt19937_64& rng) {
  return oracle::uniform_vector(rng, static_cast<Eigen::Index>(c.size(k)));
}

}  // namespace

TEST_CASE("metric names", "[hodge]") {
  CHECK(parse_metric("toy") == Metric::Toy);
  CHECK(parse_metric("whitney") == Metric::Whitney);
  CHECK(to_string(Metric::Whitney) == "whitney");
  CHECK_THROWS_AS(parse_metric("euclid"), ValidationError);
}

TEST_CASE("adjoint of the coboundary", "[hodge]") {
  const auto t = build_flat_torus(4, 2);
  std::mt19937_64 rng(2);
  for (Metric metric : {Metric::Toy, Metric::Whitney}) {
    const InnerProductModel model(t, metric);
    for (int k = 0; k < 2; ++k) {
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd a = random_vec(t, k, rng);
        const Eigen::VectorXd b = random_vec(t, k + 1, rng);
        const double lhs = model.inner(k, model.adjoint_coboundary(k, b), a);
        const double rhs = model.inner(k + 1, b, model.coboundary(k) * a);
        CHECK(lhs == Approx(rhs).epsilon(1e-11));
      }
    }
  }
  SECTION("cochain overload checks its input") {
    const InnerProductModel model(t, Metric::Toy);
    CHECK_THROWS_AS(adjoint_coboundary(model, Cochain(t, 0)), ValidationError);
    const auto other = build_flat_torus(4, 2);
    CHECK_THROWS_AS(adjoint_coboundary(model, Cochain(other, 1)), ValidationError);
  }
}

TEST_CASE("projection onto co-closed cochains", "[hodge]") {
  std::mt19937_64 rng(9);
  for (const auto& c : {build_flat_torus(6, 2), build_icosahedron(), build_flat_torus(2, 3)}) {
    for (Metric metric : {Metric::Toy, Metric::Whitney}) {
      const InnerProductModel model(c, metric);
      const CoclosedProjector pi(model);
      for (int trial = 0; trial < 5; ++trial) {
        const Eigen::VectorXd x = random_vec(c, 1, rng);
        const Eigen::VectorXd y = random_vec(c, 1, rng);
        const Eigen::VectorXd px = pi.project(x);
        const double scale = model.norm(1, x);
        CHECK(model.norm(1, pi.project(px) - px) <= 1e-12 * scale);
        CHECK(model.norm(0, model.adjoint_coboundary(0, px)) <= 1e-10 * scale);
        CHECK(model.inner(1, px, y) == Approx(model.inner(1, x, pi.project(y))).epsilon(1e-10));
        // the removed part is a gradient of a mean-zero potential
        const Eigen::VectorXd f = pi.potential(x);
        CHECK(model.norm(1, x - px - model.coboundary(0) * f) <= 1e-10 * scale);
        CHECK(std::abs(f.mean()) <= 1e-12 * (1.0 + f.norm()));
      }
    }
  }
}

TEST_CASE("Hodge decomposition", "[hodge]") {
  const auto t = build_flat_torus(5, 2);
  std::mt19937_64 rng(4);
  for (Metric metric : {Metric::Toy, Metric::Whitney}) {
    const InnerProductModel model(t, metric);
    const Cochain c(t, 1, random_vec(t, 1, rng));
    const HodgeDecomposition h = hodge_decompose(model, c);
    const double scale = model.norm(c);
    CHECK(model.norm(1, h.exact.values() + h.coexact.values() + h.harmonic.values() - c.values()) <= 1e-10 * scale);
    CHECK(std::abs(model.inner(h.exact, h.coexact)) <= 1e-10 * scale * scale);
    CHECK(std::abs(model.inner(h.exact, h.harmonic)) <= 1e-10 * scale * scale);
    CHECK(std::abs(model.inner(h.coexact, h.harmonic)) <= 1e-10 * scale * scale);
    CHECK((model.coboundary(1) * h.harmonic.values()).norm() <= 1e-10 * scale);
    CHECK(model.norm(0, model.adjoint_coboundary(0, h.harmonic.values())) <= 1e-10 * scale);
    CHECK((model.coboundary(0) * h.potential - h.exact.values()).norm() <= 1e-10 * scale);
    CHECK(h.cg_residual <= 1e-12);
    // the harmonic part is the projection onto the harmonic basis
    const HarmonicBasis basis = harmonic_basis(model);
    Eigen::VectorXd proj = Eigen::VectorXd::Zero(c.values().size());
    for (const auto& v : basis.vectors) proj += model.inner(v, c) * v.values();
    CHECK(model.norm(1, proj - h.harmonic.values()) <= 1e-9 * scale);
  }
}

TEST_CASE("harmonic cochains", "[hodge]") {
  SECTION("dimension equals the first Betti number") {
    for (Metric metric : {Metric::Toy, Metric::Whitney}) {
      for (int n : {2, 3, 4, 8}) {
        const auto t = build_flat_torus(n, 2);
        const InnerProductModel model(t, metric);
        const HarmonicBasis b = harmonic_basis(model);
        CHECK(b.vectors.size() == 2);
        CHECK(b.gap >= 1e3);
      }
      const auto s = build_icosahedron();
      const HarmonicBasis bs = harmonic_basis(InnerProductModel(s, metric));
      CHECK(bs.vectors.empty());
      CHECK(bs.gap >= 1e3);
      const auto t3 = build_flat_torus(2, 3);
      CHECK(harmonic_basis(InnerProductModel(t3, metric)).vectors.size() == 3);
    }
  }
  SECTION("basis is orthonormal and harmonic") {
    const auto t = build_flat_torus(4, 2);
    const InnerProductModel model(t, Metric::Whitney);
    const HarmonicBasis b = harmonic_basis(model);
    REQUIRE(b.vectors.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(model.inner(b.vectors[i], b.vectors[j]) == Approx(i == j ? 1.0 : 0.0).margin(1e-12));
      }
      CHECK((model.coboundary(1) * b.vectors[i].values()).norm() < 1e-10);
      CHECK(model.norm(0, model.adjoint_coboundary(0, b.vectors[i].values())) < 1e-10);
    }
  }
  SECTION("R(dx) is harmonic on the flat torus") {
    const auto t = build_flat_torus(4, 2);
    const Cochain r = de_rham(AnalyticForm::differential(2, 0), t);
    for (Metric metric : {Metric::Toy, Metric::Whitney}) {
      const InnerProductModel model(t, metric);
      CHECK((model.coboundary(1) * r.values()).norm() < 1e-12);
      CHECK(model.norm(0, model.adjoint_coboundary(0, r.values())) < 1e-12);
      CHECK(model.norm(1, CoclosedProjector(model).project(r.values()) - r.values()) < 1e-12);
    }
  }
  SECTION("an ambiguous gap is reported") {
    const auto t = build_flat_torus(3, 2);
    HarmonicOptions opts;
    opts.relative_threshold = 0.5;
    opts.minimum_gap = 1e6;
    CHECK_THROWS_AS(harmonic_basis(InnerProductModel(t, Metric::Toy), opts), NumericalError);
    HarmonicOptions tiny;
    tiny.max_dense_size = 10;
    CHECK_THROWS_AS(harmonic_basis(InnerProductModel(t, Metric::Toy), tiny), ValidationError);
  }
}

TEST_CASE("discrete projection approximates the smooth one", "[hodge]") {
  // R of a gradient is a discrete gradient (Stokes), so pi removes it exactly
  const AnalyticForm grad = parse_form("sin(2pi x) dx + cos(2pi(x+y)) dx + cos(2pi(x+y)) dy");
  const AnalyticForm mixed = parse_form("sin(2pi x)*sin(2pi y) dx + cos(4pi y) dx");
  const AnalyticForm reference = project_coclosed(mixed);
  REQUIRE_FALSE(reference.approx_equal(mixed));
  std::vector<double> err;
  for (int n : {4, 8, 16}) {
    const auto t = build_flat_torus(n, 2);
    for (Metric metric : {Metric::Toy, Metric::Whitney}) {
      const InnerProductModel model(t, metric);
      const Cochain r = de_rham(grad, t);
      CHECK(model.norm(CoclosedProjector(model).project(r)) <= 1e-12 * model.norm(r));
    }
    const InnerProductModel model(t, Metric::Whitney);
    const CoclosedProjector pi(model);
    err.push_back(l2_distance(whitney_map(pi.project(de_rham(mixed, t))), reference));
  }
  CHECK(err[1] < 0.6 * err[0]);
  CHECK(err[2] < 0.6 * err[1]);
}

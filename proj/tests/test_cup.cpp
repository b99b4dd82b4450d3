#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cochainflow/cup.hpp"
#include "cochainflow/whitney.hpp"
#include "oracles.hpp"

using namespace cochainflow;

namespace {

SimplicialComplex triangle() {
  MeshData d;
  d.dim = 2;
  d.ambient_dim = 2;
  d.periods = {0.0, 0.0};
  d.vertex_count = 3;
  d.coords = {0, 0, 1, 0, 0, 1};
  d.cells = {{0, 1, 2}};
  return SimplicialComplex(d);
}

std::vector<Rational> elementary(std::size_t size, std::size_t i) {
  std::vector<Rational> v(size, Rational(0));
  v[i] = Rational(1);
  return v;
}

// R(Wa ^ Wb) in exact arithmetic.
std::vector<Rational> whitney_product(const SimplicialComplex& c, int j, const std::vector<Rational>& a, int k,
                                      const std::vector<Rational>& b) {
  return de_rham_values(wedge(whitney_map_exact(c, j, a), whitney_map_exact(c, k, b)));
}

Eigen::VectorXd random_cochain(const SimplicialComplex& c, int k, std::mt19937_64& rng) {
  return oracle::uniform_vector(rng, static_cast<Eigen::Index>(c.size(k)));
}

}  // namespace

TEST_CASE("cup coefficient magnitudes", "[cup]") {
  CHECK(cup_magnitude(0, 0) == Rational(1));
  CHECK(cup_magnitude(0, 1) == Rational(1, 2));
  CHECK(cup_magnitude(1, 1) == Rational(1, 6));
  CHECK(cup_magnitude(0, 2) == Rational(1, 3));
  CHECK(cup_magnitude(1, 2) == Rational(1, 12));

  const auto t = build_flat_torus(4, 2);
  const CupTable table(t);
  REQUIRE_FALSE(table.entries(1, 1).empty());
  for (const auto& e : table.entries(1, 1)) {
    CHECK(abs(e.coefficient) == Rational(1, 6));
    CHECK(e.value == boost::rational_cast<double>(e.coefficient));
  }
}

TEST_CASE("cup on a single triangle", "[cup]") {
  const auto tri = triangle();
  const CupTable table(tri);
  const auto e01 = *tri.find(Simplex{{0, 1}, {}});
  const auto e12 = *tri.find(Simplex{{1, 2}, {}});
  const auto e02 = *tri.find(Simplex{{0, 2}, {}});
  const auto n = tri.size(1);
  CHECK(table.apply_exact(1, elementary(n, e01), 1, elementary(n, e12))[0] == Rational(1, 6));
  CHECK(table.apply_exact(1, elementary(n, e12), 1, elementary(n, e01))[0] == Rational(-1, 6));
  CHECK(table.apply_exact(1, elementary(n, e01), 1, elementary(n, e01))[0] == Rational(0));
  // e01 u e02: shared vertex 0, the remaining vertices (1, 2) are in order
  CHECK(abs(table.apply_exact(1, elementary(n, e01), 1, elementary(n, e02))[0]) == Rational(1, 6));
  // 1 u b = b for the constant 0-cochain
  const std::vector<Rational> one(tri.size(0), Rational(1));
  const auto b = elementary(n, e12);
  CHECK(table.apply_exact(0, one, 1, b) == b);
  CHECK(table.apply_exact(1, b, 0, one) == b);
}

TEST_CASE("cup equals R(Wa ^ Wb) exactly", "[cup]") {
  for (const auto& c : {triangle(), build_flat_torus(2, 2), build_flat_torus(3, 2), build_flat_torus(2, 3)}) {
    const CupTable table(c);
    for (int j = 0; j <= c.dim(); ++j) {
      for (int k = 0; j + k <= c.dim(); ++k) {
        const auto expected = oracle::whitney_cup_tensor(c, j, k);
        CHECK(expected.consistent);
        CHECK(oracle::cup_table_tensor(table, j, k) == expected.entries);
      }
    }
  }
  SECTION("spot check against the global Whitney forms") {
    const auto t = build_flat_torus(3, 2);
    const CupTable table(t);
    for (std::size_t a = 0; a < t.size(1); a += 5) {
      for (std::size_t b = 0; b < t.size(1); b += 3) {
        const auto ea = elementary(t.size(1), a);
        const auto eb = elementary(t.size(1), b);
        CHECK(table.apply_exact(1, ea, 1, eb) == whitney_product(t, 1, ea, 1, eb));
      }
    }
  }
}

TEST_CASE("cup algebra on random cochains", "[cup]") {
  const auto t = build_flat_torus(4, 2);
  const CupTable table(t);
  const auto d0 = Eigen::SparseMatrix<double>(t.coboundary(0).cast<double>());
  const auto d1 = Eigen::SparseMatrix<double>(t.coboundary(1).cast<double>());
  std::mt19937_64 rng(7);
  auto random = [&](int k) { return random_cochain(t, k, rng); };
  SECTION("graded commutativity") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd f = random(0), a = random(1), b = random(1);
      CHECK((table.apply(1, a, 1, b) + table.apply(1, b, 1, a)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((table.apply(0, f, 1, a) - table.apply(1, a, 0, f)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(table.apply(1, a, 1, a).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("Leibniz") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd f = random(0), g = random(0), a = random(1);
      const Eigen::VectorXd lhs0 = d0 * table.apply(0, f, 0, g);
      const Eigen::VectorXd rhs0 = table.apply(1, d0 * f, 0, g) + table.apply(0, f, 1, d0 * g);
      CHECK((lhs0 - rhs0).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::VectorXd lhs1 = d1 * table.apply(0, f, 1, a);
      const Eigen::VectorXd rhs1 = table.apply(1, d0 * f, 1, a) + table.apply(0, f, 2, d1 * a);
      CHECK((lhs1 - rhs1).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SECTION("left multiplication operator") {
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd a = random(1), b = random(1), w = random(2);
      const Eigen::SparseMatrix<double> l = table.left_cup_matrix(a);
      CHECK((l * b - table.apply(1, a, 1, b)).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::VectorXd lt = l.transpose() * w;
      CHECK((table.left_cup_adjoint(a, w) - lt).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("cup argument checks", "[cup]") {
  const auto t = build_flat_torus(2, 2);
  const CupTable table(t);
  CHECK_THROWS_AS(table.entries(2, 1), ValidationError);
  CHECK_THROWS_AS(table.apply(1, Eigen::VectorXd::Zero(3), 1, Eigen::VectorXd::Zero(t.size(1))), ValidationError);
  const auto other = build_flat_torus(2, 2);
  CHECK_THROWS_AS(cup(table, Cochain(other, 1), Cochain(other, 1)), ValidationError);
  const Cochain c = cup(Cochain::elementary(t, 0, 0), Cochain::elementary(t, 0, 0));
  CHECK(c.degree() == 0);
  CHECK(c.values()[0] == 1.0);
}

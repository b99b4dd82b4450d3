#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cochainflow/form_parser.hpp"
#include "cochainflow/whitney.hpp"
#include "oracles.hpp"

using namespace cochainflow;
using Catch::Approx;

namespace {

std::vector<Rational> random_rational(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  std::vector<Rational> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.emplace_back(num(rng), den(rng));
  return v;
}

SimplicialComplex reference_triangle() {
  MeshData d;
  d.dim = 2;
  d.ambient_dim = 2;
  d.periods = {0.0, 0.0};
  d.vertex_count = 3;
  d.coords = {0, 0, 1, 0, 0, 1};
  d.cells = {{0, 1, 2}};
  return SimplicialComplex(d);
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("local polynomial forms", "[whitney]") {
  SECTION("whitney basis integrates to one on its own face") {
    for (int n : {1, 2, 3}) {
      for (int k = 0; k <= n; ++k) {
        for (const auto& face : local_faces(n, k)) {
          const auto w = whitney_local<Rational>(n, face);
          CHECK(w.restrict_to(face).integrate_top() == Rational(1));
          for (const auto& other : local_faces(n, k)) {
            if (other != face) CHECK(w.restrict_to(other).integrate_top() == Rational(0));
          }
        }
      }
    }
  }
  SECTION("d of d vanishes") {
    const auto w = whitney_local<Rational>(3, std::vector<int>{0, 2});
    CHECK(w.d().d().canonical().is_zero());
    const auto mu = PolyForm<Rational>::variable(2, 1);
    CHECK((mu.d() - PolyForm<Rational>::differential(2, 1)).canonical().is_zero());
  }
  SECTION("integral of a monomial over the standard triangle") {
    // int mu1^2 mu2 dmu1 dmu2 over the standard triangle = 2! 1! / 5!
    const auto mu1 = PolyForm<Rational>::variable(2, 1);
    const auto mu2 = PolyForm<Rational>::variable(2, 2);
    const auto area = wedge(PolyForm<Rational>::differential(2, 1), PolyForm<Rational>::differential(2, 2));
    const auto f = wedge(wedge(mu1, mu1), wedge(mu2, area));
    CHECK(f.integrate_top() == Rational(1, 60));
  }
}

TEST_CASE("Whitney map structure", "[whitney]") {
  SECTION("vertex forms are barycentric coordinates") {
    const auto t = build_flat_torus(3, 2);
    const auto w = whitney_map(Cochain::elementary(t, 0, 4));
    for (std::size_t top = 0; top < t.size(2); ++top) {
      for (int slot = 0; slot < 3; ++slot) {
        std::vector<double> bary(3, 0.0);
        bary[static_cast<std::size_t>(slot)] = 1.0;
        const double expected = t.top_face(0, top, static_cast<std::size_t>(slot)) == 4 ? 1.0 : 0.0;
        CHECK(evaluate(w, top, bary)[0] == Approx(expected).margin(1e-15));
      }
    }
  }
  SECTION("RW is the identity in exact arithmetic") {
    std::mt19937_64 rng(3);
    for (const auto& c : {build_flat_torus(3, 2), build_flat_torus(2, 3), build_icosahedron()}) {
      for (int k = 0; k <= c.dim(); ++k) {
        const auto values = random_rational(c.size(k), rng);
        CHECK(de_rham_values(whitney_map_exact(c, k, values)) == values);
      }
    }
  }
  SECTION("W is a chain map") {
    std::mt19937_64 rng(5);
    for (const auto& c : {build_flat_torus(3, 2), build_flat_torus(2, 3)}) {
      for (int k = 0; k < c.dim(); ++k) {
        const auto values = random_rational(c.size(k), rng);
        const Eigen::SparseMatrix<int> d = c.coboundary(k);
        std::vector<Rational> dv(c.size(k + 1), Rational(0));
        for (int o = 0; o < d.outerSize(); ++o) {
          for (Eigen::SparseMatrix<int>::InnerIterator it(d, o); it; ++it) {
            dv[static_cast<std::size_t>(it.row())] += Rational(it.value()) * values[static_cast<std::size_t>(it.col())];
          }
        }
        CHECK(whitney_map_exact(c, k + 1, dv).equivalent(whitney_map_exact(c, k, values).d()));
      }
    }
  }
  SECTION("floating-point round trip") {
    std::mt19937_64 rng(11);
    const auto t = build_flat_torus(4, 2);
    for (int k = 0; k <= 2; ++k) {
      const Cochain c(t, k, oracle::uniform_vector(rng, static_cast<Eigen::Index>(t.size(k))));
      CHECK(max_abs(de_rham(whitney_map(c)).values() - c.values()) < 1e-13);
    }
  }
  SECTION("errors") {
    MeshData d;
    d.dim = 1;
    d.vertex_count = 2;
    d.cells = {{0, 1}};
    const SimplicialComplex abstract(d);
    CHECK_THROWS_AS(whitney_map(Cochain(abstract, 0)), ValidationError);
    const auto t = build_flat_torus(2, 2);
    const std::vector<Rational> wrong(3, Rational(0));
    CHECK_THROWS_AS(whitney_map_exact(t, 1, wrong), ValidationError);
  }
}

TEST_CASE("Whitney mass matrices", "[whitney]") {
  SECTION("single triangle") {
    const auto tri = reference_triangle();
    const double area = 0.5;
    const Eigen::MatrixXd m0 = Eigen::MatrixXd(whitney_mass_matrix(tri, 0));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) CHECK(m0(i, j) == Approx(i == j ? area / 6 : area / 12));
    }
    const Eigen::MatrixXd m2 = Eigen::MatrixXd(whitney_mass_matrix(tri, 2));
    CHECK(m2(0, 0) == Approx(1.0 / area));
  }
  SECTION("agree with an independent quadrature oracle") {
    const auto t2 = build_flat_torus(4, 2);
    for (int k = 0; k <= 2; ++k) {
      const Eigen::MatrixXd m = Eigen::MatrixXd(whitney_mass_matrix(t2, k));
      CHECK(max_abs(m - oracle::mass_matrix(t2, k)) < 1e-12);
    }
    const auto t3 = build_flat_torus(2, 3);
    for (int k = 0; k <= 1; ++k) {
      const Eigen::MatrixXd m = Eigen::MatrixXd(whitney_mass_matrix(t3, k));
      CHECK(max_abs(m - oracle::mass_matrix(t3, k)) < 1e-12);
    }
  }
  SECTION("symmetric positive definite") {
    for (const auto& c : {build_flat_torus(4, 2), build_icosahedron(), build_flat_torus(2, 3)}) {
      for (int k = 0; k <= c.dim(); ++k) {
        const Eigen::MatrixXd m = Eigen::MatrixXd(whitney_mass_matrix(c, k));
        CHECK(max_abs(m - m.transpose()) <= 1e-14 * max_abs(m));
        CHECK(Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success);
      }
    }
  }
  SECTION("entries vanish unless the simplices share a top simplex") {
    const auto t = build_flat_torus(4, 2);
    const Eigen::SparseMatrix<double> m = whitney_mass_matrix(t, 1);
    std::vector<std::vector<bool>> near(t.size(1), std::vector<bool>(t.size(1), false));
    for (std::size_t top = 0; top < t.size(2); ++top) {
      for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) near[t.top_face(1, top, a)][t.top_face(1, top, b)] = true;
      }
    }
    for (int o = 0; o < m.outerSize(); ++o) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(m, o); it; ++it) {
        CHECK(near[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(it.col())]);
      }
    }
  }
  SECTION("l2 inner product of Whitney forms is the mass matrix") {
    std::mt19937_64 rng(1);
    const auto t = build_flat_torus(3, 2);
    const Eigen::SparseMatrix<double> m = whitney_mass_matrix(t, 1);
    const Cochain a(t, 1, oracle::uniform_vector(rng, static_cast<Eigen::Index>(t.size(1))));
    const Cochain b(t, 1, oracle::uniform_vector(rng, static_cast<Eigen::Index>(t.size(1))));
    const double expected = a.values().dot(m * b.values());
    CHECK(l2_inner(whitney_map(a), whitney_map(b)) == Approx(expected).epsilon(1e-12));
    CHECK(l2_distance(whitney_map(a), whitney_map(a)) == 0.0);
  }
}

TEST_CASE("de Rham map of smooth forms", "[whitney]") {
  const auto t = build_flat_torus(4, 2);
  SECTION("dx integrates to the x-extent of each edge") {
    const Cochain r = de_rham(AnalyticForm::differential(2, 0), t);
    for (std::size_t e = 0; e < t.size(1); ++e) {
      const Eigen::MatrixXd p = t.points(1, e);
      CHECK(r.values()[static_cast<Eigen::Index>(e)] == Approx(p(0, 1) - p(0, 0)).margin(1e-14));
    }
  }
  SECTION("point values for 0-forms") {
    const AnalyticForm f = parse_form("sin(2pi x)*cos(2pi y)");
    const Cochain r = de_rham(f, t);
    for (std::size_t v = 0; v < t.size(0); ++v) {
      const Eigen::VectorXd x = t.vertex_coords(v);
      const double expected = std::sin(2 * M_PI * x[0]) * std::cos(2 * M_PI * x[1]);
      CHECK(r.values()[static_cast<Eigen::Index>(v)] == Approx(expected).margin(1e-14));
    }
  }
  SECTION("Stokes: R d = delta R") {
    const AnalyticForm f = parse_form("sin(2pi x)*cos(2pi y) + cos(2pi(x+y))");
    const AnalyticForm w = parse_form("cos(2pi x)*sin(2pi y) dx + sin(4pi x) dy");
    const Cochain lhs0 = de_rham(f.d(), t);
    const Cochain rhs0 = coboundary(de_rham(f, t));
    CHECK(max_abs(lhs0.values() - rhs0.values()) < 1e-9);
    const Cochain lhs1 = de_rham(w.d(), t);
    const Cochain rhs1 = coboundary(de_rham(w, t));
    CHECK(max_abs(lhs1.values() - rhs1.values()) < 1e-9);
  }
  SECTION("constant forms are reproduced exactly") {
    const AnalyticForm dx = AnalyticForm::differential(2, 0);
    const AnalyticForm dy = AnalyticForm::differential(2, 1);
    CHECK(l2_distance(whitney_map(de_rham(dx, t)), dx) < 1e-12);
    CHECK(l2_distance(whitney_map(de_rham(dx + dy, t)), dx + dy) < 1e-12);
  }
  SECTION("approximation error shrinks with the mesh") {
    const AnalyticForm w = parse_form("sin(2pi x) dy");
    const auto t8 = build_flat_torus(8, 2);
    const double e4 = l2_distance(whitney_map(de_rham(w, t)), w);
    const double e8 = l2_distance(whitney_map(de_rham(w, t8)), w);
    CHECK(e8 < 0.6 * e4);
  }
  SECTION("unconverged quadrature is reported") {
    QuadratureOptions opts;
    opts.degree = 2;
    opts.max_degree = 4;
    opts.tolerance = 1e-15;
    CHECK_THROWS_AS(de_rham(parse_form("sin(14pi x)*cos(14pi y) dx"), build_flat_torus(2, 2), opts), NumericalError);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cochainflow/cochain.hpp"
#include "cochainflow/complex.hpp"
#include "cochainflow/mesh_io.hpp"
#include "oracles.hpp"

using namespace cochainflow;
using Catch::Approx;

namespace {

MeshData single_triangle() {
  MeshData d;
  d.dim = 2;
  d.ambient_dim = 2;
  d.periods = {0.0, 0.0};
  d.vertex_count = 3;
  d.coords = {0, 0, 1, 0, 0, 1};
  d.cells = {{0, 1, 2}};
  return d;
}

}  // namespace

TEST_CASE("flat torus counts", "[complex]") {
  SECTION("2D") {
    for (int n : {2, 3, 4, 8}) {
      const auto t = build_flat_torus(n, 2);
      CHECK(t.size(0) == static_cast<std::size_t>(n * n));
      CHECK(t.size(1) == static_cast<std::size_t>(3 * n * n));
      CHECK(t.size(2) == static_cast<std::size_t>(2 * n * n));
      CHECK(t.euler_characteristic() == 0);
      CHECK(t.is_closed());
      CHECK(t.component_count() == 1);
      CHECK(t.periodic());
    }
  }
  SECTION("3D") {
    for (int n : {2, 3}) {
      const auto t = build_flat_torus(n, 3);
      const std::size_t c = static_cast<std::size_t>(n * n * n);
      CHECK(t.size(0) == c);
      CHECK(t.size(1) == 7 * c);
      CHECK(t.size(2) == 12 * c);
      CHECK(t.size(3) == 6 * c);
      CHECK(t.euler_characteristic() == 0);
      CHECK(t.is_closed());
    }
  }
  SECTION("resolution 2 keeps windings apart") {
    // two edges share vertex ids but wrap differently around the torus
    const auto t = build_flat_torus(2, 2);
    std::size_t same_ids = 0;
    for (std::size_t i = 0; i < t.size(1); ++i) {
      for (std::size_t j = i + 1; j < t.size(1); ++j) {
        if (t.simplex(1, i).vertices == t.simplex(1, j).vertices) ++same_ids;
      }
    }
    CHECK(same_ids > 0);
    for (std::size_t i = 0; i < t.size(1); ++i) CHECK(t.find(t.simplex(1, i)) == i);
  }
}

TEST_CASE("icosahedron", "[complex]") {
  const auto s = build_icosahedron();
  CHECK(s.size(0) == 12);
  CHECK(s.size(1) == 30);
  CHECK(s.size(2) == 20);
  CHECK(s.euler_characteristic() == 2);
  CHECK(s.is_closed());
  CHECK_FALSE(s.periodic());
  for (std::size_t v = 0; v < s.size(0); ++v) CHECK(s.vertex_coords(v).norm() == Approx(1.0));
}

TEST_CASE("coboundary squares to zero", "[complex]") {
  SECTION("tori") {
    CHECK(oracle::max_dd(build_flat_torus(4, 2), 0) == 0);
    CHECK(oracle::max_dd(build_flat_torus(2, 2), 0) == 0);
    const auto t3 = build_flat_torus(2, 3);
    CHECK(oracle::max_dd(t3, 0) == 0);
    CHECK(oracle::max_dd(t3, 1) == 0);
  }
  SECTION("sphere and random complexes") {
    CHECK(oracle::max_dd(build_icosahedron(), 0) == 0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto r = oracle::random_3_complex(seed);
      CHECK(oracle::max_dd(r, 0) == 0);
      CHECK(oracle::max_dd(r, 1) == 0);
    }
  }
  SECTION("coboundary of a cochain") {
    const auto t = build_flat_torus(3, 2);
    Cochain f(t, 0);
    for (Eigen::Index i = 0; i < f.values().size(); ++i) f.values()[i] = static_cast<double>(i * i);
    const Cochain df = coboundary(f);
    CHECK(df.degree() == 1);
    CHECK(coboundary(df).values().cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("edge orientation", "[complex]") {
  const SimplicialComplex tri(single_triangle());
  const Eigen::SparseMatrix<int> d0 = tri.coboundary(0);
  // (delta f)[v0 v1] = f(v1) - f(v0)
  const auto e = tri.find(Simplex{{0, 1}, {}});
  REQUIRE(e.has_value());
  CHECK(d0.coeff(static_cast<int>(*e), 0) == -1);
  CHECK(d0.coeff(static_cast<int>(*e), 1) == 1);
  const auto facets = tri.facets(2, 0);
  REQUIRE(facets.size() == 3);
  // dropping position i carries (-1)^i
  CHECK(facets[0].sign == 1);
  CHECK(facets[1].sign == -1);
  CHECK(facets[2].sign == 1);
  CHECK_FALSE(tri.is_closed());
  CHECK_THROWS_AS(tri.require_closed(), ComplexError);
}

TEST_CASE("subdivision", "[complex]") {
  const auto t = subdivide(build_flat_torus(2, 2));
  CHECK(t.size(0) == 16);
  CHECK(t.size(1) == 48);
  CHECK(t.size(2) == 32);
  CHECK(oracle::max_dd(t, 0) == 0);
  const auto s = subdivide(build_icosahedron());
  CHECK(s.size(0) == 42);
  CHECK(s.size(2) == 80);
  CHECK(s.euler_characteristic() == 2);
  const auto t3 = subdivide(build_flat_torus(2, 3));
  CHECK(t3.size(3) == 8 * 48);
  CHECK(t3.euler_characteristic() == 0);
  CHECK(oracle::max_dd(t3, 1) == 0);
}

TEST_CASE("mesh quality", "[complex]") {
  const auto q = mesh_quality(build_flat_torus(4, 2));
  CHECK(q.eta == Approx(std::sqrt(2.0) / 4.0));
  CHECK(q.fullness == Approx(0.25));
  CHECK(min_edge_length(build_flat_torus(4, 2)) == Approx(0.25));
  // midpoint subdivision halves eta and keeps fullness for the diagonal split
  const auto q2 = mesh_quality(subdivide(build_flat_torus(4, 2)));
  CHECK(q2.eta == Approx(q.eta / 2));
  CHECK(q2.fullness == Approx(q.fullness));
}

TEST_CASE("complex validation", "[complex]") {
  SECTION("unknown vertex") {
    MeshData d = single_triangle();
    d.cells = {{0, 1, 7}};
    CHECK_THROWS_AS(SimplicialComplex(d), ComplexError);
  }
  SECTION("repeated vertex") {
    MeshData d = single_triangle();
    d.cells = {{0, 1, 1}};
    CHECK_THROWS_AS(SimplicialComplex(d), ComplexError);
  }
  SECTION("duplicate cell") {
    MeshData d = single_triangle();
    d.cells = {{0, 1, 2}, {2, 1, 0}};
    CHECK_THROWS_AS(SimplicialComplex(d), ComplexError);
  }
  SECTION("bad torus arguments") {
    CHECK_THROWS_AS(build_flat_torus(1, 2), ComplexError);
    CHECK_THROWS_AS(build_flat_torus(4, 4), ComplexError);
  }
  SECTION("degree out of range") {
    const SimplicialComplex tri(single_triangle());
    CHECK_THROWS_AS(tri.size(3), ValidationError);
    CHECK_THROWS_AS(Cochain(tri, 1, Eigen::VectorXd::Zero(2)), ValidationError);
  }
}

TEST_CASE("mesh file round trip", "[complex]") {
  for (const auto& original : {build_flat_torus(2, 2), build_flat_torus(3, 2), build_icosahedron(),
                               build_flat_torus(2, 3)}) {
    std::stringstream ss;
    write_mesh(ss, original.to_mesh_data());
    const SimplicialComplex copy(read_mesh(ss));
    REQUIRE(copy.dim() == original.dim());
    for (int k = 0; k <= original.dim(); ++k) {
      REQUIRE(copy.size(k) == original.size(k));
      for (std::size_t i = 0; i < original.size(k); ++i) CHECK(copy.simplex(k, i) == original.simplex(k, i));
    }
    for (std::size_t v = 0; v < original.size(0); ++v) {
      CHECK((copy.vertex_coords(v) - original.vertex_coords(v)).norm() == 0.0);
    }
  }
  SECTION("malformed input") {
    std::stringstream bad("cochainmesh 1\ndim 2 embed 2 periodic 0 0\nvertices 2\n0 0 0\n");
    CHECK_THROWS_AS(read_mesh(bad), ComplexError);
    std::stringstream wrong("not a mesh\n");
    CHECK_THROWS_AS(read_mesh(wrong), ComplexError);
  }
}

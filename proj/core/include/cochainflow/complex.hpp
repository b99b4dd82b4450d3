#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "cochainflow/errors.hpp"

namespace cochainflow {

class ComplexError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A k-simplex in canonical form.
///
/// Vertex ids are strictly increasing; the orientation of the simplex is the
/// one given by that order. On periodic complexes every vertex also carries
/// an integer lattice shift relative to the first vertex, so that two
/// simplices with the same vertex ids but different windings around the
/// torus stay distinct. `shifts` has (k+1)*d entries (first d are zero) on
/// periodic complexes and is empty otherwise.
struct Simplex {
  std::vector<int> vertices;
  std::vector<int> shifts;

  int degree() const { return static_cast<int>(vertices.size()) - 1; }
  auto operator<=>(const Simplex&) const = default;
  bool operator==(const Simplex&) const = default;
};

struct Facet {
  int index;
  int sign;
};

struct MeshQuality {
  double eta = 0.0;       // max simplex diameter
  double fullness = 0.0;  // min over top simplices of vol / eta^n
  std::vector<std::size_t> counts;
};

/// Raw description of a complex as read from / written to a mesh file:
/// vertex coordinates plus the top-dimensional cells. Lower faces are never
/// listed; they are generated on construction.
struct MeshData {
  int dim = 0;
  int ambient_dim = 0;            // 0 for purely combinatorial complexes
  std::vector<double> periods;    // one per ambient axis, 0 = non-periodic
  int vertex_count = 0;
  std::vector<double> coords;     // vertex_count * ambient_dim, row-major
  std::vector<std::vector<int>> cells;
  // Optional per-cell lattice shifts, (dim+1)*ambient_dim integers each.
  // When a cell has none, the shortest periodic representative relative to
  // its first listed vertex is used.
  std::vector<std::vector<int>> cell_shifts;
};

/// Number of k-element subsets of an (n+1)-vertex simplex, i.e. C(n+1, k+1).
std::size_t local_face_count(int n, int k);

/// Position subsets (sorted) of the k-faces of an n-simplex, in
/// lexicographic order. Slot s of `SimplicialComplex::top_face` refers to
/// entry s of this list.
const std::vector<std::vector<int>>& local_faces(int n, int k);

/// Oriented simplicial complex (or periodic Delta-complex on the torus) with
/// optional embedded geometry. Immutable after construction.
class SimplicialComplex {
 public:
  explicit SimplicialComplex(const MeshData& data);

  int dim() const { return dim_; }
  int ambient_dim() const { return ambient_dim_; }
  bool embedded() const { return ambient_dim_ > 0; }
  bool periodic() const;
  std::span<const double> periods() const { return periods_; }

  std::size_t size(int k) const;
  const Simplex& simplex(int k, std::size_t i) const;
  std::optional<std::size_t> find(const Simplex& s) const;

  /// Facets of a k-simplex (k >= 1), position i dropped, sign (-1)^i.
  std::span<const Facet> facets(int k, std::size_t i) const;

  /// Global index of the k-face of top simplex `top` at local slot `slot`.
  std::size_t top_face(int k, std::size_t top, std::size_t slot) const;

  /// One top simplex containing the given k-simplex, with the slot of the
  /// k-simplex inside it.
  std::pair<std::size_t, std::size_t> first_coface(int k, std::size_t i) const;

  /// Index of the face of the m-simplex `i` spanned by the given sorted
  /// vertex positions.
  std::size_t face_index(int m, std::size_t i, std::span<const int> positions) const;

  /// Lifted vertex coordinates (ambient_dim x (k+1)), consistent with the
  /// periodic shifts of the simplex.
  Eigen::MatrixXd points(int k, std::size_t i) const;

  /// Vertex coordinates as stored (fundamental domain on the torus).
  Eigen::VectorXd vertex_coords(std::size_t v) const;

  /// delta_k : C^k -> C^{k+1} with exact integer entries.
  Eigen::SparseMatrix<int> coboundary(int k) const;

  /// Number of n-cofaces of each (n-1)-simplex.
  std::vector<int> top_coface_counts() const;
  bool is_closed() const;
  /// Throws ComplexError naming the first (n-1)-simplex without exactly two
  /// cofaces.
  void require_closed() const;

  /// Connected component label for every vertex (1-skeleton).
  std::vector<int> vertex_components() const;
  int component_count() const;

  long euler_characteristic() const;

  MeshData to_mesh_data() const;

 private:
  Simplex canonical(std::span<const int> ids, std::span<const int> shifts) const;
  Simplex sub_simplex(const Simplex& s, std::span<const int> positions) const;
  void build_from_cells(const std::vector<Simplex>& cells);
  void check_degree(int k) const;

  int dim_ = 0;
  int ambient_dim_ = 0;
  std::vector<double> periods_;
  int vertex_count_ = 0;
  std::vector<double> coords_;

  std::vector<std::vector<Simplex>> simplices_;
  std::vector<std::map<Simplex, std::size_t>> index_;
  std::vector<std::vector<Facet>> facets_;
  std::vector<std::vector<std::size_t>> top_faces_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> first_coface_;
};

/// Triangulated flat unit torus: n^dim grid cells, squares split along the
/// (1,1) diagonal in 2D, cubes split into 6 Kuhn tetrahedra in 3D.
SimplicialComplex build_flat_torus(int resolution, int dim);

/// Boundary of the regular icosahedron inscribed in the unit sphere.
SimplicialComplex build_icosahedron();

/// Edgewise (midpoint) subdivision; triangles go to 4 similar children,
/// tetrahedra to 8, edges to 2.
SimplicialComplex subdivide(const SimplicialComplex& complex);

MeshQuality mesh_quality(const SimplicialComplex& complex);

double min_edge_length(const SimplicialComplex& complex);

/// Volume of the embedded k-simplex with the given lifted points.
double simplex_volume(const Eigen::MatrixXd& points);

}  // namespace cochainflow

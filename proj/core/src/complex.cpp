#include "cochainflow/complex.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

namespace cochainflow {

namespace {

std::string describe(const Simplex& s) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    out << (i ? "," : "") << s.vertices[i];
  }
  out << ']';
  if (std::any_of(s.shifts.begin(), s.shifts.end(), [](int v) { return v != 0; })) {
    out << " shifts(";
    for (std::size_t i = 0; i < s.shifts.size(); ++i) {
      out << (i ? "," : "") << s.shifts[i];
    }
    out << ')';
  }
  return out.str();
}

void combinations(int n, int r, int start, std::vector<int>& current,
                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == r) {
    out.push_back(current);
    return;
  }
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    combinations(n, r, i + 1, current, out);
    current.pop_back();
  }
}

long factorial(int n) {
  long f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::size_t local_face_count(int n, int k) {
  return local_faces(n, k).size();
}

const std::vector<std::vector<int>>& local_faces(int n, int k) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<std::vector<int>>> cache;
  if (n < 0 || k < 0 || k > n) {
    throw ValidationError("local_faces: degree " + std::to_string(k) +
                          " out of range for dimension " + std::to_string(n));
  }
  std::lock_guard lock(mutex);
  auto [it, inserted] = cache.try_emplace({n, k});
  if (inserted) {
    std::vector<int> current;
    combinations(n + 1, k + 1, 0, current, it->second);
  }
  return it->second;
}

SimplicialComplex::SimplicialComplex(const MeshData& data)
    : dim_(data.dim),
      ambient_dim_(data.ambient_dim),
      periods_(data.periods),
      vertex_count_(data.vertex_count),
      coords_(data.coords) {
  if (dim_ < 0) throw ComplexError("negative complex dimension");
  if (ambient_dim_ < 0) throw ComplexError("negative embedding dimension");
  if (periods_.empty()) periods_.assign(ambient_dim_, 0.0);
  if (static_cast<int>(periods_.size()) != ambient_dim_) {
    throw ComplexError("expected " + std::to_string(ambient_dim_) + " periods, got " +
                       std::to_string(periods_.size()));
  }
  for (double p : periods_) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ComplexError("periods must be finite and >= 0");
  }
  if (coords_.size() != static_cast<std::size_t>(vertex_count_) * ambient_dim_) {
    throw ComplexError("coordinate array does not match vertex count");
  }
  if (ambient_dim_ > 0 && ambient_dim_ < dim_) {
    throw ComplexError("embedding dimension smaller than complex dimension");
  }
  if (!data.cell_shifts.empty() && data.cell_shifts.size() != data.cells.size()) {
    throw ComplexError("cell shift list does not match cell list");
  }

  std::vector<Simplex> cells;
  cells.reserve(data.cells.size());
  const int d = ambient_dim_;
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    const auto& ids = data.cells[c];
    if (static_cast<int>(ids.size()) != dim_ + 1) {
      throw ComplexError("cell " + std::to_string(c) + " has " + std::to_string(ids.size()) +
                         " vertices, expected " + std::to_string(dim_ + 1));
    }
    for (int v : ids) {
      if (v < 0 || v >= vertex_count_) {
        throw ComplexError("cell " + std::to_string(c) + " references unknown vertex " +
                           std::to_string(v));
      }
    }
    std::vector<int> shifts;
    if (periodic()) {
      if (!data.cell_shifts.empty() && !data.cell_shifts[c].empty()) {
        shifts = data.cell_shifts[c];
        if (shifts.size() != ids.size() * d) {
          throw ComplexError("cell " + std::to_string(c) + " has malformed periodic shifts");
        }
      } else {
        // Shortest periodic representative relative to the first vertex.
        shifts.assign(ids.size() * d, 0);
        for (std::size_t i = 1; i < ids.size(); ++i) {
          for (int a = 0; a < d; ++a) {
            if (periods_[a] == 0.0) continue;
            double diff = coords_[ids[i] * d + a] - coords_[ids[0] * d + a];
            shifts[i * d + a] = -static_cast<int>(std::lround(diff / periods_[a]));
          }
        }
      }
    }
    cells.push_back(canonical(ids, shifts));
  }
  build_from_cells(cells);
}

bool SimplicialComplex::periodic() const {
  return std::any_of(periods_.begin(), periods_.end(), [](double p) { return p > 0.0; });
}

Simplex SimplicialComplex::canonical(std::span<const int> ids, std::span<const int> shifts) const {
  const int d = periodic() ? ambient_dim_ : 0;
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  Simplex s;
  s.vertices.reserve(ids.size());
  for (std::size_t i : order) s.vertices.push_back(ids[i]);
  for (std::size_t i = 1; i < s.vertices.size(); ++i) {
    if (s.vertices[i] == s.vertices[i - 1]) {
      throw ComplexError("degenerate simplex: vertex " + std::to_string(s.vertices[i]) +
                         " repeated");
    }
  }
  if (d > 0) {
    s.shifts.resize(ids.size() * d);
    const std::size_t first = order[0];
    for (std::size_t r = 0; r < order.size(); ++r) {
      for (int a = 0; a < d; ++a) {
        s.shifts[r * d + a] = shifts[order[r] * d + a] - shifts[first * d + a];
      }
    }
  }
  return s;
}

Simplex SimplicialComplex::sub_simplex(const Simplex& s, std::span<const int> positions) const {
  const int d = s.shifts.empty() ? 0 : ambient_dim_;
  Simplex face;
  face.vertices.reserve(positions.size());
  for (int p : positions) face.vertices.push_back(s.vertices[p]);
  if (d > 0) {
    face.shifts.resize(positions.size() * d);
    for (std::size_t r = 0; r < positions.size(); ++r) {
      for (int a = 0; a < d; ++a) {
        face.shifts[r * d + a] = s.shifts[positions[r] * d + a] - s.shifts[positions[0] * d + a];
      }
    }
  }
  return face;
}

void SimplicialComplex::build_from_cells(const std::vector<Simplex>& cells) {
  const int n = dim_;
  simplices_.assign(n + 1, {});
  index_.assign(n + 1, {});

  std::vector<std::set<Simplex>> faces(n + 1);
  for (const auto& cell : cells) {
    if (!faces[n].insert(cell).second) {
      throw ComplexError("duplicate simplex " + describe(cell));
    }
  }
  for (int k = 0; k < n; ++k) {
    for (const auto& cell : faces[n]) {
      for (const auto& positions : local_faces(n, k)) {
        faces[k].insert(sub_simplex(cell, positions));
      }
    }
  }
  // Every vertex is a 0-simplex, so 0-simplex index == vertex id.
  const int d0 = periodic() ? ambient_dim_ : 0;
  for (int v = 0; v < vertex_count_; ++v) {
    faces[0].insert(Simplex{{v}, std::vector<int>(d0, 0)});
  }

  for (int k = 0; k <= n; ++k) {
    simplices_[k].assign(faces[k].begin(), faces[k].end());
    for (std::size_t i = 0; i < simplices_[k].size(); ++i) {
      index_[k].emplace(simplices_[k][i], i);
    }
  }

  facets_.assign(n + 1, {});
  for (int k = 1; k <= n; ++k) {
    auto& out = facets_[k];
    out.reserve(simplices_[k].size() * (k + 1));
    std::vector<int> positions(k);
    for (const auto& s : simplices_[k]) {
      for (int drop = 0; drop <= k; ++drop) {
        for (int p = 0, r = 0; p <= k; ++p) {
          if (p != drop) positions[r++] = p;
        }
        out.push_back(Facet{static_cast<int>(index_[k - 1].at(sub_simplex(s, positions))),
                            (drop % 2 == 0) ? 1 : -1});
      }
    }
  }

  top_faces_.assign(n + 1, {});
  first_coface_.assign(n + 1, {});
  const std::size_t tops = simplices_[n].size();
  for (int k = 0; k <= n; ++k) {
    const auto& slots = local_faces(n, k);
    auto& table = top_faces_[k];
    table.resize(tops * slots.size());
    first_coface_[k].assign(simplices_[k].size(), {tops, 0});
    for (std::size_t t = 0; t < tops; ++t) {
      for (std::size_t s = 0; s < slots.size(); ++s) {
        const std::size_t face = index_[k].at(sub_simplex(simplices_[n][t], slots[s]));
        table[t * slots.size() + s] = face;
        if (first_coface_[k][face].first == tops) first_coface_[k][face] = {t, s};
      }
    }
  }
}

void SimplicialComplex::check_degree(int k) const {
  if (k < 0 || k > dim_) {
    throw ValidationError("degree " + std::to_string(k) + " out of range [0, " +
                          std::to_string(dim_) + "]");
  }
}

std::size_t SimplicialComplex::size(int k) const {
  check_degree(k);
  return simplices_[k].size();
}

const Simplex& SimplicialComplex::simplex(int k, std::size_t i) const {
  check_degree(k);
  return simplices_[k].at(i);
}

std::optional<std::size_t> SimplicialComplex::find(const Simplex& s) const {
  const int k = s.degree();
  if (k < 0 || k > dim_) return std::nullopt;
  auto it = index_[k].find(s);
  if (it == index_[k].end()) return std::nullopt;
  return it->second;
}

std::span<const Facet> SimplicialComplex::facets(int k, std::size_t i) const {
  check_degree(k);
  if (k == 0) throw ValidationError("vertices have no facets");
  return std::span<const Facet>(facets_[k]).subspan(i * (k + 1), k + 1);
}

std::size_t SimplicialComplex::top_face(int k, std::size_t top, std::size_t slot) const {
  return top_faces_[k][top * local_face_count(dim_, k) + slot];
}

std::pair<std::size_t, std::size_t> SimplicialComplex::first_coface(int k, std::size_t i) const {
  check_degree(k);
  auto result = first_coface_[k].at(i);
  if (result.first == simplices_[dim_].size()) {
    throw ComplexError("simplex " + describe(simplices_[k][i]) + " has no top-dimensional coface");
  }
  return result;
}

std::size_t SimplicialComplex::face_index(int m, std::size_t i, std::span<const int> positions) const {
  check_degree(m);
  const int k = static_cast<int>(positions.size()) - 1;
  check_degree(k);
  return index_[k].at(sub_simplex(simplices_[m].at(i), positions));
}

Eigen::VectorXd SimplicialComplex::vertex_coords(std::size_t v) const {
  return Eigen::Map<const Eigen::VectorXd>(coords_.data() + v * ambient_dim_, ambient_dim_);
}

Eigen::MatrixXd SimplicialComplex::points(int k, std::size_t i) const {
  if (!embedded()) throw ComplexError("complex has no embedded geometry");
  const Simplex& s = simplex(k, i);
  const int d = ambient_dim_;
  Eigen::MatrixXd p(d, k + 1);
  for (int r = 0; r <= k; ++r) {
    for (int a = 0; a < d; ++a) {
      double x = coords_[s.vertices[r] * d + a];
      if (!s.shifts.empty()) x += s.shifts[r * d + a] * periods_[a];
      p(a, r) = x;
    }
  }
  return p;
}

Eigen::SparseMatrix<int> SimplicialComplex::coboundary(int k) const {
  if (k < 0 || k >= dim_) {
    throw ValidationError("coboundary degree " + std::to_string(k) + " out of range [0, " +
                          std::to_string(dim_ - 1) + "]");
  }
  std::vector<Eigen::Triplet<int>> triplets;
  triplets.reserve(simplices_[k + 1].size() * (k + 2));
  for (std::size_t t = 0; t < simplices_[k + 1].size(); ++t) {
    for (const Facet& f : facets(k + 1, t)) {
      triplets.emplace_back(static_cast<int>(t), f.index, f.sign);
    }
  }
  Eigen::SparseMatrix<int> delta(static_cast<Eigen::Index>(simplices_[k + 1].size()),
                                 static_cast<Eigen::Index>(simplices_[k].size()));
  delta.setFromTriplets(triplets.begin(), triplets.end());
  return delta;
}

std::vector<int> SimplicialComplex::top_coface_counts() const {
  if (dim_ == 0) return {};
  std::vector<int> counts(simplices_[dim_ - 1].size(), 0);
  for (std::size_t t = 0; t < simplices_[dim_].size(); ++t) {
    for (const Facet& f : facets(dim_, t)) ++counts[f.index];
  }
  return counts;
}

bool SimplicialComplex::is_closed() const {
  auto counts = top_coface_counts();
  return std::all_of(counts.begin(), counts.end(), [](int c) { return c == 2; });
}

void SimplicialComplex::require_closed() const {
  auto counts = top_coface_counts();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 2) {
      throw ComplexError("complex is not closed: " + std::to_string(dim_ - 1) + "-simplex " +
                         describe(simplices_[dim_ - 1][i]) + " has " + std::to_string(counts[i]) +
                         " cofaces");
    }
  }
}

std::vector<int> SimplicialComplex::vertex_components() const {
  std::vector<int> parent(vertex_count_);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  if (dim_ >= 1) {
    for (const auto& e : simplices_[1]) {
      int a = root(e.vertices[0]), b = root(e.vertices[1]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> label(vertex_count_, -1);
  std::map<int, int> ids;
  for (int v = 0; v < vertex_count_; ++v) {
    label[v] = ids.try_emplace(root(v), static_cast<int>(ids.size())).first->second;
  }
  return label;
}

int SimplicialComplex::component_count() const {
  auto labels = vertex_components();
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

long SimplicialComplex::euler_characteristic() const {
  long chi = 0;
  for (int k = 0; k <= dim_; ++k) {
    chi += (k % 2 == 0 ? 1 : -1) * static_cast<long>(simplices_[k].size());
  }
  return chi;
}

MeshData SimplicialComplex::to_mesh_data() const {
  MeshData data;
  data.dim = dim_;
  data.ambient_dim = ambient_dim_;
  data.periods = periods_;
  data.vertex_count = vertex_count_;
  data.coords = coords_;
  for (const auto& s : simplices_[dim_]) {
    data.cells.push_back(s.vertices);
    if (periodic()) data.cell_shifts.push_back(s.shifts);
  }
  return data;
}

double simplex_volume(const Eigen::MatrixXd& points) {
  const auto k = points.cols() - 1;
  if (k == 0) return 1.0;
  Eigen::MatrixXd edges = points.rightCols(k).colwise() - points.col(0);
  const double gram_det = (edges.transpose() * edges).determinant();
  return std::sqrt(std::max(gram_det, 0.0)) / static_cast<double>(factorial(static_cast<int>(k)));
}

MeshQuality mesh_quality(const SimplicialComplex& complex) {
  if (!complex.embedded()) throw ComplexError("mesh quality needs an embedded complex");
  const int n = complex.dim();
  MeshQuality q;
  for (int k = 0; k <= n; ++k) q.counts.push_back(complex.size(k));
  std::vector<double> volumes(complex.size(n));
  for (std::size_t t = 0; t < complex.size(n); ++t) {
    Eigen::MatrixXd p = complex.points(n, t);
    double diameter = 0.0;
    for (int i = 0; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) diameter = std::max(diameter, (p.col(i) - p.col(j)).norm());
    }
    volumes[t] = simplex_volume(p);
    if (!(volumes[t] > 1e-12 * std::pow(diameter, n))) {
      throw ComplexError("degenerate " + std::to_string(n) + "-simplex " + std::to_string(t) +
                         " (zero volume)");
    }
    q.eta = std::max(q.eta, diameter);
  }
  q.fullness = volumes.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (double v : volumes) q.fullness = std::min(q.fullness, v / std::pow(q.eta, n));
  return q;
}

double min_edge_length(const SimplicialComplex& complex) {
  if (complex.dim() < 1) throw ComplexError("complex has no edges");
  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < complex.size(1); ++e) {
    Eigen::MatrixXd p = complex.points(1, e);
    shortest = std::min(shortest, (p.col(1) - p.col(0)).norm());
  }
  return shortest;
}

SimplicialComplex build_flat_torus(int resolution, int dim) {
  if (resolution < 2) throw ComplexError("torus resolution must be >= 2");
  if (dim != 2 && dim != 3) throw ComplexError("torus dimension must be 2 or 3");
  const int n = resolution;
  MeshData data;
  data.dim = dim;
  data.ambient_dim = dim;
  data.periods.assign(dim, 1.0);
  data.vertex_count = dim == 2 ? n * n : n * n * n;
  data.coords.resize(static_cast<std::size_t>(data.vertex_count) * dim);

  auto vertex_id = [&](const std::array<int, 3>& g) {
    int id = 0, stride = 1;
    for (int a = 0; a < dim; ++a) {
      id += (((g[a] % n) + n) % n) * stride;
      stride *= n;
    }
    return id;
  };
  for (int v = 0; v < data.vertex_count; ++v) {
    int rest = v;
    for (int a = 0; a < dim; ++a) {
      data.coords[v * dim + a] = static_cast<double>(rest % n) / n;
      rest /= n;
    }
  }

  // Each cell is a monotone lattice path from the cell origin: the 2D split
  // uses the (1,1) diagonal, the 3D split is Kuhn's 6-tetrahedron scheme.
  std::vector<std::vector<int>> axis_orders;
  std::vector<int> axes(dim);
  std::iota(axes.begin(), axes.end(), 0);
  do {
    axis_orders.push_back(axes);
  } while (std::next_permutation(axes.begin(), axes.end()));

  const int cells_per_axis = n;
  const int cube_count = dim == 2 ? n * n : n * n * n;
  for (int c = 0; c < cube_count; ++c) {
    std::array<int, 3> origin{0, 0, 0};
    int rest = c;
    for (int a = 0; a < dim; ++a) {
      origin[a] = rest % cells_per_axis;
      rest /= cells_per_axis;
    }
    for (const auto& order : axis_orders) {
      std::vector<int> ids, shifts;
      std::array<int, 3> g = origin;
      auto push = [&] {
        ids.push_back(vertex_id(g));
        for (int a = 0; a < dim; ++a) shifts.push_back(g[a] / n);
      };
      push();
      for (int a : order) {
        ++g[a];
        push();
      }
      data.cells.push_back(std::move(ids));
      data.cell_shifts.push_back(std::move(shifts));
    }
  }
  return SimplicialComplex(data);
}

SimplicialComplex build_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v;
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      v.emplace_back(0.0, s1, s2 * phi);
      v.emplace_back(s1, s2 * phi, 0.0);
      v.emplace_back(s2 * phi, 0.0, s1);
    }
  }
  for (auto& p : v) p.normalize();
  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) shortest = std::min(shortest, (v[i] - v[j]).norm());
  }
  auto adjacent = [&](std::size_t i, std::size_t j) {
    return std::abs((v[i] - v[j]).norm() - shortest) < 1e-9;
  };
  MeshData data;
  data.dim = 2;
  data.ambient_dim = 3;
  data.periods.assign(3, 0.0);
  data.vertex_count = static_cast<int>(v.size());
  for (const auto& p : v) data.coords.insert(data.coords.end(), {p.x(), p.y(), p.z()});
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      for (std::size_t k = j + 1; k < v.size(); ++k) {
        if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) {
          data.cells.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(k)});
        }
      }
    }
  }
  return SimplicialComplex(data);
}

SimplicialComplex subdivide(const SimplicialComplex& complex) {
  if (!complex.embedded()) throw ComplexError("subdivision needs an embedded complex");
  const int n = complex.dim();
  if (n < 1 || n > 3) {
    throw ComplexError("edgewise subdivision supports dimensions 1..3, got " + std::to_string(n));
  }
  const int d = complex.ambient_dim();
  const auto periods = complex.periods();
  const bool periodic = complex.periodic();
  const int old_vertices = static_cast<int>(complex.size(0));

  MeshData data;
  data.dim = n;
  data.ambient_dim = d;
  data.periods.assign(periods.begin(), periods.end());
  data.vertex_count = old_vertices + static_cast<int>(complex.size(1));
  data.coords.resize(static_cast<std::size_t>(data.vertex_count) * d);
  for (int v = 0; v < old_vertices; ++v) {
    Eigen::VectorXd x = complex.vertex_coords(v);
    for (int a = 0; a < d; ++a) data.coords[v * d + a] = x[a];
  }
  for (std::size_t e = 0; e < complex.size(1); ++e) {
    Eigen::MatrixXd p = complex.points(1, e);
    Eigen::VectorXd mid = 0.5 * (p.col(0) + p.col(1));
    for (int a = 0; a < d; ++a) {
      double x = mid[a];
      if (periods[a] > 0.0) x -= periods[a] * std::floor(x / periods[a]);
      data.coords[(old_vertices + e) * d + a] = x;
    }
  }

  // Local labels: 0..n are corners, n+1.. are edge midpoints in local_faces(n,1) order.
  const auto& edge_slots = local_faces(n, 1);
  auto mid = [&](int i, int j) {
    for (std::size_t s = 0; s < edge_slots.size(); ++s) {
      if (edge_slots[s][0] == std::min(i, j) && edge_slots[s][1] == std::max(i, j)) {
        return n + 1 + static_cast<int>(s);
      }
    }
    throw ComplexError("internal: missing edge slot");
  };
  std::vector<std::vector<int>> children;
  if (n == 1) {
    children = {{0, mid(0, 1)}, {mid(0, 1), 1}};
  } else if (n == 2) {
    children = {{0, mid(0, 1), mid(0, 2)},
                {mid(0, 1), 1, mid(1, 2)},
                {mid(0, 2), mid(1, 2), 2},
                {mid(0, 1), mid(1, 2), mid(0, 2)}};
  } else {
    const int m01 = mid(0, 1), m02 = mid(0, 2), m03 = mid(0, 3);
    const int m12 = mid(1, 2), m13 = mid(1, 3), m23 = mid(2, 3);
    children = {{0, m01, m02, m03}, {m01, 1, m12, m13}, {m02, m12, 2, m23}, {m03, m13, m23, 3},
                // inner octahedron split along the m02-m13 diagonal
                {m02, m13, m01, m12}, {m02, m13, m12, m23}, {m02, m13, m23, m03}, {m02, m13, m03, m01}};
  }

  for (std::size_t t = 0; t < complex.size(n); ++t) {
    const Simplex& s = complex.simplex(n, t);
    Eigen::MatrixXd corners = complex.points(n, t);
    std::vector<int> label_id(n + 1 + edge_slots.size());
    Eigen::MatrixXd lifted(d, label_id.size());
    for (int i = 0; i <= n; ++i) {
      label_id[i] = s.vertices[i];
      lifted.col(i) = corners.col(i);
    }
    for (std::size_t e = 0; e < edge_slots.size(); ++e) {
      label_id[n + 1 + e] = old_vertices + static_cast<int>(complex.top_face(1, t, e));
      lifted.col(n + 1 + e) = 0.5 * (corners.col(edge_slots[e][0]) + corners.col(edge_slots[e][1]));
    }
    for (const auto& child : children) {
      std::vector<int> ids, shifts;
      for (int label : child) {
        const int id = label_id[label];
        ids.push_back(id);
        if (periodic) {
          for (int a = 0; a < d; ++a) {
            const double offset = lifted(a, label) - data.coords[id * d + a];
            shifts.push_back(periods[a] > 0.0 ? static_cast<int>(std::lround(offset / periods[a])) : 0);
          }
        }
      }
      data.cells.push_back(std::move(ids));
      if (periodic) data.cell_shifts.push_back(std::move(shifts));
    }
  }
  return SimplicialComplex(data);
}

}  // namespace cochainflow

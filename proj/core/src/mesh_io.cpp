#include "cochainflow/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace cochainflow {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty, comment-stripped line split into tokens.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++number_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(t);
      if (!tokens.empty()) return tokens;
    }
    throw ComplexError(std::string("malformed mesh file: unexpected end of file, expected ") + what);
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ComplexError("malformed mesh file (line " + std::to_string(number_) + "): " + message);
  }

  template <class T>
  T parse(const std::string& token) const {
    std::istringstream ss(token);
    T value{};
    if (!(ss >> value) || !ss.eof()) fail("cannot parse '" + token + "'");
    return value;
  }

 private:
  std::istream& in_;
  int number_ = 0;
};

}  // namespace

MeshData read_mesh(std::istream& in) {
  LineReader reader(in);
  MeshData data;

  auto header = reader.next("header");
  if (header.size() != 2 || header[0] != "cochainmesh") reader.fail("missing 'cochainmesh' header");
  if (header[1] != "1") reader.fail("unsupported format version " + header[1]);

  auto shape = reader.next("dim line");
  if (shape.size() < 4 || shape[0] != "dim" || shape[2] != "embed") {
    reader.fail("expected 'dim <n> embed <d> periodic ...'");
  }
  data.dim = reader.parse<int>(shape[1]);
  data.ambient_dim = reader.parse<int>(shape[3]);
  if (data.dim < 0 || data.ambient_dim < 0) reader.fail("negative dimension");
  data.periods.assign(data.ambient_dim, 0.0);
  if (shape.size() > 4) {
    if (shape[4] != "periodic" || shape.size() != 5 + static_cast<std::size_t>(data.ambient_dim)) {
      reader.fail("expected 'periodic' followed by " + std::to_string(data.ambient_dim) + " periods");
    }
    for (int a = 0; a < data.ambient_dim; ++a) data.periods[a] = reader.parse<double>(shape[5 + a]);
  }

  auto vertex_header = reader.next("vertices line");
  if (vertex_header.size() != 2 || vertex_header[0] != "vertices") reader.fail("expected 'vertices <V>'");
  data.vertex_count = reader.parse<int>(vertex_header[1]);
  if (data.vertex_count < 0) reader.fail("negative vertex count");
  const int d = data.ambient_dim;
  data.coords.assign(static_cast<std::size_t>(data.vertex_count) * d, 0.0);
  std::vector<bool> seen(data.vertex_count, false);
  for (int i = 0; i < data.vertex_count; ++i) {
    auto row = reader.next("vertex line");
    if (row.size() != 1 + static_cast<std::size_t>(d)) {
      reader.fail("vertex line needs an id and " + std::to_string(d) + " coordinates");
    }
    const int id = reader.parse<int>(row[0]);
    if (id < 0 || id >= data.vertex_count) reader.fail("vertex id " + row[0] + " out of range");
    if (seen[id]) reader.fail("duplicate vertex id " + row[0]);
    seen[id] = true;
    for (int a = 0; a < d; ++a) data.coords[id * d + a] = reader.parse<double>(row[1 + a]);
  }

  auto cell_header = reader.next("cells line");
  if (cell_header.size() != 2 || cell_header[0] != "cells") reader.fail("expected 'cells <T>'");
  const int cell_count = reader.parse<int>(cell_header[1]);
  if (cell_count < 0) reader.fail("negative cell count");
  const std::size_t width = data.dim + 1;
  bool any_shifts = false;
  for (int c = 0; c < cell_count; ++c) {
    auto row = reader.next("cell line");
    std::vector<int> ids, shifts;
    if (row.size() == width) {
      // plain cell
    } else if (d > 0 && row.size() == width * (1 + d)) {
      any_shifts = true;
      for (std::size_t t = width; t < row.size(); ++t) shifts.push_back(reader.parse<int>(row[t]));
    } else {
      reader.fail("cell line needs " + std::to_string(width) + " vertex ids");
    }
    for (std::size_t t = 0; t < width; ++t) ids.push_back(reader.parse<int>(row[t]));
    data.cells.push_back(std::move(ids));
    data.cell_shifts.push_back(std::move(shifts));
  }
  if (!any_shifts) data.cell_shifts.clear();
  return data;
}

void write_mesh(std::ostream& out, const MeshData& data) {
  out << "cochainmesh 1\n";
  out << "dim " << data.dim << " embed " << data.ambient_dim;
  if (data.ambient_dim > 0) {
    out << " periodic";
    out << std::setprecision(17);
    for (double p : data.periods) out << ' ' << p;
  }
  out << '\n';
  out << "vertices " << data.vertex_count << '\n';
  out << std::setprecision(17);
  const int d = data.ambient_dim;
  for (int v = 0; v < data.vertex_count; ++v) {
    out << v;
    for (int a = 0; a < d; ++a) out << ' ' << data.coords[v * d + a];
    out << '\n';
  }
  out << "cells " << data.cells.size() << '\n';
  for (std::size_t c = 0; c < data.cells.size(); ++c) {
    for (std::size_t i = 0; i < data.cells[c].size(); ++i) out << (i ? " " : "") << data.cells[c][i];
    if (c < data.cell_shifts.size()) {
      for (int s : data.cell_shifts[c]) out << ' ' << s;
    }
    out << '\n';
  }
}

SimplicialComplex load_complex(const std::filesystem::path& path, bool require_closed) {
  std::ifstream in(path);
  if (!in) throw ComplexError("cannot open mesh file " + path.string());
  SimplicialComplex complex(read_mesh(in));
  if (require_closed) complex.require_closed();
  return complex;
}

void save_complex(const std::filesystem::path& path, const SimplicialComplex& complex) {
  std::ofstream out(path);
  if (!out) throw ComplexError("cannot write mesh file " + path.string());
  write_mesh(out, complex.to_mesh_data());
  if (!out) throw ComplexError("failed writing mesh file " + path.string());
}

}  // namespace cochainflow

#pragma once

#include <filesystem>
#include <iosfwd>

#include "cochainflow/complex.hpp"

namespace cochainflow {

/// Line-oriented text mesh format:
///
///   cochainmesh 1
///   dim <n> embed <d> periodic <p1> ... <pd>
///   vertices <V>
///   <id> <x1> ... <xd>          (V lines)
///   cells <T>
///   <v0> ... <vn> [shifts]      (T lines)
///
/// Periodic meshes may append (n+1)*d integer lattice shifts to a cell line;
/// without them the shortest periodic representative is used. '#' starts a
/// comment.
MeshData read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const MeshData& data);

SimplicialComplex load_complex(const std::filesystem::path& path, bool require_closed = false);
void save_complex(const std::filesystem::path& path, const SimplicialComplex& complex);

}  // namespace cochainflow

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "semcg/types.hpp"

namespace semcg {

struct BoundingBox {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{1.0, 1.0, 1.0};
};

// Hexahedral box mesh, possibly affinely deformed and/or stored in permuted
// element order. Element corners use lexicographic reference order with the
// first index fastest: corner c = ci + 2*cj + 4*ck is the vertex at cell
// corner (ci,cj,ck). `cells` records each element's lattice cell so that
// point numbering stays exact integer arithmetic under deformation and
// permutation.
struct HexMesh {
  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<int, 8>> elements;
  std::vector<std::array<int, 3>> cells;
  std::array<int, 3> extents{0, 0, 0};  // cells per axis of the source box
  BoundingBox bbox;

  index_t num_elements() const { return static_cast<index_t>(elements.size()); }
  index_t num_vertices() const { return static_cast<index_t>(vertices.size()); }
};

// Regular lattice of ex*ey*ez cells spanning `bounds`.
// Throws std::invalid_argument for nonpositive extents.
HexMesh box_mesh(int ex, int ey, int ez, const BoundingBox& bounds = {});

// x -> M x + shift applied to every vertex; connectivity unchanged.
// Throws InvertedElementError when det(M) <= 0. `matrix` is row-major.
HexMesh deform_affine(const HexMesh& mesh, const std::array<double, 9>& matrix,
                      const std::array<double, 3>& shift);

// Shuffles element storage order (emulates loss of spatial locality in the
// interface exchange). Global numbering and solutions are unaffected.
HexMesh permute_elements(const HexMesh& mesh, std::uint64_t seed);

// Global point numbering at order N on the refinement lattice
// (cell index * N + local index per axis), so coincident points match by
// integer identity. Local points are ordered element-major, i fastest.
struct DofMap {
  int order = 0;
  index_t num_local = 0;   // E * (N+1)^3
  index_t num_unique = 0;  // (ex*N+1)(ey*N+1)(ez*N+1)
  std::vector<index_t> global_id;          // per local point
  std::vector<std::int32_t> multiplicity;  // local copies of the global id
  std::vector<double> inv_multiplicity;    // the reduction weight c
  std::vector<std::uint8_t> on_boundary;   // true on the domain boundary
};

DofMap build_dofmap(const HexMesh& mesh, int order);

// Small JSON document (vertices, connectivity, lattice metadata) for
// reproducing test meshes. See README for the field list.
void save_mesh_json(const HexMesh& mesh, const std::filesystem::path& path);
HexMesh load_mesh_json(const std::filesystem::path& path);

}  // namespace semcg

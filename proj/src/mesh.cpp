#include "semcg/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace semcg {

HexMesh box_mesh(int ex, int ey, int ez, const BoundingBox& bounds) {
  if (ex < 1 || ey < 1 || ez < 1) {
    throw std::invalid_argument("box_mesh: extents must be positive, got (" +
                                std::to_string(ex) + "," + std::to_string(ey) +
                                "," + std::to_string(ez) + ")");
  }
  HexMesh mesh;
  mesh.extents = {ex, ey, ez};
  mesh.bbox = bounds;

  const int nvx = ex + 1, nvy = ey + 1, nvz = ez + 1;
  mesh.vertices.reserve(static_cast<std::size_t>(nvx) * nvy * nvz);
  for (int k = 0; k < nvz; ++k) {
    for (int j = 0; j < nvy; ++j) {
      for (int i = 0; i < nvx; ++i) {
        mesh.vertices.push_back(
            {bounds.lo[0] + (bounds.hi[0] - bounds.lo[0]) * i / ex,
             bounds.lo[1] + (bounds.hi[1] - bounds.lo[1]) * j / ey,
             bounds.lo[2] + (bounds.hi[2] - bounds.lo[2]) * k / ez});
      }
    }
  }

  auto vid = [&](int i, int j, int k) { return i + nvx * (j + nvy * k); };
  mesh.elements.reserve(static_cast<std::size_t>(ex) * ey * ez);
  mesh.cells.reserve(mesh.elements.capacity());
  for (int cz = 0; cz < ez; ++cz) {
    for (int cy = 0; cy < ey; ++cy) {
      for (int cx = 0; cx < ex; ++cx) {
        std::array<int, 8> corners{};
        for (int ck = 0; ck < 2; ++ck)
          for (int cj = 0; cj < 2; ++cj)
            for (int ci = 0; ci < 2; ++ci)
              corners[ci + 2 * cj + 4 * ck] = vid(cx + ci, cy + cj, cz + ck);
        mesh.elements.push_back(corners);
        mesh.cells.push_back({cx, cy, cz});
      }
    }
  }
  return mesh;
}

HexMesh deform_affine(const HexMesh& mesh, const std::array<double, 9>& m,
                      const std::array<double, 3>& shift) {
  const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                     m[1] * (m[3] * m[8] - m[5] * m[6]) +
                     m[2] * (m[3] * m[7] - m[4] * m[6]);
  if (!(det > 0.0)) {
    throw InvertedElementError(
        -1, "deform_affine: map determinant must be positive, got " +
                std::to_string(det));
  }
  HexMesh out = mesh;
  for (auto& v : out.vertices) {
    const std::array<double, 3> p = v;
    for (int r = 0; r < 3; ++r) {
      v[r] = m[3 * r] * p[0] + m[3 * r + 1] * p[1] + m[3 * r + 2] * p[2] +
             shift[r];
    }
  }
  return out;
}

HexMesh permute_elements(const HexMesh& mesh, std::uint64_t seed) {
  std::vector<std::size_t> order(mesh.elements.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  HexMesh out = mesh;
  for (std::size_t e = 0; e < order.size(); ++e) {
    out.elements[e] = mesh.elements[order[e]];
    out.cells[e] = mesh.cells[order[e]];
  }
  return out;
}

DofMap build_dofmap(const HexMesh& mesh, int order) {
  if (order < 1) {
    throw std::invalid_argument("build_dofmap: order must be >= 1, got " +
                                std::to_string(order));
  }
  if (mesh.cells.size() != mesh.elements.size() || mesh.extents[0] < 1 ||
      mesh.extents[1] < 1 || mesh.extents[2] < 1) {
    throw std::invalid_argument("build_dofmap: mesh lacks lattice metadata");
  }
  const int n = order;
  const int m = n + 1;
  const index_t gx = static_cast<index_t>(mesh.extents[0]) * n + 1;
  const index_t gy = static_cast<index_t>(mesh.extents[1]) * n + 1;
  const index_t gz = static_cast<index_t>(mesh.extents[2]) * n + 1;

  DofMap dof;
  dof.order = n;
  dof.num_local = mesh.num_elements() * m * m * m;
  dof.num_unique = gx * gy * gz;
  dof.global_id.resize(dof.num_local);
  dof.multiplicity.resize(dof.num_local);
  dof.inv_multiplicity.resize(dof.num_local);
  dof.on_boundary.resize(dof.num_local);

  index_t p = 0;
  for (index_t e = 0; e < mesh.num_elements(); ++e) {
    const auto& cell = mesh.cells[static_cast<std::size_t>(e)];
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i, ++p) {
          const index_t lx = static_cast<index_t>(cell[0]) * n + i;
          const index_t ly = static_cast<index_t>(cell[1]) * n + j;
          const index_t lz = static_cast<index_t>(cell[2]) * n + k;
          dof.global_id[p] = lx + gx * (ly + gy * lz);
          dof.on_boundary[p] = lx == 0 || lx == gx - 1 || ly == 0 ||
                               ly == gy - 1 || lz == 0 || lz == gz - 1;
        }
      }
    }
  }

  std::vector<std::int32_t> count(static_cast<std::size_t>(dof.num_unique), 0);
  for (index_t q = 0; q < dof.num_local; ++q)
    ++count[static_cast<std::size_t>(dof.global_id[q])];
  for (index_t q = 0; q < dof.num_local; ++q) {
    const std::int32_t c = count[static_cast<std::size_t>(dof.global_id[q])];
    dof.multiplicity[q] = c;
    dof.inv_multiplicity[q] = 1.0 / c;
  }
  return dof;
}

void save_mesh_json(const HexMesh& mesh, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["format"] = "semcg-mesh";
  doc["version"] = 1;
  doc["extents"] = mesh.extents;
  doc["bbox"] = {{"lo", mesh.bbox.lo}, {"hi", mesh.bbox.hi}};
  doc["vertices"] = mesh.vertices;
  doc["elements"] = mesh.elements;
  doc["cells"] = mesh.cells;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("save_mesh_json: cannot write " + path.string());
  }
  out << doc.dump(2) << '\n';
}

HexMesh load_mesh_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("load_mesh_json: cannot read " + path.string());
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  if (doc.value("format", "") != "semcg-mesh") {
    throw std::runtime_error("load_mesh_json: not a semcg mesh file");
  }
  HexMesh mesh;
  doc.at("extents").get_to(mesh.extents);
  doc.at("bbox").at("lo").get_to(mesh.bbox.lo);
  doc.at("bbox").at("hi").get_to(mesh.bbox.hi);
  doc.at("vertices").get_to(mesh.vertices);
  doc.at("elements").get_to(mesh.elements);
  doc.at("cells").get_to(mesh.cells);
  if (mesh.cells.size() != mesh.elements.size()) {
    throw std::runtime_error("load_mesh_json: cells/elements size mismatch");
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  for (const auto& elem : mesh.elements) {
    for (int c = 0; c < 8; ++c) {
      if (elem[c] < 0 || elem[c] >= nv) {
        throw std::runtime_error("load_mesh_json: vertex index out of range");
      }
      for (int c2 = c + 1; c2 < 8; ++c2) {
        if (elem[c] == elem[c2]) {
          throw std::runtime_error(
              "load_mesh_json: element repeats a vertex");
        }
      }
    }
  }
  return mesh;
}

}  // namespace semcg

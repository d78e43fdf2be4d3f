#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "semcg/geometry.hpp"
#include "semcg/mesh.hpp"
#include "semcg/solver.hpp"

using namespace semcg;

TEST_CASE("box mesh element and vertex counts") {
  const HexMesh one = box_mesh(1, 1, 1);
  CHECK(one.num_elements() == 1);
  CHECK(one.num_vertices() == 8);

  const HexMesh two = box_mesh(2, 2, 2);
  CHECK(two.num_elements() == 8);
  CHECK(two.num_vertices() == 27);

  const HexMesh four = box_mesh(4, 4, 4);
  CHECK(four.num_elements() == 64);
  CHECK(four.num_vertices() == 125);

  for (const auto& elem : four.elements) {
    std::set<int> distinct(elem.begin(), elem.end());
    CHECK(distinct.size() == 8);
  }
}

TEST_CASE("corner order is lexicographic with the first index fastest") {
  const HexMesh mesh = box_mesh(1, 1, 1);
  const auto& e = mesh.elements[0];
  CHECK(mesh.vertices[e[0]] == std::array<double, 3>{0, 0, 0});
  CHECK(mesh.vertices[e[1]] == std::array<double, 3>{1, 0, 0});
  CHECK(mesh.vertices[e[2]] == std::array<double, 3>{0, 1, 0});
  CHECK(mesh.vertices[e[4]] == std::array<double, 3>{0, 0, 1});
  CHECK(mesh.vertices[e[7]] == std::array<double, 3>{1, 1, 1});
}

TEST_CASE("nonpositive extents are rejected") {
  CHECK_THROWS_AS(box_mesh(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(box_mesh(2, -1, 2), std::invalid_argument);
}

TEST_CASE("identity deformation leaves the mesh unchanged") {
  const HexMesh mesh = box_mesh(2, 1, 1);
  const HexMesh same =
      deform_affine(mesh, {1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0});
  CHECK(same.vertices == mesh.vertices);
  CHECK(same.elements == mesh.elements);
}

TEST_CASE("uniform scaling scales Jacobian determinants by the cube") {
  const HexMesh mesh = box_mesh(2, 2, 2);
  const HexMesh scaled =
      deform_affine(mesh, {2, 0, 0, 0, 2, 0, 0, 0, 2}, {0, 0, 0});
  const SpectralBasis basis = build_basis(2);
  const DofMap dof = build_dofmap(mesh, 2);
  const GeomFactors before = geometric_factors(mesh, basis, dof);
  const GeomFactors after = geometric_factors(scaled, basis, dof);
  for (std::size_t p = 0; p < before.jw.size(); ++p) {
    CHECK(after.jw[p] == doctest::Approx(8.0 * before.jw[p]).epsilon(1e-14));
  }
}

TEST_CASE("nonpositive-determinant deformations are rejected") {
  const HexMesh mesh = box_mesh(1, 1, 1);
  CHECK_THROWS_AS(deform_affine(mesh, {1, 0, 0, 0, 1, 0, 0, 0, 0}, {0, 0, 0}),
                  InvertedElementError);
  CHECK_THROWS_AS(deform_affine(mesh, {-1, 0, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}),
                  InvertedElementError);
}

TEST_CASE("single-element numbering has no shared points") {
  const DofMap dof = build_dofmap(box_mesh(1, 1, 1), 2);
  CHECK(dof.num_local == 27);
  CHECK(dof.num_unique == 27);
  for (index_t p = 0; p < dof.num_local; ++p) CHECK(dof.multiplicity[p] == 1);
}

TEST_CASE("two-element numbering shares one face") {
  const DofMap dof = build_dofmap(box_mesh(2, 1, 1), 1);
  CHECK(dof.num_local == 16);
  CHECK(dof.num_unique == 12);
  int shared = 0;
  for (index_t p = 0; p < dof.num_local; ++p) {
    if (dof.multiplicity[p] == 2) ++shared;
  }
  CHECK(shared == 8);  // the 4 face points, seen from both sides
}

TEST_CASE("unique-point count follows the lattice formula") {
  CHECK(build_dofmap(box_mesh(4, 4, 4), 7).num_unique == 24389);

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> ext(1, 4), ord(1, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const int ex = ext(rng), ey = ext(rng), ez = ext(rng), n = ord(rng);
    CAPTURE(ex); CAPTURE(ey); CAPTURE(ez); CAPTURE(n);
    const DofMap dof = build_dofmap(box_mesh(ex, ey, ez), n);
    const index_t gx = static_cast<index_t>(ex) * n + 1;
    const index_t gy = static_cast<index_t>(ey) * n + 1;
    const index_t gz = static_cast<index_t>(ez) * n + 1;
    CHECK(dof.num_unique == gx * gy * gz);

    // boundary uniques are the lattice shell
    std::set<index_t> boundary_ids;
    for (index_t p = 0; p < dof.num_local; ++p) {
      if (dof.on_boundary[p]) boundary_ids.insert(dof.global_id[p]);
    }
    CHECK(static_cast<index_t>(boundary_ids.size()) ==
          dof.num_unique - (gx - 2) * (gy - 2) * (gz - 2));

    // inverse multiplicities are exact dyadics, so this sum is exact
    double csum = 0.0;
    index_t interface_points = 0;
    for (index_t p = 0; p < dof.num_local; ++p) {
      csum += dof.inv_multiplicity[p];
      const int mult = dof.multiplicity[p];
      CHECK((mult == 1 || mult == 2 || mult == 4 || mult == 8));
      if (mult > 1) ++interface_points;
    }
    CHECK(csum == static_cast<double>(dof.num_unique));

    // bounded above by the fully-connected interface-point count
    const double m3 = std::pow(n + 1.0, 3);
    const double bound = dof.num_local * (m3 - std::pow(n - 1.0, 3)) / m3;
    CHECK(static_cast<double>(interface_points) <= bound + 1e-9);
  }
}

TEST_CASE("numbering is invariant under deformation and permutation") {
  const HexMesh mesh = box_mesh(3, 2, 2);
  const DofMap a = build_dofmap(mesh, 3);
  const DofMap b = build_dofmap(
      deform_affine(mesh, {1, 0.3, 0, 0, 1, 0, 0, 0, 1}, {0.5, 0, 0}), 3);
  CHECK(a.global_id == b.global_id);

  const DofMap c = build_dofmap(permute_elements(mesh, 42), 3);
  CHECK(c.num_unique == a.num_unique);
  double csum = 0.0;
  for (index_t p = 0; p < c.num_local; ++p) csum += c.inv_multiplicity[p];
  CHECK(csum == static_cast<double>(c.num_unique));
}

TEST_CASE("mesh JSON round trip preserves everything") {
  const HexMesh mesh = deform_affine(
      box_mesh(2, 3, 1), {1, 0.25, 0, 0, 1, 0.1, 0, 0, 1}, {0.2, -0.1, 0});
  const auto path =
      std::filesystem::temp_directory_path() / "semcg_mesh_roundtrip.json";
  save_mesh_json(mesh, path);
  const HexMesh loaded = load_mesh_json(path);
  CHECK(loaded.vertices == mesh.vertices);
  CHECK(loaded.elements == mesh.elements);
  CHECK(loaded.cells == mesh.cells);
  CHECK(loaded.extents == mesh.extents);
  std::filesystem::remove(path);
}

TEST_CASE("loading a non-mesh file fails cleanly") {
  const auto path = std::filesystem::temp_directory_path() / "semcg_bad.json";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fputs("{\"format\": \"other\"}", f);
    std::fclose(f);
  }
  CHECK_THROWS(load_mesh_json(path));
  std::filesystem::remove(path);
}

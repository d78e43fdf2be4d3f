#pragma once

#include <array>
#include <vector>

#include "semcg/basis.hpp"
#include "semcg/mesh.hpp"

namespace semcg {

// Geometric data mapping each element to the reference cube, in two forms:
//   g     per point, the 6 entries (11,12,13,22,23,33) of the symmetric
//         tensor  w_i w_j w_k |J| J^-1 J^-T  with quadrature weights fused;
//   jinv  per element, J^-1 (constant per element for affine deformations);
//   jw    per point, the scalar w_i w_j w_k |J| streamed by the
//         rematerializing kernel, from which g = jw * J^-1 J^-T.
struct GeomFactors {
  index_t num_points = 0;
  std::vector<double> g;     // 6 per point
  std::vector<double> jinv;  // 9 per element, row-major
  std::vector<double> jw;    // 1 per point
};

// Differentiates the trilinear corner map analytically at every point and
// checks det(J) > 0 there; throws InvertedElementError naming the element
// otherwise.
GeomFactors geometric_factors(const HexMesh& mesh, const SpectralBasis& basis,
                              const DofMap& dofmap);

// Physical coordinates of every local point, element-major, i fastest.
std::vector<std::array<double, 3>> gll_coordinates(const HexMesh& mesh,
                                                   const SpectralBasis& basis);

namespace detail {

// b = J^-1 J^-T packed symmetric (11,12,13,22,23,33). Shared by the factor
// build and the rematerializing kernel so both round identically.
template <class T>
inline void inv_self_outer(const T* jinv, T* b) {
  b[0] = jinv[0] * jinv[0] + jinv[1] * jinv[1] + jinv[2] * jinv[2];
  b[1] = jinv[0] * jinv[3] + jinv[1] * jinv[4] + jinv[2] * jinv[5];
  b[2] = jinv[0] * jinv[6] + jinv[1] * jinv[7] + jinv[2] * jinv[8];
  b[3] = jinv[3] * jinv[3] + jinv[4] * jinv[4] + jinv[5] * jinv[5];
  b[4] = jinv[3] * jinv[6] + jinv[4] * jinv[7] + jinv[5] * jinv[8];
  b[5] = jinv[6] * jinv[6] + jinv[7] * jinv[7] + jinv[8] * jinv[8];
}

}  // namespace detail

}  // namespace semcg

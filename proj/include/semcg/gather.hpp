#pragma once

#include <span>
#include <vector>

#include "semcg/ledger.hpp"
#include "semcg/mesh.hpp"

namespace semcg {

// Interface-point groups: the local indices sharing each global id with
// multiplicity > 1, ascending within a group. Singletons are not listed.
struct GsMap {
  index_t num_local = 0;
  std::vector<index_t> offsets;  // group g spans members[offsets[g]..offsets[g+1])
  std::vector<index_t> members;
  index_t traffic_count = 0;  // n_gs: local points participating in groups

  index_t num_groups() const {
    return static_cast<index_t>(offsets.size()) - 1;
  }
};

GsMap build_gather_map(const DofMap& dofmap);

// Direct stiffness summation: every group member is replaced by the sum over
// its group; singletons are untouched. The sum is a balanced pairwise
// reduction over the ascending members, which is bitwise reproducible and,
// for the power-of-two group sizes of conforming box meshes, exact when all
// members hold the same value. Charges 2*n_gs words to the ledger when one
// is supplied (one load and one store per participating point).
template <class T>
void gather_scatter(std::span<T> u, const GsMap& map, Ledger* ledger = nullptr);

// Zeroes u at every point on the domain boundary.
template <class T>
void mask_dirichlet(std::span<T> u, const DofMap& dofmap);

// Multiplicity-weighted inner product sum_i a_i b_i c_i with c the inverse
// multiplicity; for continuous fields this equals the inner product over
// unique global points. Accumulates in 64-bit regardless of T.
template <class T>
double dot3(std::span<const T> a, std::span<const T> b, const DofMap& dofmap);

}  // namespace semcg

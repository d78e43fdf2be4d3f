#pragma once

#include <span>
#include <vector>

#include "semcg/basis.hpp"
#include "semcg/geometry.hpp"
#include "semcg/ledger.hpp"
#include "semcg/types.hpp"

namespace semcg {

// Basis and geometry streams converted to the working precision T.
template <class T>
struct OperatorData {
  int order = 0;
  index_t num_elements = 0;
  std::vector<T> diff;  // (N+1)^2 row-major
  std::vector<T> g;     // 6 per point
  std::vector<T> jinv;  // 9 per element
  std::vector<T> jw;    // 1 per point

  int points_per_dim() const { return order + 1; }
  index_t points_per_element() const {
    index_t m = order + 1;
    return m * m * m;
  }
  index_t num_points() const { return num_elements * points_per_element(); }
};

template <class T>
OperatorData<T> make_operator_data(const SpectralBasis& basis,
                                   const GeomFactors& geom);

// Flop convention: one multiply = 1, one add = 1. Each of the six 1D
// contraction passes costs 2(N+1) per point; the pointwise application of
// the 6-entry symmetric tensor costs 15. The rematerializing kernel adds,
// per point, 30 to rebuild J^-1 J^-T from the element's held J^-1, 6 to
// scale it by the streamed jw, for a total of 51 pointwise.
constexpr index_t stored_local_flops_per_point(int order) {
  return 12 * (order + 1) + 15;
}
constexpr index_t remat_local_flops_per_point(int order) {
  return 12 * (order + 1) + 51;
}
inline index_t local_flops_per_point(int order, Variant v) {
  return v == Variant::stored ? stored_local_flops_per_point(order)
                              : remat_local_flops_per_point(order);
}
// Vector updates and weighted reductions of one CG iteration: 2 (p update)
// + 3 + 3 (the two weighted dots) + 2 + 2 (x and r updates) per point.
constexpr index_t cg_vector_flops_per_point() { return 12; }

// w = D^T G D u per element, with G read from the six precomputed streams.
// Ledger: 8n words (u plus six factor streams in, w out) and
// n * stored_local_flops_per_point.
template <class T>
void apply_local_stored(std::span<const T> u, const OperatorData<T>& op,
                        std::span<T> w, Ledger* ledger = nullptr);

// Same operator with G rebuilt per point from the element's J^-1 and the
// streamed jw scalar. Ledger: 3n words (u and jw in, w out) and
// n * remat_local_flops_per_point.
template <class T>
void apply_local_remat(std::span<const T> u, const OperatorData<T>& op,
                       std::span<T> w, Ledger* ledger = nullptr);

template <class T>
void apply_local(std::span<const T> u, const OperatorData<T>& op, Variant v,
                 std::span<T> w, Ledger* ledger = nullptr) {
  if (v == Variant::stored)
    apply_local_stored(u, op, w, ledger);
  else
    apply_local_remat(u, op, w, ledger);
}

namespace detail {

// Single-element kernels; scratch must hold 3*m^3 values. `g` points at the
// element's 6-per-point factors, `jinv` at its 9-entry inverse Jacobian,
// `jw` at its per-point weight scalars.
template <class T>
void element_laplacian_stored(const T* u, const T* g, const T* diff, int m,
                              T* w, T* scratch);
template <class T>
void element_laplacian_remat(const T* u, const T* jinv, const T* jw,
                             const T* diff, int m, T* w, T* scratch);

}  // namespace detail

}  // namespace semcg

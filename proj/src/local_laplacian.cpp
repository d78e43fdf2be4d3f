#include "semcg/local_laplacian.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace semcg {

namespace detail {

namespace {

inline index_t idx(int i, int j, int k, int m) {
  return static_cast<index_t>(i) + static_cast<index_t>(m) * (j + static_cast<index_t>(m) * k);
}

// ur,us,ut <- reference-space derivatives of u (three contractions), then
// the symmetric per-point tensor maps them in place, then the transposed
// contractions accumulate into w.
template <class T>
void derivatives(const T* u, const T* diff, int m, T* ur, T* us, T* ut) {
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        const index_t p = idx(i, j, k, m);
        T ar = T(0), as = T(0), at = T(0);
        for (int a = 0; a < m; ++a) {
          ar += diff[i * m + a] * u[idx(a, j, k, m)];
          as += diff[j * m + a] * u[idx(i, a, k, m)];
          at += diff[k * m + a] * u[idx(i, j, a, m)];
        }
        ur[p] = ar;
        us[p] = as;
        ut[p] = at;
      }
    }
  }
}

template <class T>
inline void apply_tensor(const T* g, T& r, T& s, T& t) {
  const T a = g[0] * r + g[1] * s + g[2] * t;
  const T b = g[1] * r + g[3] * s + g[4] * t;
  const T c = g[2] * r + g[4] * s + g[5] * t;
  r = a;
  s = b;
  t = c;
}

template <class T>
void transpose_accumulate(const T* ur, const T* us, const T* ut, const T* diff,
                          int m, T* w) {
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) {
        T acc = T(0);
        for (int a = 0; a < m; ++a) {
          acc += diff[a * m + i] * ur[idx(a, j, k, m)];
          acc += diff[a * m + j] * us[idx(i, a, k, m)];
          acc += diff[a * m + k] * ut[idx(i, j, a, m)];
        }
        w[idx(i, j, k, m)] = acc;
      }
    }
  }
}

}  // namespace

template <class T>
void element_laplacian_stored(const T* u, const T* g, const T* diff, int m,
                              T* w, T* scratch) {
  const index_t mm = static_cast<index_t>(m) * m * m;
  T* ur = scratch;
  T* us = scratch + mm;
  T* ut = scratch + 2 * mm;
  derivatives(u, diff, m, ur, us, ut);
  for (index_t p = 0; p < mm; ++p) {
    apply_tensor(g + 6 * p, ur[p], us[p], ut[p]);
  }
  transpose_accumulate(ur, us, ut, diff, m, w);
}

template <class T>
void element_laplacian_remat(const T* u, const T* jinv, const T* jw,
                             const T* diff, int m, T* w, T* scratch) {
  const index_t mm = static_cast<index_t>(m) * m * m;
  T* ur = scratch;
  T* us = scratch + mm;
  T* ut = scratch + 2 * mm;
  derivatives(u, diff, m, ur, us, ut);
  for (index_t p = 0; p < mm; ++p) {
    // Rebuild the six tensor entries from the held J^-1 and the streamed
    // weight scalar; matches the stored stream to rounding.
    T b[6];
    inv_self_outer(jinv, b);
    T g[6];
    for (int c = 0; c < 6; ++c) g[c] = jw[p] * b[c];
    apply_tensor(g, ur[p], us[p], ut[p]);
  }
  transpose_accumulate(ur, us, ut, diff, m, w);
}

template void element_laplacian_stored<float>(const float*, const float*,
                                              const float*, int, float*,
                                              float*);
template void element_laplacian_stored<double>(const double*, const double*,
                                               const double*, int, double*,
                                               double*);
template void element_laplacian_remat<float>(const float*, const float*,
                                             const float*, const float*, int,
                                             float*, float*);
template void element_laplacian_remat<double>(const double*, const double*,
                                              const double*, const double*,
                                              int, double*, double*);

}  // namespace detail

template <class T>
OperatorData<T> make_operator_data(const SpectralBasis& basis,
                                   const GeomFactors& geom) {
  OperatorData<T> op;
  op.order = basis.order;
  op.num_elements = static_cast<index_t>(geom.jinv.size()) / 9;
  auto convert = [](const std::vector<double>& src, std::vector<T>& dst) {
    dst.resize(src.size());
    std::transform(src.begin(), src.end(), dst.begin(),
                   [](double v) { return static_cast<T>(v); });
  };
  convert(basis.diff, op.diff);
  convert(geom.g, op.g);
  convert(geom.jinv, op.jinv);
  convert(geom.jw, op.jw);
  return op;
}

namespace {

template <class T>
void check_shapes(std::span<const T> u, const OperatorData<T>& op,
                  std::span<T> w) {
  if (static_cast<index_t>(u.size()) != op.num_points() ||
      static_cast<index_t>(w.size()) != op.num_points()) {
    throw std::invalid_argument(
        "apply_local: field length does not match operator data (" +
        std::to_string(u.size()) + " vs " + std::to_string(op.num_points()) +
        ")");
  }
}

}  // namespace

template <class T>
void apply_local_stored(std::span<const T> u, const OperatorData<T>& op,
                        std::span<T> w, Ledger* ledger) {
  check_shapes(u, op, w);
  const int m = op.points_per_dim();
  const index_t per_elem = op.points_per_element();
  std::vector<T> scratch(static_cast<std::size_t>(3 * per_elem));
  for (index_t e = 0; e < op.num_elements; ++e) {
    detail::element_laplacian_stored(u.data() + e * per_elem,
                                     op.g.data() + 6 * e * per_elem,
                                     op.diff.data(), m, w.data() + e * per_elem,
                                     scratch.data());
  }
  if (ledger) {
    const index_t n = op.num_points();
    ledger->charge(Phase::op_local, 7 * n, n,
                   n * stored_local_flops_per_point(op.order));
  }
}

template <class T>
void apply_local_remat(std::span<const T> u, const OperatorData<T>& op,
                       std::span<T> w, Ledger* ledger) {
  check_shapes(u, op, w);
  const int m = op.points_per_dim();
  const index_t per_elem = op.points_per_element();
  std::vector<T> scratch(static_cast<std::size_t>(3 * per_elem));
  for (index_t e = 0; e < op.num_elements; ++e) {
    detail::element_laplacian_remat(u.data() + e * per_elem,
                                    op.jinv.data() + 9 * e,
                                    op.jw.data() + e * per_elem,
                                    op.diff.data(), m, w.data() + e * per_elem,
                                    scratch.data());
  }
  if (ledger) {
    const index_t n = op.num_points();
    ledger->charge(Phase::op_local, 2 * n, n,
                   n * remat_local_flops_per_point(op.order));
  }
}

template OperatorData<float> make_operator_data<float>(const SpectralBasis&,
                                                       const GeomFactors&);
template OperatorData<double> make_operator_data<double>(const SpectralBasis&,
                                                         const GeomFactors&);
template void apply_local_stored<float>(std::span<const float>,
                                        const OperatorData<float>&,
                                        std::span<float>, Ledger*);
template void apply_local_stored<double>(std::span<const double>,
                                         const OperatorData<double>&,
                                         std::span<double>, Ledger*);
template void apply_local_remat<float>(std::span<const float>,
                                       const OperatorData<float>&,
                                       std::span<float>, Ledger*);
template void apply_local_remat<double>(std::span<const double>,
                                        const OperatorData<double>&,
                                        std::span<double>, Ledger*);

}  // namespace semcg

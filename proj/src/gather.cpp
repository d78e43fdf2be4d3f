#include "semcg/gather.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace semcg {

GsMap build_gather_map(const DofMap& dofmap) {
  // Two passes over the local points keep members ascending per group
  // without any sorting.
  std::vector<index_t> group_of(static_cast<std::size_t>(dofmap.num_unique),
                                -1);
  index_t num_groups = 0;
  for (index_t p = 0; p < dofmap.num_local; ++p) {
    if (dofmap.multiplicity[p] > 1) {
      index_t& g = group_of[static_cast<std::size_t>(dofmap.global_id[p])];
      if (g < 0) g = num_groups++;
    }
  }

  GsMap map;
  map.num_local = dofmap.num_local;
  std::vector<index_t> sizes(static_cast<std::size_t>(num_groups), 0);
  for (index_t p = 0; p < dofmap.num_local; ++p) {
    const index_t g = group_of[static_cast<std::size_t>(dofmap.global_id[p])];
    if (g >= 0) ++sizes[static_cast<std::size_t>(g)];
  }
  map.offsets.assign(static_cast<std::size_t>(num_groups) + 1, 0);
  for (index_t g = 0; g < num_groups; ++g) {
    map.offsets[static_cast<std::size_t>(g) + 1] =
        map.offsets[static_cast<std::size_t>(g)] +
        sizes[static_cast<std::size_t>(g)];
  }
  map.members.resize(static_cast<std::size_t>(map.offsets.back()));
  std::vector<index_t> cursor(map.offsets.begin(), map.offsets.end() - 1);
  for (index_t p = 0; p < dofmap.num_local; ++p) {
    const index_t g = group_of[static_cast<std::size_t>(dofmap.global_id[p])];
    if (g >= 0) {
      map.members[static_cast<std::size_t>(cursor[static_cast<std::size_t>(g)]++)] = p;
    }
  }
  map.traffic_count = static_cast<index_t>(map.members.size());
  return map;
}

namespace {

template <class T>
T balanced_sum(const T* vals, index_t count) {
  if (count == 1) return vals[0];
  const index_t half = count / 2;
  return balanced_sum(vals, half) + balanced_sum(vals + half, count - half);
}

void check_length(index_t got, index_t want, const char* who) {
  if (got != want) {
    throw std::invalid_argument(std::string(who) + ": field length " +
                                std::to_string(got) + " does not match " +
                                std::to_string(want));
  }
}

}  // namespace

template <class T>
void gather_scatter(std::span<T> u, const GsMap& map, Ledger* ledger) {
  check_length(static_cast<index_t>(u.size()), map.num_local,
               "gather_scatter");
  std::array<T, 8> buf;
  std::vector<T> big;
  for (index_t g = 0; g < map.num_groups(); ++g) {
    const index_t begin = map.offsets[static_cast<std::size_t>(g)];
    const index_t count = map.offsets[static_cast<std::size_t>(g) + 1] - begin;
    T* vals = buf.data();
    if (count > static_cast<index_t>(buf.size())) {
      big.resize(static_cast<std::size_t>(count));
      vals = big.data();
    }
    for (index_t k = 0; k < count; ++k) {
      vals[k] = u[static_cast<std::size_t>(
          map.members[static_cast<std::size_t>(begin + k)])];
    }
    const T sum = balanced_sum(vals, count);
    for (index_t k = 0; k < count; ++k) {
      u[static_cast<std::size_t>(
          map.members[static_cast<std::size_t>(begin + k)])] = sum;
    }
  }
  if (ledger) {
    ledger->charge(Phase::gather_scatter, map.traffic_count,
                   map.traffic_count, 0);
  }
}

template <class T>
void mask_dirichlet(std::span<T> u, const DofMap& dofmap) {
  check_length(static_cast<index_t>(u.size()), dofmap.num_local,
               "mask_dirichlet");
  for (index_t p = 0; p < dofmap.num_local; ++p) {
    if (dofmap.on_boundary[static_cast<std::size_t>(p)]) {
      u[static_cast<std::size_t>(p)] = T(0);
    }
  }
}

template <class T>
double dot3(std::span<const T> a, std::span<const T> b, const DofMap& dofmap) {
  check_length(static_cast<index_t>(a.size()), dofmap.num_local, "dot3");
  check_length(static_cast<index_t>(b.size()), dofmap.num_local, "dot3");
  double acc = 0.0;
  for (index_t p = 0; p < dofmap.num_local; ++p) {
    acc += static_cast<double>(a[static_cast<std::size_t>(p)]) *
           static_cast<double>(b[static_cast<std::size_t>(p)]) *
           dofmap.inv_multiplicity[static_cast<std::size_t>(p)];
  }
  return acc;
}

template void gather_scatter<float>(std::span<float>, const GsMap&, Ledger*);
template void gather_scatter<double>(std::span<double>, const GsMap&, Ledger*);
template void mask_dirichlet<float>(std::span<float>, const DofMap&);
template void mask_dirichlet<double>(std::span<double>, const DofMap&);
template double dot3<float>(std::span<const float>, std::span<const float>,
                            const DofMap&);
template double dot3<double>(std::span<const double>, std::span<const double>,
                             const DofMap&);

}  // namespace semcg

// Test-only oracles: dense assembly of the masked operator on the unique
// points, an independent triple-loop assembly for single elements, and
// seeded field generators. These stay independent of the sum-factorized
// kernel paths they are used to check.
#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "semcg/solver.hpp"

namespace semcg::testing {

struct UniqueOperator {
  Eigen::MatrixXd interior;       // masked operator on interior unique dofs
  std::vector<index_t> rep;       // one local index per global id
  std::vector<index_t> interior_ids;        // global ids off the boundary
  std::vector<index_t> interior_index_of;   // global id -> row, or -1
};

// One representative local index per global id, plus the interior id list.
inline UniqueOperator unique_layout(const System& sys) {
  UniqueOperator u;
  const DofMap& dof = sys.dofmap;
  u.rep.assign(static_cast<std::size_t>(dof.num_unique), -1);
  std::vector<std::uint8_t> boundary(static_cast<std::size_t>(dof.num_unique),
                                     0);
  for (index_t p = 0; p < dof.num_local; ++p) {
    const index_t g = dof.global_id[static_cast<std::size_t>(p)];
    if (u.rep[static_cast<std::size_t>(g)] < 0) {
      u.rep[static_cast<std::size_t>(g)] = p;
    }
    boundary[static_cast<std::size_t>(g)] |=
        dof.on_boundary[static_cast<std::size_t>(p)];
  }
  u.interior_index_of.assign(static_cast<std::size_t>(dof.num_unique), -1);
  for (index_t g = 0; g < dof.num_unique; ++g) {
    if (!boundary[static_cast<std::size_t>(g)]) {
      u.interior_index_of[static_cast<std::size_t>(g)] =
          static_cast<index_t>(u.interior_ids.size());
      u.interior_ids.push_back(g);
    }
  }
  return u;
}

// Scatter a unique-dof vector to the duplicated local layout.
inline std::vector<double> scatter_unique(const System& sys,
                                          const std::vector<double>& uq) {
  std::vector<double> local(static_cast<std::size_t>(sys.num_local()));
  for (index_t p = 0; p < sys.num_local(); ++p) {
    local[static_cast<std::size_t>(p)] = uq[static_cast<std::size_t>(
        sys.dofmap.global_id[static_cast<std::size_t>(p)])];
  }
  return local;
}

// mask(QQ^T A_L u) through the public kernels.
inline std::vector<double> masked_operator(const System& sys, Variant variant,
                                           std::vector<double> u) {
  const auto op = make_operator_data<double>(sys.basis, sys.geom);
  std::vector<double> w(u.size());
  apply_local<double>(u, op, variant, w);
  gather_scatter<double>(w, sys.gsmap);
  mask_dirichlet<double>(w, sys.dofmap);
  return w;
}

// Dense interior operator by probing unit vectors column by column.
inline UniqueOperator probe_unique_operator(const System& sys,
                                            Variant variant) {
  UniqueOperator u = unique_layout(sys);
  const index_t ni = static_cast<index_t>(u.interior_ids.size());
  u.interior = Eigen::MatrixXd::Zero(ni, ni);
  std::vector<double> uq(static_cast<std::size_t>(sys.dofmap.num_unique), 0.0);
  for (index_t col = 0; col < ni; ++col) {
    uq[static_cast<std::size_t>(u.interior_ids[static_cast<std::size_t>(col)])] = 1.0;
    const auto w = masked_operator(sys, variant, scatter_unique(sys, uq));
    uq[static_cast<std::size_t>(u.interior_ids[static_cast<std::size_t>(col)])] = 0.0;
    for (index_t row = 0; row < ni; ++row) {
      u.interior(row, col) = w[static_cast<std::size_t>(
          u.rep[static_cast<std::size_t>(
              u.interior_ids[static_cast<std::size_t>(row)])])];
    }
  }
  return u;
}

// Interior solve of the probed dense system; returns the masked local field.
inline std::vector<double> dense_solve(const System& sys,
                                       const UniqueOperator& u,
                                       const std::vector<double>& b_local) {
  const index_t ni = static_cast<index_t>(u.interior_ids.size());
  Eigen::VectorXd b(ni);
  for (index_t i = 0; i < ni; ++i) {
    b(i) = b_local[static_cast<std::size_t>(
        u.rep[static_cast<std::size_t>(
            u.interior_ids[static_cast<std::size_t>(i)])])];
  }
  const Eigen::VectorXd x = u.interior.llt().solve(b);
  std::vector<double> uq(static_cast<std::size_t>(sys.dofmap.num_unique), 0.0);
  for (index_t i = 0; i < ni; ++i) {
    uq[static_cast<std::size_t>(
        u.interior_ids[static_cast<std::size_t>(i)])] = x(i);
  }
  return scatter_unique(sys, uq);
}

// Independent single-element assembly: loops over quadrature points and the
// analytic basis-derivative deltas, never touching the contraction kernels.
inline Eigen::MatrixXd assemble_single_element_dense(const System& sys) {
  const int m = sys.basis.num_points();
  const index_t nn = static_cast<index_t>(m) * m * m;
  auto idx = [m](int i, int j, int k) {
    return static_cast<index_t>(i) + static_cast<index_t>(m) * (j + static_cast<index_t>(m) * k);
  };
  auto dphi = [&](index_t p, int ri, int rj, int rk, int axis) {
    const int pi = static_cast<int>(p % m);
    const int pj = static_cast<int>((p / m) % m);
    const int pk = static_cast<int>(p / (static_cast<index_t>(m) * m));
    switch (axis) {
      case 0: return (rj == pj && rk == pk) ? sys.basis.d(ri, pi) : 0.0;
      case 1: return (ri == pi && rk == pk) ? sys.basis.d(rj, pj) : 0.0;
      default: return (ri == pi && rj == pj) ? sys.basis.d(rk, pk) : 0.0;
    }
  };
  static const int sym[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nn, nn);
  for (int rk = 0; rk < m; ++rk)
    for (int rj = 0; rj < m; ++rj)
      for (int ri = 0; ri < m; ++ri) {
        const index_t r = idx(ri, rj, rk);
        const double* g = sys.geom.g.data() + 6 * r;
        for (index_t p = 0; p < nn; ++p)
          for (index_t q = 0; q < nn; ++q)
            for (int aa = 0; aa < 3; ++aa)
              for (int bb = 0; bb < 3; ++bb)
                a(p, q) += g[sym[aa][bb]] * dphi(p, ri, rj, rk, aa) *
                           dphi(q, ri, rj, rk, bb);
      }
  return a;
}

inline std::vector<double> random_local_field(index_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (auto& v : u) v = dist(rng);
  return u;
}

// Random values on the interior unique dofs, scattered: continuous + masked.
inline std::vector<double> random_continuous_masked(const System& sys,
                                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const UniqueOperator u = unique_layout(sys);
  std::vector<double> uq(static_cast<std::size_t>(sys.dofmap.num_unique), 0.0);
  for (index_t g : u.interior_ids) uq[static_cast<std::size_t>(g)] = dist(rng);
  return scatter_unique(sys, uq);
}

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace semcg::testing

#pragma once

#include <cstddef>
#include <vector>

#include "semcg/types.hpp"

namespace semcg {

// One-dimensional Gauss-Lobatto-Legendre basis of order N: the N+1 nodes on
// [-1,1] (endpoints included), the quadrature weights, and the Lagrange
// differentiation matrix on the nodes.
//
// Invariants: nodes strictly increasing and symmetric about 0 with
// nodes[0] = -1, nodes[N] = +1; weights symmetric with sum 2; every row of
// diff sums to 0; diff applied to the node vector gives all ones.
struct SpectralBasis {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> diff;  // row-major (N+1)x(N+1); d(i,j) = l_j'(nodes[i])

  int num_points() const { return order + 1; }
  double d(int i, int j) const {
    return diff[static_cast<std::size_t>(i) * (order + 1) +
                static_cast<std::size_t>(j)];
  }
};

// Nodes are the roots of (1-x^2) L_N'(x) found by Newton iteration from
// Chebyshev-Lobatto guesses; weights follow w_i = 2 / (N(N+1) L_N(x_i)^2).
// All data is computed in 64-bit; solves requesting 32-bit convert later.
// Throws std::invalid_argument for order < 1.
SpectralBasis build_basis(int order);

}  // namespace semcg

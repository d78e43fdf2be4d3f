#include "semcg/basis.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace semcg {

namespace {

struct Legendre {
  double value;   // L_N(x)
  double deriv;   // L_N'(x)
};

// Three-term recurrence, stable for the orders in scope.
Legendre legendre(int n, double x) {
  if (n == 0) return {1.0, 0.0};
  double p_prev = 1.0, p = x;       // L_0, L_1
  double d_prev = 0.0, d = 1.0;     // L_0', L_1'
  for (int k = 1; k < n; ++k) {
    const double p_next = ((2 * k + 1) * x * p - k * p_prev) / (k + 1);
    const double d_next = d_prev + (2 * k + 1) * p;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

}  // namespace

SpectralBasis build_basis(int order) {
  if (order < 1) {
    throw std::invalid_argument("build_basis: order must be >= 1, got " +
                                std::to_string(order));
  }
  const int n = order;
  const int m = n + 1;

  SpectralBasis basis;
  basis.order = n;
  basis.nodes.assign(m, 0.0);
  basis.nodes.front() = -1.0;
  basis.nodes.back() = 1.0;

  // Interior nodes: Newton on f = L_N' with f' from the Legendre ODE
  // (1-x^2) L_N'' = 2x L_N' - N(N+1) L_N, seeded at Chebyshev-Lobatto points.
  constexpr double kTol = 1e-15;
  constexpr int kMaxNewton = 100;
  const double pi = std::acos(-1.0);
  for (int j = 1; j < n; ++j) {
    double x = -std::cos(pi * j / n);
    for (int it = 0; it < kMaxNewton; ++it) {
      const Legendre l = legendre(n, x);
      const double fpp = (2.0 * x * l.deriv - n * (n + 1.0) * l.value) /
                         (1.0 - x * x);
      const double step = l.deriv / fpp;
      x -= step;
      if (std::abs(step) <= kTol) break;
    }
    basis.nodes[j] = x;
  }
  // Enforce exact symmetry about 0.
  for (int i = 0; i * 2 < m; ++i) {
    const double s = 0.5 * (basis.nodes[i] - basis.nodes[n - i]);
    basis.nodes[i] = s;
    basis.nodes[n - i] = -s;
  }
  if (m % 2 == 1) basis.nodes[n / 2] = 0.0;

  basis.weights.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    const double ln = legendre(n, basis.nodes[i]).value;
    basis.weights[i] = 2.0 / (n * (n + 1.0) * ln * ln);
  }
  for (int i = 0; i * 2 < m; ++i) {
    const double w = 0.5 * (basis.weights[i] + basis.weights[n - i]);
    basis.weights[i] = w;
    basis.weights[n - i] = w;
  }

  // Lagrange differentiation matrix: off-diagonals from the node products
  // a_k = prod_{j != k} (x_k - x_j), diagonal via the negative-sum trick so
  // rows sum to zero exactly.
  std::vector<double> a(m, 1.0);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j) {
      if (j != k) a[k] *= basis.nodes[k] - basis.nodes[j];
    }
  }
  basis.diff.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      const double dij = a[i] / (a[j] * (basis.nodes[i] - basis.nodes[j]));
      basis.diff[static_cast<std::size_t>(i) * m + j] = dij;
      row_sum += dij;
    }
    basis.diff[static_cast<std::size_t>(i) * m + i] = -row_sum;
  }
  return basis;
}

}  // namespace semcg

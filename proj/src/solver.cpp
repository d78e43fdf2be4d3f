#include "semcg/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

namespace semcg {

System build_system(HexMesh mesh, int order) {
  System sys;
  sys.basis = build_basis(order);
  sys.mesh = std::move(mesh);
  sys.dofmap = build_dofmap(sys.mesh, order);
  sys.gsmap = build_gather_map(sys.dofmap);
  sys.geom = geometric_factors(sys.mesh, sys.basis, sys.dofmap);
  return sys;
}

double manufactured_solution(double x, double y, double z) {
  const double pi = std::acos(-1.0);
  return std::sin(pi * x) * std::sin(pi * y) * std::sin(pi * z);
}

double manufactured_forcing(double x, double y, double z) {
  const double pi = std::acos(-1.0);
  return 3.0 * pi * pi * manufactured_solution(x, y, z);
}

template <class T>
std::vector<T> assemble_rhs(const System& sys, const ScalarField& f) {
  const index_t n = sys.num_local();
  const auto coords = gll_coordinates(sys.mesh, sys.basis);
  std::vector<double> local(static_cast<std::size_t>(n));
  for (index_t p = 0; p < n; ++p) {
    const auto& x = coords[static_cast<std::size_t>(p)];
    local[static_cast<std::size_t>(p)] =
        f(x[0], x[1], x[2]) * sys.geom.jw[static_cast<std::size_t>(p)];
  }
  gather_scatter<double>(local, sys.gsmap);
  mask_dirichlet<double>(local, sys.dofmap);
  std::vector<T> out(static_cast<std::size_t>(n));
  for (index_t p = 0; p < n; ++p) {
    out[static_cast<std::size_t>(p)] =
        static_cast<T>(local[static_cast<std::size_t>(p)]);
  }
  return out;
}

template <class T>
SolveResult<T> cg_solve(const System& sys, Variant variant,
                        std::span<const T> b, std::span<const T> x0,
                        double rel_tol, index_t max_iter) {
  const auto t_start = std::chrono::steady_clock::now();
  const index_t n = sys.num_local();
  if (static_cast<index_t>(b.size()) != n) {
    throw std::invalid_argument("cg_solve: rhs length " +
                                std::to_string(b.size()) +
                                " does not match " + std::to_string(n));
  }
  if (!x0.empty() && static_cast<index_t>(x0.size()) != n) {
    throw std::invalid_argument("cg_solve: x0 length mismatch");
  }
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("cg_solve: rel_tol must be positive");
  }
  if (max_iter < 0) {
    throw std::invalid_argument("cg_solve: max_iter must be nonnegative");
  }

  const OperatorData<T> op = make_operator_data<T>(sys.basis, sys.geom);
  const int m = op.points_per_dim();
  const index_t per_elem = op.points_per_element();
  const index_t n_gs = sys.gsmap.traffic_count;
  const index_t op_flops = n * local_flops_per_point(sys.order(), variant);
  const bool stored = variant == Variant::stored;

  SolveResult<T> res;
  res.x.assign(static_cast<std::size_t>(n), T(0));
  if (!x0.empty()) res.x.assign(x0.begin(), x0.end());
  std::vector<T> r(b.begin(), b.end());
  std::vector<T> p(static_cast<std::size_t>(n), T(0));
  std::vector<T> w(static_cast<std::size_t>(n), T(0));
  std::vector<T> scratch(static_cast<std::size_t>(3 * per_elem));

  SolveStats& stats = res.stats;
  stats.n = n;
  stats.n_unique = sys.dofmap.num_unique;
  stats.elements = sys.mesh.num_elements();
  stats.order = sys.order();
  stats.variant = variant;
  stats.precision_bits = static_cast<int>(sizeof(T)) * 8;
  stats.words_per_iteration = (stored ? 20 : 15) * n + 2 * n_gs;
  stats.flops_per_iteration = op_flops + cg_vector_flops_per_point() * n;
  stats.gs_words_per_iteration = 2 * n_gs;

  auto apply_element = [&](const T* u_e, index_t e, T* w_e) {
    if (stored) {
      detail::element_laplacian_stored(u_e, op.g.data() + 6 * e * per_elem,
                                       op.diff.data(), m, w_e, scratch.data());
    } else {
      detail::element_laplacian_remat(u_e, op.jinv.data() + 9 * e,
                                      op.jw.data() + e * per_elem,
                                      op.diff.data(), m, w_e, scratch.data());
    }
  };

  // Initial residual r = b - mask(QQ^T A_L x0), always with a full operator
  // pass; charged to the init phase, outside the per-iteration totals.
  for (index_t e = 0; e < op.num_elements; ++e) {
    apply_element(res.x.data() + e * per_elem, e, w.data() + e * per_elem);
  }
  gather_scatter<T>(w, sys.gsmap);
  mask_dirichlet<T>(w, sys.dofmap);
  double rho = 0.0;
  for (index_t q = 0; q < n; ++q) {
    r[static_cast<std::size_t>(q)] =
        b[static_cast<std::size_t>(q)] - w[static_cast<std::size_t>(q)];
    const double rq = static_cast<double>(r[static_cast<std::size_t>(q)]);
    rho += rq * rq * sys.dofmap.inv_multiplicity[static_cast<std::size_t>(q)];
  }
  stats.ledger.charge(Phase::init, (stored ? 11 : 6) * n + n_gs, 2 * n + n_gs,
                      op_flops + 4 * n);
  stats.rho_history.push_back(rho);
  const double rho0 = rho;
  const double threshold = rel_tol * rel_tol * rho0;
  stats.converged = rho0 == 0.0;

  double beta = 0.0;
  double rho_prev = rho0;
  index_t iter = 0;
  while (!stats.converged && iter < max_iter) {
    ++iter;
    // Fused pass: p streams straight into the operator input; the charge of
    // 13n (stored) / 8n (remat) also covers the r update executed in the
    // final fused pass below.
    const T beta_t = static_cast<T>(beta);
    for (index_t e = 0; e < op.num_elements; ++e) {
      T* p_e = p.data() + e * per_elem;
      const T* r_e = r.data() + e * per_elem;
      for (index_t q = 0; q < per_elem; ++q) p_e[q] = r_e[q] + beta_t * p_e[q];
      apply_element(p_e, e, w.data() + e * per_elem);
    }
    gather_scatter<T>(w, sys.gsmap);
    mask_dirichlet<T>(w, sys.dofmap);

    // The summation above must finish before this reduction, so p and w are
    // reloaded here.
    const double pw = dot3<T>(p, w, sys.dofmap);
    if (!(pw > 0.0)) {
      throw OperatorNotSpdError("cg_solve: <p, Ap> = " + std::to_string(pw) +
                                " at iteration " + std::to_string(iter));
    }
    const double alpha = rho_prev / pw;
    const T alpha_t = static_cast<T>(alpha);

    // Fused x/r updates with the residual reduction.
    rho = 0.0;
    for (index_t q = 0; q < n; ++q) {
      const std::size_t s = static_cast<std::size_t>(q);
      res.x[s] += alpha_t * p[s];
      r[s] -= alpha_t * w[s];
      const double rq = static_cast<double>(r[s]);
      rho += rq * rq * sys.dofmap.inv_multiplicity[s];
    }
    if (!std::isfinite(rho)) {
      throw DivergenceError("cg_solve: non-finite rho at iteration " +
                            std::to_string(iter));
    }
    stats.rho_history.push_back(rho);

    stats.ledger.charge(Phase::op_stream, (stored ? 10 : 5) * n, 3 * n,
                        op_flops);
    stats.ledger.charge(Phase::axpy, 0, 0, 4 * n);
    stats.ledger.charge(Phase::x_update, 2 * n, n, 2 * n);
    stats.ledger.charge(Phase::reduction_c, 2 * n, 0, 6 * n);
    stats.ledger.charge(Phase::reduction_reload, 2 * n, 0, 0);
    stats.ledger.charge(Phase::gather_scatter, n_gs, n_gs, 0);

    beta = rho / rho_prev;
    rho_prev = rho;
    if (rho <= threshold) stats.converged = true;
  }
  stats.iterations = iter;
  stats.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  return res;
}

template <class T>
ErrorNorms solution_error(const System& sys, std::span<const T> x,
                          const ScalarField& exact) {
  const index_t n = sys.num_local();
  if (static_cast<index_t>(x.size()) != n) {
    throw std::invalid_argument("solution_error: field length mismatch");
  }
  const auto coords = gll_coordinates(sys.mesh, sys.basis);
  ErrorNorms norms;
  double l2sq = 0.0;
  for (index_t p = 0; p < n; ++p) {
    const std::size_t s = static_cast<std::size_t>(p);
    const auto& c = coords[s];
    const double e = static_cast<double>(x[s]) - exact(c[0], c[1], c[2]);
    norms.linf = std::max(norms.linf, std::abs(e));
    l2sq += e * e * sys.geom.jw[s] * sys.dofmap.inv_multiplicity[s];
  }
  norms.l2 = std::sqrt(l2sq);
  return norms;
}

template std::vector<float> assemble_rhs<float>(const System&,
                                                const ScalarField&);
template std::vector<double> assemble_rhs<double>(const System&,
                                                  const ScalarField&);
template SolveResult<float> cg_solve<float>(const System&, Variant,
                                            std::span<const float>,
                                            std::span<const float>, double,
                                            index_t);
template SolveResult<double> cg_solve<double>(const System&, Variant,
                                              std::span<const double>,
                                              std::span<const double>, double,
                                              index_t);
template ErrorNorms solution_error<float>(const System&,
                                          std::span<const float>,
                                          const ScalarField&);
template ErrorNorms solution_error<double>(const System&,
                                           std::span<const double>,
                                           const ScalarField&);

}  // namespace semcg

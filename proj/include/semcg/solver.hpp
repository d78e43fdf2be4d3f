#pragma once

#include <functional>
#include <span>
#include <vector>

#include "semcg/basis.hpp"
#include "semcg/gather.hpp"
#include "semcg/geometry.hpp"
#include "semcg/ledger.hpp"
#include "semcg/local_laplacian.hpp"
#include "semcg/mesh.hpp"

namespace semcg {

// Everything a solve needs, built once per (mesh, order) and immutable
// afterwards; safe to share read-only.
struct System {
  SpectralBasis basis;
  HexMesh mesh;
  DofMap dofmap;
  GsMap gsmap;
  GeomFactors geom;

  index_t num_local() const { return dofmap.num_local; }
  int order() const { return basis.order; }
};

System build_system(HexMesh mesh, int order);

struct SolveStats {
  index_t iterations = 0;
  std::vector<double> rho_history;  // rho_0 .. rho_i
  bool converged = false;
  Ledger ledger;
  double wall_time_seconds = 0.0;

  // problem context and the fixed per-iteration charges
  index_t n = 0;
  index_t n_unique = 0;
  index_t elements = 0;
  int order = 0;
  Variant variant = Variant::stored;
  int precision_bits = 64;
  index_t words_per_iteration = 0;     // (20 or 15) n + 2 n_gs
  index_t flops_per_iteration = 0;     // local kernel + 12n vector ops
  index_t gs_words_per_iteration = 0;  // 2 n_gs of this mesh
};

template <class T>
struct SolveResult {
  std::vector<T> x;
  SolveStats stats;
};

using ScalarField = std::function<double(double, double, double)>;

// Local b = f(x_ijk) * jw_ijk, then gather-scatter and boundary masking;
// the result is continuous and masked, ready for cg_solve.
template <class T>
std::vector<T> assemble_rhs(const System& sys, const ScalarField& f);

// Unpreconditioned conjugate gradient on the masked SEM operator
// w = mask(QQ^T A_L p), with the p-update fused into the operator pass and
// the x/r updates fused with the rho reduction. Terminates when
// rho_i <= rel_tol^2 * rho_0 or at max_iter. b must be continuous and
// masked; an empty x0 means the zero field. The initial residual uses a
// full operator application charged to the `init` phase, outside the
// per-iteration totals. Scalar reductions accumulate in 64-bit for both
// precisions.
template <class T>
SolveResult<T> cg_solve(const System& sys, Variant variant,
                        std::span<const T> b, std::span<const T> x0,
                        double rel_tol, index_t max_iter);

struct ErrorNorms {
  double linf = 0.0;
  double l2 = 0.0;
};

// Pointwise error against an exact solution; L2 uses the quadrature weights
// and inverse multiplicities so duplicated interface points count once.
template <class T>
ErrorNorms solution_error(const System& sys, std::span<const T> x,
                          const ScalarField& exact);

// Product-of-sines Dirichlet test problem on the unit cube and its forcing.
double manufactured_solution(double x, double y, double z);
double manufactured_forcing(double x, double y, double z);

}  // namespace semcg

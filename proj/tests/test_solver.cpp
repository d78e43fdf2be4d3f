#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "oracle.hpp"
#include "semcg/solver.hpp"

using namespace semcg;
using namespace semcg::testing;

namespace {

std::vector<double> empty_x0;

double inf_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

}  // namespace

TEST_CASE("zero right-hand side converges immediately") {
  const System sys = build_system(box_mesh(2, 1, 1), 2);
  const std::vector<double> b(sys.num_local(), 0.0);
  const auto res = cg_solve<double>(sys, Variant::stored, b, {}, 1e-8, 100);
  CHECK(res.stats.converged);
  CHECK(res.stats.iterations == 0);
  CHECK(res.stats.rho_history == std::vector<double>{0.0});
  CHECK(max_abs(res.x) == 0.0);
}

TEST_CASE("small solve terminates within the interior dof count") {
  const System sys = build_system(box_mesh(2, 2, 2), 2);
  auto b = random_continuous_masked(sys, 3);
  // make it range-consistent: b = A * (random interior field)
  b = masked_operator(sys, Variant::stored, b);

  const auto res = cg_solve<double>(sys, Variant::stored, b, {}, 1e-10, 100);
  CHECK(res.stats.converged);
  CHECK(res.stats.iterations <= 27);  // (2*2-1)^3 interior unique points
  CHECK(res.stats.rho_history.back() <=
        1e-20 * res.stats.rho_history.front());
  CHECK(static_cast<index_t>(res.stats.rho_history.size()) ==
        res.stats.iterations + 1);

  const UniqueOperator uop = probe_unique_operator(sys, Variant::stored);
  const auto oracle = dense_solve(sys, uop, b);
  CHECK(inf_diff(res.x, oracle) <= 1e-8);
}

TEST_CASE("rhs assembly is continuous, masked, and integrates exactly") {
  const System sys = build_system(box_mesh(2, 2, 2), 3);
  const auto zero = assemble_rhs<double>(sys, [](double, double, double) {
    return 0.0;
  });
  CHECK(max_abs(zero) == 0.0);

  const auto b = assemble_rhs<double>(sys, manufactured_forcing);
  for (index_t p = 0; p < sys.num_local(); ++p) {
    if (sys.dofmap.on_boundary[p]) CHECK(b[p] == 0.0);
  }
  const auto layout = unique_layout(sys);
  for (index_t p = 0; p < sys.num_local(); ++p) {
    CHECK(b[p] == b[layout.rep[sys.dofmap.global_id[p]]]);
  }

  // unmasked unit load integrates to the domain volume (quadrature is exact
  // on the constant): sum over unique points of the summed jw equals 1
  std::vector<double> load(sys.geom.jw.begin(), sys.geom.jw.end());
  gather_scatter<double>(load, sys.gsmap);
  const std::vector<double> ones(sys.num_local(), 1.0);
  CHECK(dot3<double>(load, ones, sys.dofmap) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ledger charges match the accounting map exactly") {
  for (Variant variant : {Variant::stored, Variant::remat}) {
    CAPTURE(variant_name(variant));
    const System sys = build_system(box_mesh(2, 2, 2), 3);
    const index_t n = sys.num_local();
    const index_t n_gs = sys.gsmap.traffic_count;
    const auto b = assemble_rhs<double>(sys, manufactured_forcing);
    const index_t iters = 3;
    const auto res = cg_solve<double>(sys, variant, b, {}, 1e-30, iters);
    REQUIRE(res.stats.iterations == iters);
    const Ledger& led = res.stats.ledger;

    const bool stored = variant == Variant::stored;
    const index_t stream = stored ? 13 : 8;
    CHECK(led.at(Phase::op_stream).words() == iters * stream * n);
    CHECK(led.at(Phase::axpy).words() == 0);
    CHECK(led.at(Phase::x_update).words() == iters * 3 * n);
    CHECK(led.at(Phase::reduction_c).words() == iters * 2 * n);
    CHECK(led.at(Phase::reduction_reload).words() == iters * 2 * n);
    CHECK(led.at(Phase::gather_scatter).words() == iters * 2 * n_gs);

    const index_t per_iter = (stored ? 20 : 15) * n + 2 * n_gs;
    CHECK(res.stats.words_per_iteration == per_iter);
    CHECK(led.total(false).words() == iters * per_iter);

    // operator flops sit alone in the op_stream phase
    const index_t op_flops = n * local_flops_per_point(3, variant);
    CHECK(led.at(Phase::op_stream).flops == iters * op_flops);
    CHECK(led.total(false).flops == iters * (op_flops + 12 * n));
    CHECK(res.stats.flops_per_iteration == op_flops + 12 * n);
    CHECK(res.stats.gs_words_per_iteration == 2 * n_gs);

    // init pass is charged separately from the per-iteration totals
    CHECK(led.at(Phase::init).words() ==
          (stored ? 13 : 8) * n + 2 * n_gs);
    CHECK(led.at(Phase::init).flops == op_flops + 4 * n);
  }
}

TEST_CASE("per-iteration charges are constant across iteration counts") {
  const System sys = build_system(box_mesh(2, 2, 1), 2);
  const auto b = assemble_rhs<double>(sys, manufactured_forcing);
  const auto r3 = cg_solve<double>(sys, Variant::stored, b, {}, 1e-30, 3);
  const auto r7 = cg_solve<double>(sys, Variant::stored, b, {}, 1e-30, 7);
  REQUIRE(r3.stats.iterations == 3);
  REQUIRE(r7.stats.iterations == 7);
  for (Phase p : Ledger::phases()) {
    if (p == Phase::init) {
      CHECK(r3.stats.ledger.at(p).words() == r7.stats.ledger.at(p).words());
      continue;
    }
    CHECK(r3.stats.ledger.at(p).words() * 7 ==
          r7.stats.ledger.at(p).words() * 3);
    CHECK(r3.stats.ledger.at(p).flops * 7 ==
          r7.stats.ledger.at(p).flops * 3);
  }
}

TEST_CASE("stored and remat solves produce the same iterates") {
  const System sys =
      build_system(deform_affine(box_mesh(2, 2, 2),
                                 {1, 0.3, 0, 0, 1, 0, 0, 0, 1}, {0, 0, 0}),
                   3);
  const auto b = assemble_rhs<double>(sys, manufactured_forcing);
  for (index_t iters : {1, 3, 10}) {
    const auto s = cg_solve<double>(sys, Variant::stored, b, {}, 1e-30, iters);
    const auto r = cg_solve<double>(sys, Variant::remat, b, {}, 1e-30, iters);
    REQUIRE(s.stats.iterations == iters);
    REQUIRE(r.stats.iterations == iters);
    CHECK(inf_diff(s.x, r.x) <= 1e-10);
  }
}

TEST_CASE("energy-norm error is nonincreasing over the iterates") {
  const System sys = build_system(box_mesh(2, 2, 2), 2);
  auto b = random_continuous_masked(sys, 12);
  b = masked_operator(sys, Variant::stored, b);
  const UniqueOperator uop = probe_unique_operator(sys, Variant::stored);
  const auto exact = dense_solve(sys, uop, b);

  auto a_norm = [&](const std::vector<double>& x) {
    Eigen::VectorXd e(uop.interior_ids.size());
    for (std::size_t i = 0; i < uop.interior_ids.size(); ++i) {
      const index_t rep = uop.rep[uop.interior_ids[i]];
      e(i) = x[rep] - exact[rep];
    }
    return std::sqrt(e.dot(uop.interior * e));
  };

  double prev = a_norm(std::vector<double>(sys.num_local(), 0.0));
  for (index_t k = 1; k <= 10; ++k) {
    const auto res = cg_solve<double>(sys, Variant::stored, b, {}, 1e-30, k);
    REQUIRE(res.stats.iterations == k);
    const double cur = a_norm(res.x);
    CHECK(cur <= prev * (1.0 + 1e-12) + 1e-15);
    prev = cur;
  }
}

TEST_CASE("non-finite data raises a divergence error") {
  const System sys = build_system(box_mesh(2, 1, 1), 2);
  std::vector<double> b(sys.num_local(), 0.0);
  b[0] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(cg_solve<double>(sys, Variant::stored, b, {}, 1e-8, 10),
                  DivergenceError);
}

TEST_CASE("element permutation changes nothing observable") {
  const HexMesh mesh = box_mesh(3, 2, 2);
  const System plain = build_system(mesh, 3);
  const System shuffled = build_system(permute_elements(mesh, 1234), 3);

  const auto b1 = assemble_rhs<double>(plain, manufactured_forcing);
  const auto b2 = assemble_rhs<double>(shuffled, manufactured_forcing);
  const auto r1 = cg_solve<double>(plain, Variant::stored, b1, {}, 1e-10, 500);
  const auto r2 =
      cg_solve<double>(shuffled, Variant::stored, b2, {}, 1e-10, 500);

  CHECK(r1.stats.iterations == r2.stats.iterations);
  for (Phase p : Ledger::phases()) {
    CHECK(r1.stats.ledger.at(p).words() == r2.stats.ledger.at(p).words());
    CHECK(r1.stats.ledger.at(p).flops == r2.stats.ledger.at(p).flops);
  }
  const auto e1 = solution_error<double>(plain, r1.x, manufactured_solution);
  const auto e2 =
      solution_error<double>(shuffled, r2.x, manufactured_solution);
  CHECK(e1.linf == doctest::Approx(e2.linf).epsilon(1e-10));
}

TEST_CASE("32-bit solves run the same algorithm at reduced accuracy") {
  const System sys = build_system(box_mesh(2, 2, 2), 3);
  const auto b64 = assemble_rhs<double>(sys, manufactured_forcing);
  const auto b32 = assemble_rhs<float>(sys, manufactured_forcing);
  const auto r64 = cg_solve<double>(sys, Variant::stored, b64, {}, 1e-8, 500);
  const auto r32 = cg_solve<float>(sys, Variant::stored, b32, {}, 1e-4, 500);
  CHECK(r64.stats.converged);
  CHECK(r32.stats.converged);
  CHECK(r32.stats.precision_bits == 32);
  CHECK(r64.stats.precision_bits == 64);

  const auto e64 = solution_error<double>(sys, r64.x, manufactured_solution);
  const auto e32 = solution_error<float>(sys, r32.x, manufactured_solution);
  // both resolve the same discrete solution; fp32 is bounded by its epsilon
  CHECK(e32.linf <= e64.linf + 1e-4);
  CHECK(std::abs(e32.linf - e64.linf) <= 1e-4);
}

TEST_CASE("bad solve arguments are rejected") {
  const System sys = build_system(box_mesh(1, 1, 1), 2);
  const std::vector<double> b(sys.num_local(), 0.0);
  const std::vector<double> short_b(sys.num_local() - 1, 0.0);
  CHECK_THROWS_AS(
      cg_solve<double>(sys, Variant::stored, short_b, {}, 1e-8, 10),
      std::invalid_argument);
  CHECK_THROWS_AS(cg_solve<double>(sys, Variant::stored, b, short_b, 1e-8, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(cg_solve<double>(sys, Variant::stored, b, {}, 0.0, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(cg_solve<double>(sys, Variant::stored, b, {}, 1e-8, -1),
                  std::invalid_argument);
}

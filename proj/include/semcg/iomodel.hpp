#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semcg/solver.hpp"
#include "semcg/types.hpp"

namespace semcg {

// Problem shape for the analytic model. n is always recomputed from
// (elements, order, dim), never stored.
struct ProblemSpec {
  index_t elements = 1;
  int order = 1;
  int dim = 3;
  index_t iters = 1;

  double n() const;  // elements * (order+1)^dim
};

// Two-level machine: unlimited slow memory behind a fast memory of
// fast_mem_words, with distinct streaming and gather-scatter bandwidths in
// words per cycle. Word size only matters when converting to bytes.
struct MachineSpec {
  std::string name;
  double beta = 0.0;      // theoretical words/cycle
  double beta_eff = 0.0;  // effective words/cycle, streamed phases
  double beta_gs = 0.0;   // words/cycle, gather-scatter phase
  double frequency_hz = 0.0;
  double fast_mem_words = 0.0;
  std::optional<double> power_watts;
};

// Interface points per the fully-connected element model
//   n_gs = n ((N+1)^d - (N-1)^d) / (N+1)^d,
// an upper bound on what a bounded mesh measures (its surface elements have
// unshared faces).
double n_gs_count(const ProblemSpec& prob);

// Traffic lower bounds per iteration count i, clamped at zero (the raw
// expressions go negative for large fast memories, which is vacuous):
//   CG alone:            i (6n - 4S)
//   SEM operator inside: i (13n - 4S)
//   general Ax cost m:   i (6n - 4S + min{2m, m+n})
double q_lower_cg(const ProblemSpec& prob, const MachineSpec& machine);
double q_lower_sem(const ProblemSpec& prob, const MachineSpec& machine);
double q_lower_general(const ProblemSpec& prob, const MachineSpec& machine,
                       double m_words);

// Implementation traffic: i (20n + 2n_gs) stored, i (15n + 2n_gs) remat,
// with n_gs from the fully-connected model.
double q_impl(const ProblemSpec& prob, Variant variant);

// Per-iteration flop counts. `model` rows are the published formulas this
// artifact is reconciled against; `impl` rows are what the kernels in this
// repository execute (see local_laplacian.hpp for the convention).
struct WorkCounts {
  double local_stored = 0;      // n (12(N+1) + 15)   (model == impl)
  double cg_stored = 0;         // n (12(N+1) + 25)   model
  double local_remat = 0;       // n (30(N+1) + 96)   model
  double cg_remat = 0;          // n (30(N+1) + 106)  model
  double local_remat_impl = 0;  // n (12(N+1) + 51)
  double cg_stored_impl = 0;    // n (12(N+1) + 27)
  double cg_remat_impl = 0;     // n (12(N+1) + 63)
};
WorkCounts work_counts(const ProblemSpec& prob);
double work_model(const ProblemSpec& prob, Variant variant);  // per iteration
double work_impl(const ProblemSpec& prob, Variant variant);   // per iteration

// Local-kernel operational intensity in flop/word: stored reads 8 words per
// point, remat 3.
double intensity_stored(int order);      // (12(N+1)+15)/8
double intensity_remat(int order);       // (30(N+1)+96)/3, model accounting
double intensity_remat_impl(int order);  // (12(N+1)+51)/3

// Two-phase runtime: streamed traffic at beta_eff, gather-scatter traffic at
// beta_gs. flop_per_cycle uses the model work count; energy is present when
// the machine carries a power figure.
struct TimeModel {
  double cycles = 0.0;
  double seconds = 0.0;
  double flop_per_cycle = 0.0;
  std::optional<double> energy_joules;
};
TimeModel t_c(const ProblemSpec& prob, const MachineSpec& machine,
              Variant variant);

// Named machine presets for the FPGA board the model was calibrated on
// (4 DDR4 banks at 300 MHz, 512-bit interfaces): "-stored"/"-remat" carry
// the modeled bandwidth fractions, "-measured" the observed ones.
// Throws std::invalid_argument for unknown names.
MachineSpec model_machine_defaults(const std::string& name);
const std::vector<std::string>& machine_preset_names();

// JSON file with fields exactly
// {name, beta, beta_eff, beta_gs, frequency_hz, fast_mem_words, power_watts?}
MachineSpec load_machine_spec(const std::filesystem::path& path);

// Full model evaluation for one (problem, machine, variant).
struct CostReport {
  ProblemSpec prob;
  MachineSpec machine;
  Variant variant = Variant::stored;
  double n = 0;
  double n_gs_model = 0;
  double q_lower_cg = 0;
  double q_lower_sem = 0;
  double q_impl_stored = 0;
  double q_impl_remat = 0;
  WorkCounts work;               // per iteration
  double work_total_model = 0;   // over all iterations, chosen variant
  double work_total_impl = 0;
  double intensity_stored = 0;
  double intensity_remat = 0;
  double intensity_remat_impl = 0;
  TimeModel time;
  // remat/stored per-iteration solver flop ratios at this order
  double work_ratio_model = 0;
  double work_ratio_impl = 0;
};
CostReport analyze(const ProblemSpec& prob, const MachineSpec& machine,
                   Variant variant);

// Ledger-versus-model audit of a finished solve.
struct ReconcilePhaseRow {
  std::string phase;
  index_t measured_words = 0;
  double model_words = 0;  // same accounting, mesh-true n_gs
  double deviation_pct = 0;
};
struct ReconcileReport {
  std::vector<ReconcilePhaseRow> phases;  // totals over all iterations
  index_t measured_words = 0;        // per-iteration phases, all iterations
  double model_words_mesh = 0;       // q_impl with the mesh-true n_gs
  double model_words = 0;            // q_impl with the fully-connected n_gs
  double n_gs_mesh = 0;
  double n_gs_model = 0;
  index_t measured_flops = 0;
  double impl_flops = 0;
  double model_flops = 0;
  double flop_deviation_pct = 0;  // measured vs model
  index_t measured_operator_flops = 0;
  double impl_operator_flops = 0;
  double model_operator_flops = 0;
  double operator_flop_deviation_pct = 0;
  double work_ratio_model = 0;
  double work_ratio_impl = 0;
  // back-solved single-phase bandwidth; zero when no wall time was recorded
  double derived_words_per_second = 0;
  double derived_words_per_cycle = 0;
};
// Requires prob to match the solve (n and iteration count); throws
// std::invalid_argument otherwise.
ReconcileReport reconcile(const SolveStats& stats, const ProblemSpec& prob,
                          const MachineSpec& machine);

}  // namespace semcg

#pragma once

#include <array>
#include <string_view>

#include "semcg/types.hpp"

namespace semcg {

// Accounting phases. The first six mirror the solver's streaming schedule;
// word totals of one iteration split as
//   stored:  13n + 2n + 3n + 2n + 2n_gs
//   remat:    8n + 2n + 3n + 2n + 2n_gs
// across op_stream / reduction_c / x_update / reduction_reload /
// gather_scatter. `axpy` carries only the vector-update flops that are fused
// into the op_stream pass (its words are part of op_stream). `op_local` is
// used by standalone operator applications outside a solve, `init` by the
// initial-residual pass, which sits outside the per-iteration totals.
enum class Phase : int {
  op_stream = 0,
  axpy,
  x_update,
  reduction_c,
  reduction_reload,
  gather_scatter,
  op_local,
  init,
};

inline constexpr int kNumPhases = 8;

struct PhaseCounter {
  index_t words_read = 0;
  index_t words_written = 0;
  index_t flops = 0;
  index_t words() const { return words_read + words_written; }
};

// Algorithm-level traffic and work counters. Charges follow the algorithm's
// accounting map, not whatever the host CPU caches happen to do.
class Ledger {
 public:
  void charge(Phase p, index_t reads, index_t writes, index_t flops);

  const PhaseCounter& at(Phase p) const {
    return counters_[static_cast<int>(p)];
  }

  // Sum over all phases, optionally leaving out the init pass.
  PhaseCounter total(bool include_init = true) const;

  static std::string_view phase_name(Phase p);
  static const std::array<Phase, kNumPhases>& phases();

 private:
  std::array<PhaseCounter, kNumPhases> counters_{};
};

}  // namespace semcg

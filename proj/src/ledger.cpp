#include "semcg/ledger.hpp"

#include <cassert>

namespace semcg {

void Ledger::charge(Phase p, index_t reads, index_t writes, index_t flops) {
  assert(reads >= 0 && writes >= 0 && flops >= 0);
  PhaseCounter& c = counters_[static_cast<int>(p)];
  c.words_read += reads;
  c.words_written += writes;
  c.flops += flops;
}

PhaseCounter Ledger::total(bool include_init) const {
  PhaseCounter t;
  for (Phase p : phases()) {
    if (!include_init && p == Phase::init) continue;
    const PhaseCounter& c = at(p);
    t.words_read += c.words_read;
    t.words_written += c.words_written;
    t.flops += c.flops;
  }
  return t;
}

std::string_view Ledger::phase_name(Phase p) {
  switch (p) {
    case Phase::op_stream: return "op_stream";
    case Phase::axpy: return "axpy";
    case Phase::x_update: return "x_update";
    case Phase::reduction_c: return "reduction_c";
    case Phase::reduction_reload: return "reduction_reload";
    case Phase::gather_scatter: return "gather_scatter";
    case Phase::op_local: return "op_local";
    case Phase::init: return "init";
  }
  return "unknown";
}

const std::array<Phase, kNumPhases>& Ledger::phases() {
  static const std::array<Phase, kNumPhases> all = {
      Phase::op_stream,       Phase::axpy,
      Phase::x_update,        Phase::reduction_c,
      Phase::reduction_reload, Phase::gather_scatter,
      Phase::op_local,        Phase::init,
  };
  return all;
}

}  // namespace semcg

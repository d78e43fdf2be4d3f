#include "semcg/iomodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace semcg {

namespace {

double ipow(double base, int exp) {
  double out = 1.0;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void check_machine(const MachineSpec& m) {
  if (!(m.beta > 0.0) || !(m.beta_eff > 0.0) || m.beta_eff > m.beta ||
      !(m.beta_gs > 0.0) || !(m.frequency_hz > 0.0) ||
      m.fast_mem_words < 0.0) {
    throw std::invalid_argument("machine spec '" + m.name +
                                "' violates 0 < beta_eff <= beta, "
                                "beta_gs > 0, frequency > 0, S >= 0");
  }
}

}  // namespace

double ProblemSpec::n() const {
  return static_cast<double>(elements) * ipow(order + 1.0, dim);
}

double n_gs_count(const ProblemSpec& prob) {
  const double inner = ipow(prob.order + 1.0, prob.dim);
  const double outer = ipow(prob.order - 1.0, prob.dim);
  return prob.n() * (inner - outer) / inner;
}

double q_lower_cg(const ProblemSpec& prob, const MachineSpec& machine) {
  return std::max(0.0, static_cast<double>(prob.iters) *
                           (6.0 * prob.n() - 4.0 * machine.fast_mem_words));
}

double q_lower_sem(const ProblemSpec& prob, const MachineSpec& machine) {
  return std::max(0.0, static_cast<double>(prob.iters) *
                           (13.0 * prob.n() - 4.0 * machine.fast_mem_words));
}

double q_lower_general(const ProblemSpec& prob, const MachineSpec& machine,
                       double m_words) {
  if (m_words < 0.0) {
    throw std::invalid_argument("q_lower_general: m must be nonnegative");
  }
  const double n = prob.n();
  const double ax = std::min(2.0 * m_words, m_words + n);
  return std::max(0.0, static_cast<double>(prob.iters) *
                           (6.0 * n - 4.0 * machine.fast_mem_words + ax));
}

double q_impl(const ProblemSpec& prob, Variant variant) {
  const double per_n = variant == Variant::stored ? 20.0 : 15.0;
  return static_cast<double>(prob.iters) *
         (per_n * prob.n() + 2.0 * n_gs_count(prob));
}

WorkCounts work_counts(const ProblemSpec& prob) {
  const double n = prob.n();
  const double m = prob.order + 1.0;
  WorkCounts wc;
  wc.local_stored = n * (12.0 * m + 15.0);
  wc.cg_stored = n * (12.0 * m + 25.0);
  wc.local_remat = n * (30.0 * m + 96.0);
  wc.cg_remat = n * (30.0 * m + 106.0);
  wc.local_remat_impl = n * (12.0 * m + 51.0);
  wc.cg_stored_impl = n * (12.0 * m + 27.0);
  wc.cg_remat_impl = n * (12.0 * m + 63.0);
  return wc;
}

double work_model(const ProblemSpec& prob, Variant variant) {
  const WorkCounts wc = work_counts(prob);
  return variant == Variant::stored ? wc.cg_stored : wc.cg_remat;
}

double work_impl(const ProblemSpec& prob, Variant variant) {
  const WorkCounts wc = work_counts(prob);
  return variant == Variant::stored ? wc.cg_stored_impl : wc.cg_remat_impl;
}

double intensity_stored(int order) {
  return (12.0 * (order + 1) + 15.0) / 8.0;
}

double intensity_remat(int order) {
  return (30.0 * (order + 1) + 96.0) / 3.0;
}

double intensity_remat_impl(int order) {
  return (12.0 * (order + 1) + 51.0) / 3.0;
}

TimeModel t_c(const ProblemSpec& prob, const MachineSpec& machine,
              Variant variant) {
  check_machine(machine);
  const double q = q_impl(prob, variant);
  const double gs = static_cast<double>(prob.iters) * 2.0 * n_gs_count(prob);
  TimeModel tm;
  tm.cycles = (q - gs) / machine.beta_eff + gs / machine.beta_gs;
  tm.seconds = tm.cycles / machine.frequency_hz;
  const double work = static_cast<double>(prob.iters) *
                      work_model(prob, variant);
  tm.flop_per_cycle = tm.cycles > 0.0 ? work / tm.cycles : 0.0;
  if (machine.power_watts) {
    tm.energy_joules = tm.seconds * *machine.power_watts;
  }
  return tm;
}

namespace {

// DDR4 x4 banks at 300 MHz with 512-bit interfaces: 32 words/cycle at
// 64-bit, 64 at 32-bit. "-stored"/"-remat" carry the modeled effective
// bandwidths (62% resp. 55% of beta, table-rounded; gather-scatter at one
// access per 2.125 cycles, rounded to 0.47); "-measured" carry the observed
// values. Clock rates are the synthesized kernel frequencies.
const std::vector<std::pair<std::string, MachineSpec>>& presets() {
  static const std::vector<std::pair<std::string, MachineSpec>> table = {
      {"fpga-fp64-stored",
       {"fpga-fp64-stored", 32.0, 20.0, 0.47, 204e6, 0.0, 78.7}},
      {"fpga-fp32-stored",
       {"fpga-fp32-stored", 64.0, 40.0, 0.47, 292e6, 0.0, 75.6}},
      {"fpga-fp32-remat",
       {"fpga-fp32-remat", 64.0, 35.0, 0.47, 156e6, 0.0, 76.8}},
      {"fpga-fp64-measured",
       {"fpga-fp64-measured", 32.0, 16.0, 0.53, 204e6, 0.0, 78.7}},
      {"fpga-fp32-measured",
       {"fpga-fp32-measured", 64.0, 22.4, 0.54, 292e6, 0.0, 75.6}},
      {"fpga-fp32-remat-measured",
       {"fpga-fp32-remat-measured", 64.0, 21.6, 0.474, 156e6, 0.0, 76.8}},
  };
  return table;
}

}  // namespace

MachineSpec model_machine_defaults(const std::string& name) {
  for (const auto& [key, spec] : presets()) {
    if (key == name) return spec;
  }
  std::string known;
  for (const auto& [key, spec] : presets()) {
    if (!known.empty()) known += ", ";
    known += key;
  }
  throw std::invalid_argument("unknown machine preset '" + name +
                              "' (known: " + known + ")");
}

const std::vector<std::string>& machine_preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [key, spec] : presets()) out.push_back(key);
    return out;
  }();
  return names;
}

MachineSpec load_machine_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_machine_spec: cannot read " +
                                path.string());
  }
  nlohmann::json doc = nlohmann::json::parse(in);
  MachineSpec m;
  m.name = doc.at("name").get<std::string>();
  m.beta = doc.at("beta").get<double>();
  m.beta_eff = doc.at("beta_eff").get<double>();
  m.beta_gs = doc.at("beta_gs").get<double>();
  m.frequency_hz = doc.at("frequency_hz").get<double>();
  m.fast_mem_words = doc.at("fast_mem_words").get<double>();
  if (doc.contains("power_watts") && !doc["power_watts"].is_null()) {
    m.power_watts = doc["power_watts"].get<double>();
  }
  check_machine(m);
  return m;
}

CostReport analyze(const ProblemSpec& prob, const MachineSpec& machine,
                   Variant variant) {
  CostReport rep;
  rep.prob = prob;
  rep.machine = machine;
  rep.variant = variant;
  rep.n = prob.n();
  rep.n_gs_model = n_gs_count(prob);
  rep.q_lower_cg = q_lower_cg(prob, machine);
  rep.q_lower_sem = q_lower_sem(prob, machine);
  rep.q_impl_stored = q_impl(prob, Variant::stored);
  rep.q_impl_remat = q_impl(prob, Variant::remat);
  rep.work = work_counts(prob);
  rep.work_total_model =
      static_cast<double>(prob.iters) * work_model(prob, variant);
  rep.work_total_impl =
      static_cast<double>(prob.iters) * work_impl(prob, variant);
  rep.intensity_stored = intensity_stored(prob.order);
  rep.intensity_remat = intensity_remat(prob.order);
  rep.intensity_remat_impl = intensity_remat_impl(prob.order);
  rep.time = t_c(prob, machine, variant);
  rep.work_ratio_model = rep.work.cg_remat / rep.work.cg_stored;
  rep.work_ratio_impl = rep.work.cg_remat_impl / rep.work.cg_stored_impl;
  return rep;
}

ReconcileReport reconcile(const SolveStats& stats, const ProblemSpec& prob,
                          const MachineSpec& machine) {
  if (prob.iters != stats.iterations ||
      prob.n() != static_cast<double>(stats.n)) {
    throw std::invalid_argument(
        "reconcile: problem spec does not match the solve (n or iterations)");
  }
  const bool stored = stats.variant == Variant::stored;
  const double n = prob.n();
  const double i = static_cast<double>(stats.iterations);
  const double n_gs_mesh = static_cast<double>(stats.gs_words_per_iteration) / 2.0;

  ReconcileReport rep;
  rep.n_gs_mesh = n_gs_mesh;
  rep.n_gs_model = n_gs_count(prob);

  auto add_row = [&](Phase phase, double model_words) {
    const index_t measured = stats.ledger.at(phase).words();
    double dev = 0.0;
    if (model_words != 0.0) {
      dev = 100.0 * (static_cast<double>(measured) - model_words) / model_words;
    }
    rep.phases.push_back(
        {std::string(Ledger::phase_name(phase)), measured, model_words, dev});
    rep.measured_words += measured;
  };
  add_row(Phase::op_stream, (stored ? 13.0 : 8.0) * n * i);
  add_row(Phase::reduction_c, 2.0 * n * i);
  add_row(Phase::x_update, 3.0 * n * i);
  add_row(Phase::reduction_reload, 2.0 * n * i);
  add_row(Phase::gather_scatter, 2.0 * n_gs_mesh * i);

  rep.model_words_mesh =
      i * ((stored ? 20.0 : 15.0) * n + 2.0 * n_gs_mesh);
  rep.model_words = q_impl(prob, stats.variant);

  rep.measured_flops = stats.ledger.total(false).flops;
  rep.impl_flops = i * work_impl(prob, stats.variant);
  rep.model_flops = i * work_model(prob, stats.variant);
  rep.flop_deviation_pct =
      rep.model_flops > 0.0
          ? 100.0 * (static_cast<double>(rep.measured_flops) - rep.model_flops) /
                rep.model_flops
          : 0.0;

  rep.measured_operator_flops = stats.ledger.at(Phase::op_stream).flops;
  rep.impl_operator_flops =
      i * n * static_cast<double>(local_flops_per_point(stats.order,
                                                        stats.variant));
  const WorkCounts wc = work_counts(prob);
  rep.model_operator_flops = i * (stored ? wc.local_stored : wc.local_remat);
  rep.operator_flop_deviation_pct =
      rep.model_operator_flops > 0.0
          ? 100.0 *
                (static_cast<double>(rep.measured_operator_flops) -
                 rep.model_operator_flops) /
                rep.model_operator_flops
          : 0.0;

  rep.work_ratio_model = wc.cg_remat / wc.cg_stored;
  rep.work_ratio_impl = wc.cg_remat_impl / wc.cg_stored_impl;

  if (stats.wall_time_seconds > 0.0) {
    const double words = static_cast<double>(stats.ledger.total(true).words());
    rep.derived_words_per_second = words / stats.wall_time_seconds;
    rep.derived_words_per_cycle =
        machine.frequency_hz > 0.0
            ? rep.derived_words_per_second / machine.frequency_hz
            : 0.0;
  }
  return rep;
}

}  // namespace semcg

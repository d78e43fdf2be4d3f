#include "semcg/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "semcg/iomodel.hpp"
#include "semcg/solver.hpp"

namespace semcg {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct RunConfig {
  int ex = 4, ey = 4, ez = 4;
  int order = 0;
  std::string variant = "stored";
  int precision = 64;
  double tol = 1e-8;
  index_t max_iter = 1000;
  bool mms = false;
  std::string rhs_path;
  std::vector<double> deform;  // 9 entries when set
  std::vector<double> shift;   // 3 entries when set
  bool permute = false;
  std::uint64_t seed = 0;
  std::string machine = "fpga-fp64-measured";
  index_t elements = 0;  // analyze only
  index_t iters = 1;     // analyze only
  std::string output;
  std::string format = "json";
  bool timing = false;
  std::string save_mesh;
  std::string load_mesh;
};

Variant parse_variant(const std::string& s) {
  if (s == "stored") return Variant::stored;
  if (s == "remat") return Variant::remat;
  throw CLI::ValidationError("--variant", "must be 'stored' or 'remat'");
}

MachineSpec resolve_machine(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) {
    return load_machine_spec(name_or_path);
  }
  return model_machine_defaults(name_or_path);
}

json machine_json(const MachineSpec& m) {
  json j{{"name", m.name},
         {"beta", m.beta},
         {"beta_eff", m.beta_eff},
         {"beta_gs", m.beta_gs},
         {"frequency_hz", m.frequency_hz},
         {"fast_mem_words", m.fast_mem_words}};
  if (m.power_watts) j["power_watts"] = *m.power_watts;
  return j;
}

json ledger_json(const Ledger& ledger) {
  json phases;
  for (Phase p : Ledger::phases()) {
    const PhaseCounter& c = ledger.at(p);
    phases[std::string(Ledger::phase_name(p))] = {
        {"words_read", c.words_read},
        {"words_written", c.words_written},
        {"words", c.words()},
        {"flops", c.flops}};
  }
  const PhaseCounter t = ledger.total(true);
  const PhaseCounter ti = ledger.total(false);
  return json{{"phases", phases},
              {"total", {{"words", t.words()}, {"flops", t.flops}}},
              {"total_excluding_init",
               {{"words", ti.words()}, {"flops", ti.flops}}}};
}

json stats_json(const SolveStats& s, bool timing) {
  json j{{"iterations", s.iterations},
         {"converged", s.converged},
         {"rho_initial", s.rho_history.front()},
         {"rho_final", s.rho_history.back()},
         {"rho_history", s.rho_history},
         {"precision_bits", s.precision_bits},
         {"variant", variant_name(s.variant)},
         {"per_iteration",
          {{"words", s.words_per_iteration},
           {"flops", s.flops_per_iteration},
           {"gather_scatter_words", s.gs_words_per_iteration}}},
         {"ledger", ledger_json(s.ledger)}};
  if (timing) j["wall_time_seconds"] = s.wall_time_seconds;
  return j;
}

json cost_report_json(const CostReport& r) {
  json j{{"n", r.n},
         {"n_gs_model", r.n_gs_model},
         {"q_lower_cg", r.q_lower_cg},
         {"q_lower_sem", r.q_lower_sem},
         {"q_impl_stored", r.q_impl_stored},
         {"q_impl_remat", r.q_impl_remat},
         {"work_per_iteration",
          {{"local_stored", r.work.local_stored},
           {"cg_stored", r.work.cg_stored},
           {"local_remat", r.work.local_remat},
           {"cg_remat", r.work.cg_remat},
           {"local_remat_impl", r.work.local_remat_impl},
           {"cg_stored_impl", r.work.cg_stored_impl},
           {"cg_remat_impl", r.work.cg_remat_impl}}},
         {"work_total_model", r.work_total_model},
         {"work_total_impl", r.work_total_impl},
         {"intensity",
          {{"stored", r.intensity_stored},
           {"remat", r.intensity_remat},
           {"remat_impl", r.intensity_remat_impl}}},
         {"time",
          {{"cycles", r.time.cycles},
           {"seconds", r.time.seconds},
           {"flop_per_cycle", r.time.flop_per_cycle}}},
         {"work_ratio_model", r.work_ratio_model},
         {"work_ratio_impl", r.work_ratio_impl}};
  if (r.time.energy_joules) j["time"]["energy_joules"] = *r.time.energy_joules;
  return j;
}

json reconcile_json(const ReconcileReport& r) {
  json rows = json::array();
  for (const auto& row : r.phases) {
    rows.push_back({{"phase", row.phase},
                    {"measured_words", row.measured_words},
                    {"model_words", row.model_words},
                    {"deviation_pct", row.deviation_pct}});
  }
  json j{{"phases", rows},
         {"measured_words", r.measured_words},
         {"model_words_mesh", r.model_words_mesh},
         {"model_words", r.model_words},
         {"n_gs_mesh", r.n_gs_mesh},
         {"n_gs_model", r.n_gs_model},
         {"measured_flops", r.measured_flops},
         {"impl_flops", r.impl_flops},
         {"model_flops", r.model_flops},
         {"flop_deviation_pct", r.flop_deviation_pct},
         {"measured_operator_flops", r.measured_operator_flops},
         {"impl_operator_flops", r.impl_operator_flops},
         {"model_operator_flops", r.model_operator_flops},
         {"operator_flop_deviation_pct", r.operator_flop_deviation_pct},
         {"work_ratio_model", r.work_ratio_model},
         {"work_ratio_impl", r.work_ratio_impl}};
  if (r.derived_words_per_second > 0.0) {
    j["derived_words_per_second"] = r.derived_words_per_second;
    j["derived_words_per_cycle"] = r.derived_words_per_cycle;
  }
  return j;
}

// CSV is a flattened projection of the JSON document: one "key,value" line
// per scalar, keys joined with dots.
void flatten_json(const json& j, const std::string& prefix,
                  std::ostream& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (j.is_array()) {
    std::size_t i = 0;
    for (const auto& value : j) {
      flatten_json(value, prefix + "." + std::to_string(i++), out);
    }
  } else {
    out << prefix << ',' << j.dump() << '\n';
  }
}

void emit_report(const json& doc, const RunConfig& cfg) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) {
      throw std::invalid_argument("cannot write output file " + cfg.output);
    }
    out = &file;
  }
  if (cfg.format == "csv") {
    *out << "key,value\n";
    flatten_json(doc, "", *out);
  } else {
    *out << doc.dump(2) << '\n';
  }
}

json config_json(const RunConfig& cfg, const std::string& command) {
  json j{{"command", command},      {"ex", cfg.ex},
         {"ey", cfg.ey},            {"ez", cfg.ez},
         {"order", cfg.order},      {"variant", cfg.variant},
         {"precision", cfg.precision}, {"tol", cfg.tol},
         {"max_iter", cfg.max_iter},   {"mms", cfg.mms},
         {"permute", cfg.permute},  {"seed", cfg.seed},
         {"machine", cfg.machine},  {"format", cfg.format},
         {"timing", cfg.timing},    {"elements", cfg.elements},
         {"iters", cfg.iters}};
  if (!cfg.rhs_path.empty()) j["rhs"] = cfg.rhs_path;
  if (!cfg.deform.empty()) j["deform"] = cfg.deform;
  if (!cfg.shift.empty()) j["shift"] = cfg.shift;
  if (!cfg.load_mesh.empty()) j["load_mesh"] = cfg.load_mesh;
  if (!cfg.save_mesh.empty()) j["save_mesh"] = cfg.save_mesh;
  return j;
}

HexMesh make_mesh(const RunConfig& cfg) {
  HexMesh mesh = cfg.load_mesh.empty()
                     ? box_mesh(cfg.ex, cfg.ey, cfg.ez)
                     : load_mesh_json(cfg.load_mesh);
  if (!cfg.deform.empty()) {
    std::array<double, 9> m{};
    std::copy(cfg.deform.begin(), cfg.deform.end(), m.begin());
    std::array<double, 3> s{0.0, 0.0, 0.0};
    if (!cfg.shift.empty()) std::copy(cfg.shift.begin(), cfg.shift.end(), s.begin());
    mesh = deform_affine(mesh, m, s);
  }
  if (cfg.permute) mesh = permute_elements(mesh, cfg.seed);
  if (!cfg.save_mesh.empty()) save_mesh_json(mesh, cfg.save_mesh);
  return mesh;
}

std::vector<double> load_rhs(const std::string& path, index_t n) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read rhs file " + path);
  json doc = json::parse(in);
  std::vector<double> values = doc.at("values").get<std::vector<double>>();
  if (static_cast<index_t>(values.size()) != n) {
    throw std::invalid_argument("rhs file holds " +
                                std::to_string(values.size()) +
                                " values, expected " + std::to_string(n));
  }
  return values;
}

template <class T>
SolveStats run_solve(const System& sys, const RunConfig& cfg, json& result,
                     json* errors) {
  std::vector<T> b;
  if (!cfg.rhs_path.empty()) {
    const auto raw = load_rhs(cfg.rhs_path, sys.num_local());
    b.assign(raw.begin(), raw.end());
  } else {
    b = assemble_rhs<T>(sys, manufactured_forcing);
  }
  const auto sol = cg_solve<T>(sys, parse_variant(cfg.variant), b,
                               std::span<const T>{}, cfg.tol, cfg.max_iter);
  result = stats_json(sol.stats, cfg.timing);
  if (errors && cfg.rhs_path.empty()) {
    const ErrorNorms norms =
        solution_error<T>(sys, sol.x, manufactured_solution);
    *errors = {{"linf", norms.linf}, {"l2", norms.l2}};
  }
  return sol.stats;
}

json problem_json(const System& sys) {
  return json{{"elements", sys.mesh.num_elements()},
              {"order", sys.order()},
              {"points", sys.num_local()},
              {"unique_points", sys.dofmap.num_unique},
              {"interface_points", sys.gsmap.traffic_count}};
}

int cmd_solve(const RunConfig& cfg, bool with_reconcile) {
  const System sys = build_system(make_mesh(cfg), cfg.order);
  json result, errors;
  SolveStats stats;
  if (cfg.precision == 32) {
    stats = run_solve<float>(sys, cfg, result, &errors);
  } else {
    stats = run_solve<double>(sys, cfg, result, &errors);
  }
  json doc{{"schema_version", kSchemaVersion},
           {"config", config_json(cfg, with_reconcile ? "reconcile" : "solve")},
           {"problem", problem_json(sys)},
           {"result", result}};
  if (!errors.is_null()) doc["errors"] = errors;
  if (with_reconcile) {
    const MachineSpec machine = resolve_machine(cfg.machine);
    ProblemSpec prob;
    prob.elements = sys.mesh.num_elements();
    prob.order = cfg.order;
    prob.iters = stats.iterations;
    doc["machine"] = machine_json(machine);
    doc["model"] = cost_report_json(
        analyze(prob, machine, parse_variant(cfg.variant)));
    doc["reconcile"] = reconcile_json(reconcile(stats, prob, machine));
  }
  emit_report(doc, cfg);
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  const MachineSpec machine = resolve_machine(cfg.machine);
  ProblemSpec prob;
  prob.elements = cfg.elements;
  prob.order = cfg.order;
  prob.iters = cfg.iters;
  const CostReport rep = analyze(prob, machine, parse_variant(cfg.variant));
  json doc{{"schema_version", kSchemaVersion},
           {"config", config_json(cfg, "analyze")},
           {"machine", machine_json(machine)},
           {"model", cost_report_json(rep)}};
  emit_report(doc, cfg);
  return 0;
}

int cmd_model(const RunConfig& cfg, bool list_all) {
  json doc{{"schema_version", kSchemaVersion}};
  if (list_all) {
    json machines = json::array();
    for (const auto& name : machine_preset_names()) {
      machines.push_back(machine_json(model_machine_defaults(name)));
    }
    doc["machines"] = machines;
  } else {
    doc["machine"] = machine_json(resolve_machine(cfg.machine));
  }
  emit_report(doc, cfg);
  return 0;
}

void add_output_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("-o,--output", cfg.output, "Report file (default: stdout)");
  app->add_option("--format", cfg.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
}

void add_solve_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--ex", cfg.ex, "Elements along x")->check(CLI::PositiveNumber);
  app->add_option("--ey", cfg.ey, "Elements along y")->check(CLI::PositiveNumber);
  app->add_option("--ez", cfg.ez, "Elements along z")->check(CLI::PositiveNumber);
  app->add_option("--order", cfg.order, "Polynomial order N")
      ->required()
      ->check(CLI::PositiveNumber);
  app->add_option("--variant", cfg.variant, "Operator variant")
      ->check(CLI::IsMember({"stored", "remat"}));
  app->add_option("--precision", cfg.precision, "Working precision in bits")
      ->check(CLI::IsMember({32, 64}));
  app->add_option("--tol", cfg.tol, "Relative tolerance")
      ->check(CLI::PositiveNumber);
  app->add_option("--max-iter", cfg.max_iter, "Iteration cap")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--mms", cfg.mms,
                "Use the manufactured-solution problem (default unless --rhs)");
  app->add_option("--rhs", cfg.rhs_path, "JSON file with a rhs field");
  app->add_option("--deform", cfg.deform,
                  "Affine deformation matrix, 9 row-major entries")
      ->expected(9);
  app->add_option("--shift", cfg.shift, "Affine deformation shift")
      ->expected(3);
  app->add_flag("--permute", cfg.permute, "Shuffle element storage order");
  app->add_option("--seed", cfg.seed, "Seed for all randomness");
  app->add_option("--save-mesh", cfg.save_mesh, "Export the mesh as JSON");
  app->add_option("--load-mesh", cfg.load_mesh,
                  "Load a mesh JSON instead of building a box");
  app->add_flag("--timing", cfg.timing,
                "Include wall-clock time (makes reports non-reproducible)");
  add_output_flags(app, cfg);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Matrix-free spectral-element Poisson solver with an "
               "algorithm-level traffic ledger and bandwidth cost model"};
  app.require_subcommand(1);
  RunConfig cfg;
  bool list_machines = false;

  CLI::App* solve = app.add_subcommand("solve", "Run a CG solve");
  add_solve_flags(solve, cfg);

  CLI::App* analyze_cmd =
      app.add_subcommand("analyze", "Evaluate the cost model, no solve");
  analyze_cmd->add_option("--elements", cfg.elements, "Element count")
      ->required()
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--order", cfg.order, "Polynomial order N")
      ->required()
      ->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--iters", cfg.iters, "Iteration count")
      ->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--variant", cfg.variant, "Operator variant")
      ->check(CLI::IsMember({"stored", "remat"}));
  analyze_cmd->add_option("--machine", cfg.machine,
                          "Machine preset name or JSON file");
  add_output_flags(analyze_cmd, cfg);

  CLI::App* model = app.add_subcommand("model", "Print machine specs");
  model->add_option("--machine", cfg.machine,
                    "Machine preset name or JSON file");
  model->add_flag("--list", list_machines, "Print every preset");
  add_output_flags(model, cfg);

  CLI::App* rec = app.add_subcommand(
      "reconcile", "Run a solve and audit the ledger against the model");
  add_solve_flags(rec, cfg);
  rec->add_option("--machine", cfg.machine,
                  "Machine preset name or JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg, false);
    if (rec->parsed()) return cmd_solve(cfg, true);
    if (analyze_cmd->parsed()) return cmd_analyze(cfg);
    if (model->parsed()) return cmd_model(cfg, list_machines);
  } catch (const OperatorNotSpdError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const DivergenceError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace semcg

#include "wpcsma/cli.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "wpcsma/error.hpp"
#include "wpcsma/report.hpp"
#include "wpcsma/scenario_io.hpp"
#include "wpcsma/simulator.hpp"

namespace wpcsma {
namespace {

namespace fs = std::filesystem;

// Internal consistency limits checked on every analyzed or optimized point.
constexpr double kThroughputFormTol = 1e-9;  // reformulated vs renewal-reward, relative
constexpr double kSlackIdentityTol = 1e-9;   // coefficient vs component form, x budget

std::string tolerance_meta() {
  std::ostringstream os;
  os << "throughput_forms<=" << kThroughputFormTol << " rel; slack_identity<="
     << kSlackIdentityTol << " x budget";
  return os.str();
}

/// Returns one line per violated consistency check.
std::vector<std::string> consistency_failures(const Scenario& s, const OptResult& r) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double a = r.perf.throughput[i];
    const double b = r.perf.throughput_direct[i];
    if (std::abs(a - b) > kThroughputFormTol * std::abs(b)) {
      out.push_back("node " + std::to_string(i) + ": throughput forms disagree (" +
                    format_double(a) + " vs " + format_double(b) + ")");
    }
    const double diff = std::abs(r.slack[i] - r.energy[i].slack());
    if (diff > kSlackIdentityTol * r.energy[i].budget) {
      out.push_back("node " + std::to_string(i) + ": slack forms disagree by " +
                    format_double(diff) + " J");
    }
  }
  return out;
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream f(path);
  if (!f) throw InvalidParameter(path.string() + ": cannot write");
  f << doc.dump(2) << '\n';
}

void print_warnings(const OptResult& r, std::ostream& err) {
  for (const auto& w : r.warnings) err << "warning: " << w << '\n';
}

int finish_decision(const Scenario& s, const OptResult& r, std::ostream& err) {
  const auto failures = consistency_failures(s, r);
  for (const auto& f : failures) err << "tolerance failure: " << f << '\n';
  if (!failures.empty()) return kExitTolerance;
  if (r.status == SolveStatus::iteration_cap) {
    err << "optimizer stopped at the iteration cap without meeting outer_tol\n";
    return kExitTolerance;
  }
  return kExitOk;
}

struct OptimizeOutputs {
  ResultTable results;
  ResultTable trace;
};

OptimizeOutputs write_optimize(const Scenario& s, const OptResult& r, const OptimizerConfig& cfg,
                               const fs::path& out_dir) {
  fs::create_directories(out_dir);
  OptimizeOutputs o{decision_table(s, r), utility_trace_table(r)};
  o.results.add_meta("status", to_string(r.status));
  o.results.add_meta("outer_iterations", std::to_string(r.outer_iterations));
  o.results.add_meta("seed", "none");
  o.results.add_meta("optimizer", optimizer_config_to_json(cfg).dump());
  o.results.add_meta("tolerances", tolerance_meta());
  o.results.add_meta("utility_trace", (out_dir / "utility_trace.csv").string());
  o.results.save(out_dir, "results");
  o.trace.save(out_dir, "utility_trace");
  write_json(out_dir / "point.json", point_to_json(r.decision, r.integer_decision));
  return o;
}

void reproduce_exp1(const Scenario& s, const OptResult& r, const fs::path& out_dir) {
  auto meta = [&](ResultTable& t) {
    t.add_meta("tool_version", kToolVersion);
    t.add_meta("scenario", s.name);
    t.add_meta("assumption", "per-node sample caps 10,20,30,40,50,60");
    t.add_meta("status", to_string(r.status));
    t.add_meta("seed", "none");
    t.add_meta("tolerances", tolerance_meta());
  };
  ResultTable opt_n;
  opt_n.columns = {"node", "n_max", "n_opt"};
  ResultTable energy;
  energy.columns = {"node", "n_max", "energy_consumed_J", "energy_received_J", "slack_J"};
  ResultTable air;
  air.columns = {"node", "n_max", "airtime", "throughput_bps"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cap = s.nodes[i].duty.n_max;
    opt_n.add_row({s.nodes[i].id, cap, r.decision.n[i]});
    energy.add_row({s.nodes[i].id, cap, r.energy[i].e_total, r.energy[i].budget, r.slack[i]});
    air.add_row({s.nodes[i].id, cap, r.perf.airtime[i], r.perf.throughput[i]});
  }
  meta(opt_n);
  meta(energy);
  meta(air);
  opt_n.save(out_dir, "optimal_n");
  energy.save(out_dir, "energy");
  air.save(out_dir, "airtime");
}

void reproduce_exp2(const Scenario& s, const OptResult& r, const fs::path& out_dir) {
  auto meta = [&](ResultTable& t) {
    t.add_meta("tool_version", kToolVersion);
    t.add_meta("scenario", s.name);
    t.add_meta("status", to_string(r.status));
    t.add_meta("seed", "none");
    t.add_meta("tolerances", tolerance_meta());
  };
  ResultTable energy;
  energy.columns = {"node", "phi_W", "rate_bps", "energy_consumed_J", "energy_received_J",
                    "slack_J"};
  ResultTable air;
  air.columns = {"node", "phi_W", "rate_bps", "airtime", "throughput_bps"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& nd = s.nodes[i];
    energy.add_row({nd.id, nd.power.phi, nd.rate, r.energy[i].e_total, r.energy[i].budget,
                    r.slack[i]});
    air.add_row({nd.id, nd.power.phi, nd.rate, r.perf.airtime[i], r.perf.throughput[i]});
  }
  meta(energy);
  meta(air);
  energy.save(out_dir, "energy");
  air.save(out_dir, "airtime");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Proportionally fair attempt-rate and sample-count allocation for "
               "wirelessly powered duty-cycled CSMA/CA nodes",
               "wpcsma"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string scenario_path, point_path, config_path, out_dir;
  std::uint64_t slots = 1'000'000, seed = 1, warmup = 0;
  int replications = 1;
  int exp = 0;
  bool trace = false;

  auto* analyze = app.add_subcommand("analyze", "Evaluate a fixed decision point");
  analyze->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  analyze->add_option("--point", point_path, "Decision point JSON file")->required();
  analyze->add_option("--out", out_dir, "Write analysis.csv/.json here");

  auto* optimize = app.add_subcommand("optimize", "Solve for the proportionally fair allocation");
  optimize->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  optimize->add_option("--config", config_path, "Optimizer settings JSON file");
  optimize->add_option("--out", out_dir, "Output directory")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run at an integer point");
  simulate_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  simulate_cmd->add_option("--point", point_path, "Decision point JSON file")->required();
  simulate_cmd->add_option("--slots", slots, "MAC slots to simulate")->capture_default_str();
  simulate_cmd->add_option("--seed", seed, "PRNG seed")->capture_default_str();
  simulate_cmd->add_option("--warmup", warmup, "Slots excluded from statistics")
      ->capture_default_str();
  simulate_cmd->add_option("--replications", replications, "Independent runs pooled by seed")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--out", out_dir, "Output directory")->required();
  simulate_cmd->add_flag("--trace", trace, "Write the per-slot trace.csv");

  auto* reproduce = app.add_subcommand("reproduce", "Regenerate an evaluation experiment");
  reproduce->add_option("--exp", exp, "Experiment number")->required()->check(CLI::IsMember({1, 2}));
  reproduce->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (analyze->parsed()) {
      const auto s = load_scenario(scenario_path);
      const auto pf = load_point(point_path, s.size());
      if (!pf.continuous) throw InvalidParameter(point_path + ": analyze needs n and alpha");
      const auto r = evaluate_point(s, *pf.continuous);
      print_warnings(r, err);
      auto table = decision_table(s, r);
      table.add_meta("seed", "none");
      table.add_meta("tolerances", tolerance_meta());
      table.write_csv(out);
      if (!out_dir.empty()) table.save(out_dir, "analysis");
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (r.slack[i] < 0.0) {
          err << "warning: node " << s.nodes[i].id << " violates energy neutrality by "
              << format_double(-r.slack[i]) << " J\n";
        }
      }
      return finish_decision(s, r, err);
    }

    if (optimize->parsed()) {
      const auto s = load_scenario(scenario_path);
      const OptimizerConfig cfg =
          config_path.empty() ? OptimizerConfig{} : optimizer_config_from_json(read_json_file(config_path));
      const auto r = solve_bcd(s, cfg);
      print_warnings(r, err);
      const auto o = write_optimize(s, r, cfg, out_dir);
      o.results.write_csv(out);
      return finish_decision(s, r, err);
    }

    if (simulate_cmd->parsed()) {
      const auto s = load_scenario(scenario_path);
      const auto pf = load_point(point_path, s.size());
      const SimPoint point =
          pf.integer ? *pf.integer : SimPoint::from_integer_decision(round_decision(s, *pf.continuous));
      SimConfig cfg;
      cfg.n_slots = slots;
      cfg.seed = seed;
      cfg.warmup_slots = warmup;
      fs::create_directories(out_dir);
      std::ofstream trace_file;
      if (trace) {
        trace_file.open(fs::path(out_dir) / "trace.csv");
        if (!trace_file) throw InvalidParameter(out_dir + "/trace.csv: cannot write");
        cfg.trace = &trace_file;
      }
      const auto st = simulate_replications(s, point, cfg, replications);
      auto per_node = simulation_table(s, point, st);
      auto slots_t = slot_table(s, point, st);
      per_node.add_meta("replications", std::to_string(replications));
      slots_t.add_meta("replications", std::to_string(replications));
      per_node.save(out_dir, "simulation");
      slots_t.save(out_dir, "slots");
      per_node.write_csv(out);
      return kExitOk;
    }

    if (reproduce->parsed()) {
      const auto s = example_scenario(exp);
      const OptimizerConfig cfg;
      const auto r = solve_bcd(s, cfg);
      print_warnings(r, err);
      fs::create_directories(out_dir);
      save_scenario(fs::path(out_dir) / "scenario.json", s);
      const auto o = write_optimize(s, r, cfg, out_dir);
      if (exp == 1) {
        reproduce_exp1(s, r, out_dir);
      } else {
        reproduce_exp2(s, r, out_dir);
      }
      o.results.write_csv(out);
      return finish_decision(s, r, err);
    }
  } catch (const Infeasible& e) {
    err << "infeasible: " << e.what() << '\n';
    for (const auto& line : e.diagnosis()) err << "  " << line << '\n';
    return kExitInfeasible;
  } catch (const InvalidParameter& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const InvalidState& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace wpcsma

#pragma once

// Slot-level Monte Carlo simulator of the duty-cycled CSMA/CA model.
//
// Every node walks its own (A,k)/(S,k) chain one MAC slot at a time. In a
// slot, each active node with counter 0 transmits; no transmitter makes an
// idle slot (sigma), one makes a success (T_i^succ), two or more make a
// collision (T^col). Transmitters then sleep for m_i slots, every other
// counter decrements, and a node leaving (S,0) draws a fresh backoff
// uniformly from {0..W_i-1}. Counters advance once per MAC slot regardless
// of the slot's wall-clock length, mirroring the analytical chain.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "wpcsma/energy_model.hpp"
#include "wpcsma/optimizer.hpp"
#include "wpcsma/scenario.hpp"

namespace wpcsma {

struct SimConfig {
  std::uint64_t n_slots = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t warmup_slots = 0;
  int batches = 20;
  bool record_occupancy = false;
  /// Optional per-slot CSV trace: slot,type,transmitters
  std::ostream* trace = nullptr;

  void validate() const;
};

/// Integer operating point of every node.
struct SimPoint {
  std::vector<int> w;
  std::vector<int> m;
  std::vector<int> n;

  static SimPoint from_integer_decision(const IntegerDecision& d);
  void validate(std::size_t nodes) const;
  /// Attempt odds implied by each node's (W, m).
  std::vector<double> alpha() const;
  std::vector<double> n_real() const;
};

enum class NodeMode { active, sleeping };

struct NodeState {
  NodeMode mode = NodeMode::sleeping;
  int counter = 0;
};

/// Mean per-cycle energy split by component, in joules.
struct CycleEnergy {
  double acq = 0.0;
  double proc = 0.0;
  double backoff = 0.0;
  double data = 0.0;
  double bg = 0.0;
  double total = 0.0;
};

/// 95% confidence half-widths from batch means.
struct HalfWidths {
  double p_idle = 0.0;
  double p_col = 0.0;
  std::vector<double> p_succ;
  std::vector<double> throughput;
  std::vector<double> airtime;
  std::vector<double> energy_per_cycle;
};

struct SimStats {
  std::string rng = "mt19937_64";
  std::uint64_t seed = 0;
  std::uint64_t slots = 0;  // slots that entered the statistics
  double total_time = 0.0;  // s
  std::uint64_t idle_slots = 0;
  std::uint64_t collision_slots = 0;
  std::vector<std::uint64_t> success_slots;
  std::vector<std::uint64_t> collision_participations;
  std::vector<double> delivered_bits;
  std::vector<double> busy_time;  // own success + collision participation, s

  std::vector<double> throughput;  // bits/s
  std::vector<double> airtime;
  double p_idle = 0.0;
  std::vector<double> p_succ;
  double p_col = 0.0;
  std::vector<double> p_col_node;

  std::vector<std::uint64_t> cycles;
  std::vector<CycleEnergy> energy_per_cycle;
  HalfWidths ci_halfwidth;

  /// Slot counts per chain state, filled when SimConfig::record_occupancy is
  /// set: occupancy_active[i][k] for (A,k), occupancy_sleep[i][k] for (S,k).
  std::vector<std::vector<std::uint64_t>> occupancy_active;
  std::vector<std::vector<std::uint64_t>> occupancy_sleep;
};

SimStats simulate(const Scenario& s, const SimPoint& point, const SimConfig& cfg);

/// Runs `replications` independent runs with seeds cfg.seed, cfg.seed+1, ...
/// concurrently and pools them in seed order. Confidence half-widths are
/// computed across replications.
SimStats simulate_replications(const Scenario& s, const SimPoint& point, const SimConfig& cfg,
                               int replications);

struct EnergyComparison {
  CycleEnergy analytical;
  CycleEnergy simulated;
  CycleEnergy relative_error;  // (sim - analytical) / |analytical|, 0 when both vanish
  double total_halfwidth = 0.0;
};

/// Mean simulated per-cycle energy against energy_cycle() at the attempt
/// rates implied by the integer point.
std::vector<EnergyComparison> empirical_energy_check(const Scenario& s, const SimPoint& point,
                                                     const SimStats& stats);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double t_quantile_95(int dof);

}  // namespace wpcsma

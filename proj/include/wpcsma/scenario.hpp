#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wpcsma/timing.hpp"

namespace wpcsma {

/// Duty-cycle shape of a monitoring node. `h` and `g` are in MAC slots; the
/// sample count per cycle is a decision variable and lives outside.
struct DutyCycle {
  double h = 1.0;      // sampling period
  double g = 1.0;      // processing duration
  double n_max = 1.0;  // CPU concurrency cap

  /// Sleep slots per cycle for `n` samples: n*h + g.
  double sleep_slots(double n) const { return n * h + g; }

  friend bool operator==(const DutyCycle&, const DutyCycle&) = default;
};

/// Power draws in watts; `e_bg` is a per-cycle energy in joules.
struct PowerProfile {
  double p_tx = 0.0;
  double p_rx = 0.0;
  double p_listen = 0.0;
  double p_acq = 0.0;
  double p_proc = 0.0;
  double e_bg = 0.0;
  double phi = 0.0;  // received RF power

  friend bool operator==(const PowerProfile&, const PowerProfile&) = default;
};

struct NodeConfig {
  std::string id;
  double l = 0.0;     // payload bits per sample
  double rate = 0.0;  // bits/s
  DutyCycle duty;
  PowerProfile power;

  NodeLinkParams link(double n) const { return NodeLinkParams{l, rate, n}; }

  friend bool operator==(const NodeConfig&, const NodeConfig&) = default;
};

/// A full network description in SI units.
struct Scenario {
  std::string name;
  ProtocolParams protocol;
  std::vector<NodeConfig> nodes;

  std::size_t size() const { return nodes.size(); }

  /// Checks every member invariant; errors name the node and field.
  void validate() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace wpcsma

#pragma once

// Proportionally fair allocation of samples per cycle (n) and attempt odds
// (alpha): maximize sum_i log S_i subject to 1 <= n_i <= n_max_i,
// 0 < alpha_i <= 0.5 and per-node energy neutrality.
//
// The problem is not jointly concave. It is solved by block coordinate
// ascent: the n block and each single alpha_i are difference-of-concave
// problems, handled by iteratively linearizing the subtracted concave term
// N log X and maximizing the resulting separable surrogate in closed form.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpcsma/energy_model.hpp"
#include "wpcsma/mac_model.hpp"
#include "wpcsma/scenario.hpp"

namespace wpcsma {

struct DecisionVector {
  std::vector<double> n;
  std::vector<double> alpha;
};

struct OptimizerConfig {
  double outer_tol = 1e-8;   // relative change of utility and iterates
  double inner_tol = 1e-10;  // relative change of surrogate and block iterates
  int max_outer_iters = 200;
  int max_inner_iters = 100;
  double alpha_floor = 1e-6;
  double alpha_max = 0.5;

  void validate() const;
};

enum class SolveStatus { converged, iteration_cap, infeasible };

const char* to_string(SolveStatus s);

/// Integer operating point derived from a continuous solution.
struct IntegerDecision {
  std::vector<int> n;
  std::vector<int> w;  // max(1, round(recovered W))
  std::vector<int> m;  // n h + g, rounded
  /// Energy slack at (integer n, continuous alpha).
  std::vector<double> slack;
  bool feasible = false;
};

struct OptResult {
  DecisionVector decision;
  double utility = 0.0;
  std::vector<double> utility_trace;  // entry 0 is the initial point
  PerfReport perf;
  std::vector<EnergyBreakdown> energy;
  std::vector<double> slack;  // J
  std::vector<double> recovered_w;
  std::vector<std::string> warnings;
  IntegerDecision integer_decision;
  SolveStatus status = SolveStatus::converged;
  int outer_iterations = 0;
};

/// Closed interval for a single coordinate.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// U = sum_i log S_i (natural log). Throws InvalidState if any S_i <= 0.
double utility(const Scenario& s, const DecisionVector& dv);

/// argmax over [lo, hi] of log(x) - gamma*x. For gamma <= 0 this is hi.
double maximize_log_linear(double gamma, double lo, double hi);

/// Feasible n_i range given alpha: box [1, n_max] intersected with the
/// node's energy constraint, which is linear in n_i. Throws Infeasible when
/// empty.
Interval n_block_interval(const Scenario& s, std::size_t i, std::span<const double> alpha);

/// Feasible alpha_i range given n and the other alphas: own energy
/// constraint (lower bound via b/alpha), every other node's energy
/// constraint (lower bound via the silence product), the floor and 0.5.
/// Throws Infeasible when empty.
Interval alpha_block_interval(const Scenario& s, std::size_t i, std::span<const double> n,
                              std::span<const double> alpha, const OptimizerConfig& cfg);

/// DC iteration on the n block with alpha fixed. `n0` must be feasible.
std::vector<double> solve_n_block(const Scenario& s, std::span<const double> alpha,
                                  std::span<const double> n0, const OptimizerConfig& cfg);

/// DC iteration on alpha_i with n and the other alphas fixed. Returns the
/// new alpha_i.
double solve_alpha_block(const Scenario& s, std::span<const double> n,
                         std::span<const double> alpha, std::size_t i,
                         const OptimizerConfig& cfg);

/// Starting point alpha = alpha_max, n_i at whichever end of [1, n_max_i]
/// gives node i the larger energy slack. Every node's slack is maximized
/// there simultaneously, so if any slack is negative the scenario is
/// infeasible and Infeasible is thrown with one line per offending node.
DecisionVector initial_point(const Scenario& s, const OptimizerConfig& cfg);

/// Block coordinate ascent: n block, then alpha_0..alpha_{N-1} Gauss-Seidel.
OptResult solve_bcd(const Scenario& s, const OptimizerConfig& cfg,
                    const std::optional<DecisionVector>& init = std::nullopt);

/// Evaluates the full result record (perf, energy, slack, integer point)
/// for an arbitrary decision vector.
OptResult evaluate_point(const Scenario& s, const DecisionVector& dv);

IntegerDecision round_decision(const Scenario& s, const DecisionVector& dv);

enum class KktStatus { stationary, at_lower_bound, at_upper_bound, energy_active, violated };

const char* to_string(KktStatus s);

struct KktCoordinate {
  std::string name;  // "n[i]" or "alpha[i]"
  std::size_t node = 0;
  double value = 0.0;
  double derivative = 0.0;  // dU/dx by central differences
  KktStatus status = KktStatus::violated;
};

struct KktReport {
  std::vector<KktCoordinate> coordinates;
  bool ok = true;
};

/// Coordinate-wise first-order check: each coordinate either has
/// |dU/dx| <= tol or sits at a bound / active energy constraint that blocks
/// movement in the ascent direction.
KktReport check_kkt(const Scenario& s, const DecisionVector& dv, double tol,
                    const OptimizerConfig& cfg = {});

}  // namespace wpcsma

#pragma once

#include <span>
#include <vector>

#include "wpcsma/scenario.hpp"

namespace wpcsma {

// --- Attempt-rate conversions -------------------------------------------
//
// A node with contention window W and m sleep slots attempts in a MAC slot
// with probability tau = 2 / (W + 2m + 1). The optimizer works in the odds
// form alpha = tau / (1 - tau), which makes the throughput denominator
// affine in each alpha_i. Every path (optimizer, simulator, reports) goes
// through these helpers.

/// tau = 2/(W+2m+1). Requires w >= 1 and m >= 2 (real values accepted).
double attempt_probability(double w, double m);
double tau_from_alpha(double alpha);
double alpha_from_tau(double tau);
/// W = 2(1+alpha)/alpha - 2m - 1. May be < 1 or non-integral.
double window_from_alpha(double alpha, double m);

/// Stationary distribution of the per-node duty-cycle chain.
/// `active[k]` is b_{A,k} for k = 0..W-1, `sleep[k]` is b_{S,k} for
/// k = 0..m-1.
struct StationaryDistribution {
  std::vector<double> active;
  std::vector<double> sleep;

  double total() const;
};

StationaryDistribution stationary_distribution(int w, int m);

struct SlotProbabilities {
  double p_idle = 0.0;
  std::vector<double> p_succ;
  double p_col = 0.0;
  /// Node i transmits and at least one other node transmits as well.
  std::vector<double> p_col_node;
};

SlotProbabilities slot_probabilities(std::span<const double> taus);

/// Terms of the throughput denominator X, normalized by T^col:
///   X = base + sum_j per_sample[j]*n_j*alpha_j + sum_j overhead[j]*alpha_j
///         + prod_j (1 + alpha_j) - 1
struct XCoefficients {
  double base = 0.0;
  std::vector<double> per_sample;  // (l_j/R_j + T_j^shdr) / T^col
  std::vector<double> overhead;    // T_j^oo / T^col - 1
  double t_col = 0.0;
};

XCoefficients x_coefficients(const Scenario& s);

double x_value(const XCoefficients& c, std::span<const double> n, std::span<const double> alpha);
double x_value(const Scenario& s, std::span<const double> n, std::span<const double> alpha);

struct PerfReport {
  std::vector<double> throughput;         // bits/s, reformulated form
  std::vector<double> throughput_direct;  // bits/s, renewal-reward quotient
  std::vector<double> airtime;
  double x_value = 0.0;
  SlotProbabilities slot_probs;
  double mean_slot_duration = 0.0;  // s
  std::vector<double> tau;
  std::vector<double> window;       // recovered W, may be < 1
  std::vector<double> sleep_slots;  // m = n h + g
  std::vector<double> t_success;    // s
};

/// Per-node throughput and air-time at decision point (n, alpha).
/// Requires alpha_i > 0 and n_i >= 1.
PerfReport throughput(const Scenario& s, std::span<const double> n, std::span<const double> alpha);

}  // namespace wpcsma

#pragma once

#include <cstddef>
#include <span>

#include "wpcsma/scenario.hpp"

namespace wpcsma {

/// Per-cycle energy of one node, in joules.
///
/// `e_backoff` follows the closed-form expectation (T^DIFS + (W-1)/2 sigma) P^L
/// with W recovered from alpha. The alpha <= 0.5 box admits recovered windows
/// below 1 for long sleep periods; the term is then evaluated as is (and may
/// be negative) and `backoff_below_window_floor` is set.
struct EnergyBreakdown {
  double e_acq = 0.0;
  double e_proc = 0.0;
  double e_backoff = 0.0;
  double e_data = 0.0;
  double e_tx_total = 0.0;  // e_backoff + e_data
  double e_bg = 0.0;
  double e_total = 0.0;
  double budget = 0.0;  // phi * m * sigma
  double window = 0.0;  // recovered W
  bool backoff_below_window_floor = false;

  double slack() const { return budget - e_total; }
};

/// Coefficient form of the energy-neutrality constraint for node i:
///   a n_i + b/alpha_i + (c n_i + d) prod_{j != i} 1/(1+alpha_j) <= f
struct EnergyCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double f = 0.0;
  double per_sample_acq = 0.0;   // P^A sigma
  double per_sample_proc = 0.0;  // P^P g sigma
};

/// Energy of one transmission attempt by outcome, and its expectation.
struct DataEnergy {
  double per_success = 0.0;    // epsilon^A-MSDU
  double per_collision = 0.0;  // epsilon^col
  double p_success = 0.0;      // prod_{j != i} (1 - tau_j)
  double expected = 0.0;
};

/// Expected listening energy of one backoff with window `w` (w >= 1).
double energy_backoff(const ProtocolParams& p, const PowerProfile& power, double w);

DataEnergy energy_data(const ProtocolParams& p, const PowerProfile& power,
                       const NodeLinkParams& link, std::span<const double> taus_others);

/// prod_{j != i} 1/(1+alpha_j)
double others_silence(std::span<const double> alpha, std::size_t i);

EnergyBreakdown energy_cycle(const Scenario& s, std::size_t i, std::span<const double> n,
                             std::span<const double> alpha);

EnergyCoefficients energy_coefficients(const Scenario& s, std::size_t i);

/// f - a n_i - b/alpha_i - (c n_i + d) prod_{j != i} 1/(1+alpha_j).
/// Non-negative exactly when node i is energy neutral.
double constraint_slack(const Scenario& s, std::size_t i, std::span<const double> n,
                        std::span<const double> alpha);
double constraint_slack(const EnergyCoefficients& c, std::size_t i, std::span<const double> n,
                        std::span<const double> alpha);

}  // namespace wpcsma

#include "wpcsma/mac_model.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "wpcsma/error.hpp"

namespace wpcsma {
namespace {

void check_decision(std::size_t nodes, std::span<const double> n, std::span<const double> alpha) {
  if (n.size() != nodes || alpha.size() != nodes) {
    throw InvalidParameter("decision vector size does not match node count");
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    if (!(alpha[i] > 0.0) || !std::isfinite(alpha[i])) {
      throw InvalidParameter("alpha[" + std::to_string(i) + "] must be positive");
    }
    if (!(n[i] >= 1.0) || !std::isfinite(n[i])) {
      throw InvalidParameter("n[" + std::to_string(i) + "] must be >= 1");
    }
  }
}

}  // namespace

double attempt_probability(double w, double m) {
  if (!(w >= 1.0)) throw InvalidParameter("contention window must be >= 1");
  if (!(m >= 2.0)) throw InvalidParameter("sleep slots m must be >= 2");
  return 2.0 / (w + 2.0 * m + 1.0);
}

double tau_from_alpha(double alpha) { return alpha / (1.0 + alpha); }

double alpha_from_tau(double tau) { return tau / (1.0 - tau); }

double window_from_alpha(double alpha, double m) {
  return 2.0 * (1.0 + alpha) / alpha - 2.0 * m - 1.0;
}

double StationaryDistribution::total() const {
  return std::accumulate(active.begin(), active.end(), 0.0) +
         std::accumulate(sleep.begin(), sleep.end(), 0.0);
}

StationaryDistribution stationary_distribution(int w, int m) {
  if (w < 1) throw InvalidParameter("contention window must be >= 1");
  if (m < 2) throw InvalidParameter("sleep slots m must be >= 2");
  const double b0 = attempt_probability(w, m);
  StationaryDistribution b;
  b.active.resize(static_cast<std::size_t>(w));
  for (int k = 0; k < w; ++k) {
    b.active[static_cast<std::size_t>(k)] = static_cast<double>(w - k) / w * b0;
  }
  b.sleep.assign(static_cast<std::size_t>(m), b0);
  return b;
}

SlotProbabilities slot_probabilities(std::span<const double> taus) {
  const std::size_t n = taus.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(taus[i] > 0.0 && taus[i] < 1.0)) {
      throw InvalidParameter("tau[" + std::to_string(i) + "] must lie in (0,1)");
    }
  }
  SlotProbabilities out;
  out.p_succ.resize(n);
  out.p_col_node.resize(n);
  out.p_idle = 1.0;
  for (double t : taus) out.p_idle *= 1.0 - t;

  double succ_total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double others_silent = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others_silent *= 1.0 - taus[j];
    }
    out.p_succ[i] = taus[i] * others_silent;
    out.p_col_node[i] = taus[i] * (1.0 - others_silent);
    succ_total += out.p_succ[i];
  }
  out.p_col = 1.0 - out.p_idle - succ_total;
  // Guard against a tiny negative remainder from rounding.
  if (out.p_col < 0.0 && out.p_col > -1e-15) out.p_col = 0.0;
  return out;
}

XCoefficients x_coefficients(const Scenario& s) {
  XCoefficients c;
  const auto col = t_collision(s.protocol);
  c.t_col = col.total;
  c.base = s.protocol.sigma / col.total;
  c.per_sample.reserve(s.size());
  c.overhead.reserve(s.size());
  for (const auto& node : s.nodes) {
    c.per_sample.push_back(per_sample_airtime(s.protocol, node.l, node.rate) / col.total);
    c.overhead.push_back(t_success(s.protocol, node.link(0.0)).overhead / col.total - 1.0);
  }
  return c;
}

double x_value(const XCoefficients& c, std::span<const double> n, std::span<const double> alpha) {
  check_decision(c.per_sample.size(), n, alpha);
  double x = c.base;
  double prod = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    x += c.per_sample[j] * n[j] * alpha[j] + c.overhead[j] * alpha[j];
    prod *= 1.0 + alpha[j];
  }
  return x + (prod - 1.0);
}

double x_value(const Scenario& s, std::span<const double> n, std::span<const double> alpha) {
  return x_value(x_coefficients(s), n, alpha);
}

PerfReport throughput(const Scenario& s, std::span<const double> n, std::span<const double> alpha) {
  const auto coeffs = x_coefficients(s);
  PerfReport r;
  r.x_value = x_value(coeffs, n, alpha);
  const std::size_t count = s.size();
  const double t_col = coeffs.t_col;

  r.tau.resize(count);
  r.window.resize(count);
  r.sleep_slots.resize(count);
  r.t_success.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    r.tau[i] = tau_from_alpha(alpha[i]);
    r.sleep_slots[i] = s.nodes[i].duty.sleep_slots(n[i]);
    r.window[i] = window_from_alpha(alpha[i], r.sleep_slots[i]);
    r.t_success[i] = t_success(s.protocol, s.nodes[i].link(n[i])).total;
  }
  r.slot_probs = slot_probabilities(r.tau);
  const auto& sp = r.slot_probs;

  double mean_slot = sp.p_idle * s.protocol.sigma + sp.p_col * t_col;
  for (std::size_t j = 0; j < count; ++j) mean_slot += sp.p_succ[j] * r.t_success[j];
  r.mean_slot_duration = mean_slot;

  r.throughput.resize(count);
  r.throughput_direct.resize(count);
  r.airtime.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double bits = n[i] * s.nodes[i].l;
    r.throughput[i] = alpha[i] * bits / (r.x_value * t_col);
    r.throughput_direct[i] = bits * sp.p_succ[i] / mean_slot;
    r.airtime[i] = (sp.p_succ[i] * r.t_success[i] + sp.p_col_node[i] * t_col) / mean_slot;
  }
  return r;
}

}  // namespace wpcsma

#include "wpcsma/energy_model.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "wpcsma/error.hpp"
#include "wpcsma/mac_model.hpp"

namespace wpcsma {
namespace {

void check_index(const Scenario& s, std::size_t i, std::span<const double> n,
                 std::span<const double> alpha) {
  if (i >= s.size()) throw InvalidParameter("node index out of range");
  if (n.size() != s.size() || alpha.size() != s.size()) {
    throw InvalidParameter("decision vector size does not match node count");
  }
}

}  // namespace

double energy_backoff(const ProtocolParams& p, const PowerProfile& power, double w) {
  if (!(w >= 1.0)) throw InvalidParameter("contention window must be >= 1");
  return (p.t_difs + (w - 1.0) / 2.0 * p.sigma) * power.p_listen;
}

DataEnergy energy_data(const ProtocolParams& p, const PowerProfile& power,
                       const NodeLinkParams& link, std::span<const double> taus_others) {
  DataEnergy e;
  e.p_success = 1.0;
  for (std::size_t j = 0; j < taus_others.size(); ++j) {
    const double t = taus_others[j];
    if (!(t > 0.0 && t < 1.0)) {
      throw InvalidParameter("peer tau[" + std::to_string(j) + "] must lie in (0,1)");
    }
    e.p_success *= 1.0 - t;
  }
  const auto col = t_collision(p);
  e.per_success = (p.t_rts + t_amsdu(p, link)) * power.p_tx +
                  (p.t_cts + p.t_ack) * power.p_rx + 2.0 * p.t_sifs * power.p_listen;
  e.per_collision = p.t_rts * power.p_tx + col.timeout * power.p_listen;
  e.expected = e.p_success * e.per_success + (1.0 - e.p_success) * e.per_collision;
  return e;
}

double others_silence(std::span<const double> alpha, std::size_t i) {
  double prod = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (j != i) prod /= 1.0 + alpha[j];
  }
  return prod;
}

EnergyBreakdown energy_cycle(const Scenario& s, std::size_t i, std::span<const double> n,
                             std::span<const double> alpha) {
  check_index(s, i, n, alpha);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (!(alpha[j] > 0.0)) throw InvalidParameter("alpha[" + std::to_string(j) + "] must be positive");
  }
  const auto& node = s.nodes[i];
  const auto& p = s.protocol;
  const double m = node.duty.sleep_slots(n[i]);

  EnergyBreakdown e;
  e.e_acq = n[i] * node.power.p_acq * p.sigma;
  e.e_proc = n[i] * node.power.p_proc * node.duty.g * p.sigma;
  e.window = window_from_alpha(alpha[i], m);
  e.backoff_below_window_floor = e.window < 1.0;
  // Same expectation as energy_backoff(), evaluated without the W >= 1 guard.
  e.e_backoff = (p.t_difs + (e.window - 1.0) / 2.0 * p.sigma) * node.power.p_listen;

  std::vector<double> taus_others;
  taus_others.reserve(s.size());
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j != i) taus_others.push_back(tau_from_alpha(alpha[j]));
  }
  e.e_data = energy_data(p, node.power, node.link(n[i]), taus_others).expected;
  e.e_tx_total = e.e_backoff + e.e_data;
  e.e_bg = node.power.e_bg;
  e.e_total = e.e_acq + e.e_proc + e.e_tx_total + e.e_bg;
  e.budget = node.power.phi * m * p.sigma;
  return e;
}

EnergyCoefficients energy_coefficients(const Scenario& s, std::size_t i) {
  if (i >= s.size()) throw InvalidParameter("node index out of range");
  const auto& node = s.nodes[i];
  const auto& p = s.protocol;
  const auto& pw = node.power;
  const auto col = t_collision(p);
  const double sigma = p.sigma;

  EnergyCoefficients c;
  c.per_sample_acq = pw.p_acq * sigma;
  c.per_sample_proc = pw.p_proc * node.duty.g * sigma;
  c.a = c.per_sample_acq + c.per_sample_proc - (pw.phi + pw.p_listen) * node.duty.h * sigma;
  c.b = sigma * pw.p_listen;
  c.c = per_sample_airtime(p, node.l, node.rate) * pw.p_tx;
  c.d = (p.t_cts + p.t_ack) * pw.p_rx + (2.0 * p.t_sifs - col.timeout) * pw.p_listen +
        overhead_t_o(p, node.rate) * pw.p_tx;
  c.f = pw.phi * node.duty.g * sigma - pw.e_bg -
        (p.t_difs + col.timeout - node.duty.g * sigma) * pw.p_listen - p.t_rts * pw.p_tx;
  return c;
}

double constraint_slack(const EnergyCoefficients& c, std::size_t i, std::span<const double> n,
                        std::span<const double> alpha) {
  if (i >= n.size() || n.size() != alpha.size()) throw InvalidParameter("bad decision vector");
  if (!(alpha[i] > 0.0)) throw InvalidParameter("alpha[" + std::to_string(i) + "] must be positive");
  const double silence = others_silence(alpha, i);
  return c.f - c.a * n[i] - c.b / alpha[i] - (c.c * n[i] + c.d) * silence;
}

double constraint_slack(const Scenario& s, std::size_t i, std::span<const double> n,
                        std::span<const double> alpha) {
  check_index(s, i, n, alpha);
  return constraint_slack(energy_coefficients(s, i), i, n, alpha);
}

}  // namespace wpcsma

#include "wpcsma/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wpcsma/error.hpp"

namespace wpcsma {
namespace {

constexpr double kSlackAllowance = 1e-9;  // fraction of the budget

std::string node_label(const Scenario& s, std::size_t i) {
  std::ostringstream os;
  os << "node " << i;
  if (!s.nodes[i].id.empty()) os << " (" << s.nodes[i].id << ")";
  return os.str();
}

std::vector<EnergyCoefficients> all_coefficients(const Scenario& s) {
  std::vector<EnergyCoefficients> out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(energy_coefficients(s, i));
  return out;
}

// sum_i log S_i written through X; no range checks so finite differences can
// step slightly outside the box.
double utility_raw(const Scenario& s, const XCoefficients& xc, std::span<const double> n,
                   std::span<const double> alpha) {
  double x = xc.base;
  double prod = 1.0;
  double logs = 0.0;
  for (std::size_t j = 0; j < n.size(); ++j) {
    x += xc.per_sample[j] * n[j] * alpha[j] + xc.overhead[j] * alpha[j];
    prod *= 1.0 + alpha[j];
    logs += std::log(alpha[j] * n[j] * s.nodes[j].l);
  }
  x += prod - 1.0;
  return logs - static_cast<double>(n.size()) * std::log(x * xc.t_col);
}

bool converged(double prev, double next, double tol) {
  return std::abs(next - prev) <= tol * std::max(1.0, std::abs(next));
}

// The objective is flat near a block optimum, so a small objective change
// alone can stop far from it; iterates must settle as well.
bool settled(std::span<const double> prev, std::span<const double> next, double tol) {
  for (std::size_t i = 0; i < next.size(); ++i) {
    if (std::abs(next[i] - prev[i]) > tol * std::abs(next[i])) return false;
  }
  return true;
}

void check_transmission_energy_positive(const Scenario& s,
                                        const std::vector<EnergyCoefficients>& coeffs) {
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!(coeffs[i].c + coeffs[i].d > 0.0)) {
      throw InvalidParameter(node_label(s, i) +
                             ": successful A-MSDU must cost more energy than a collision "
                             "(c + d > 0) for the energy constraints to be convex");
    }
  }
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) throw InvalidParameter("tolerances must be positive");
  if (max_outer_iters < 1 || max_inner_iters < 1) throw InvalidParameter("iteration caps must be >= 1");
  if (!(alpha_floor > 0.0) || !(alpha_max > alpha_floor)) {
    throw InvalidParameter("need 0 < alpha_floor < alpha_max");
  }
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::iteration_cap: return "iteration-cap";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

const char* to_string(KktStatus s) {
  switch (s) {
    case KktStatus::stationary: return "stationary";
    case KktStatus::at_lower_bound: return "at-lower-bound";
    case KktStatus::at_upper_bound: return "at-upper-bound";
    case KktStatus::energy_active: return "energy-active";
    case KktStatus::violated: return "violated";
  }
  return "unknown";
}

double utility(const Scenario& s, const DecisionVector& dv) {
  const auto perf = throughput(s, dv.n, dv.alpha);
  double u = 0.0;
  for (std::size_t i = 0; i < perf.throughput.size(); ++i) {
    if (!(perf.throughput[i] > 0.0)) {
      throw InvalidState("throughput of node " + std::to_string(i) + " is not positive");
    }
    u += std::log(perf.throughput[i]);
  }
  return u;
}

double maximize_log_linear(double gamma, double lo, double hi) {
  if (!(lo <= hi)) throw InvalidParameter("empty interval");
  if (!(gamma > 0.0)) return hi;
  return std::clamp(1.0 / gamma, lo, hi);
}

Interval n_block_interval(const Scenario& s, std::size_t i, std::span<const double> alpha) {
  const auto c = energy_coefficients(s, i);
  const double silence = others_silence(alpha, i);
  const double coef = c.a + c.c * silence;
  const double rhs = c.f - c.b / alpha[i] - c.d * silence;
  Interval out{1.0, s.nodes[i].duty.n_max};
  if (coef > 0.0) {
    out.hi = std::min(out.hi, rhs / coef);
  } else if (coef < 0.0) {
    out.lo = std::max(out.lo, rhs / coef);
  } else if (rhs < 0.0) {
    out.hi = out.lo - 1.0;
  }
  // Rounding on a binding constraint can leave lo a hair above hi.
  if (out.lo > out.hi && out.lo - out.hi <= 1e-12 * std::max(1.0, out.hi)) out.lo = out.hi;
  if (out.lo > out.hi) {
    std::ostringstream os;
    os << node_label(s, i) << ": no sample count in [1, " << s.nodes[i].duty.n_max
       << "] satisfies the energy budget at the current attempt rates (energy-feasible n range ["
       << out.lo << ", " << out.hi << "])";
    throw Infeasible(os.str(), {os.str()}, i);
  }
  return out;
}

Interval alpha_block_interval(const Scenario& s, std::size_t i, std::span<const double> n,
                              std::span<const double> alpha, const OptimizerConfig& cfg) {
  Interval out{cfg.alpha_floor, cfg.alpha_max};
  const auto own = energy_coefficients(s, i);
  const double own_rhs = own.f - own.a * n[i] - (own.c * n[i] + own.d) * others_silence(alpha, i);
  if (!(own_rhs > 0.0)) {
    std::ostringstream os;
    os << node_label(s, i) << ": energy budget cannot cover acquisition, processing and data "
       << "transmission at any attempt rate (remaining budget " << own_rhs << " J)";
    throw Infeasible(os.str(), {os.str()}, i);
  }
  out.lo = std::max(out.lo, own.b / own_rhs);

  for (std::size_t j = 0; j < s.size(); ++j) {
    if (j == i) continue;
    const auto cj = energy_coefficients(s, j);
    const double rhs = cj.f - cj.a * n[j] - cj.b / alpha[j];
    double silence = 1.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (k != i && k != j) silence /= 1.0 + alpha[k];
    }
    const double load = (cj.c * n[j] + cj.d) * silence;
    if (!(rhs > 0.0)) {
      std::ostringstream os;
      os << node_label(s, j) << ": energy budget exhausted before data transmission; no choice of "
         << "alpha[" << i << "] can restore it";
      throw Infeasible(os.str(), {os.str()}, j);
    }
    out.lo = std::max(out.lo, load / rhs - 1.0);
  }
  if (out.lo > out.hi && out.lo - out.hi <= 1e-12) out.lo = out.hi;
  if (out.lo > out.hi) {
    std::ostringstream os;
    os << node_label(s, i) << ": energy constraints require alpha >= " << out.lo
       << " which exceeds the admissible maximum " << out.hi;
    throw Infeasible(os.str(), {os.str()}, i);
  }
  return out;
}

std::vector<double> solve_n_block(const Scenario& s, std::span<const double> alpha,
                                  std::span<const double> n0, const OptimizerConfig& cfg) {
  const std::size_t count = s.size();
  const auto xc = x_coefficients(s);
  const double big_n = static_cast<double>(count);

  std::vector<Interval> box(count);
  for (std::size_t i = 0; i < count; ++i) box[i] = n_block_interval(s, i, alpha);

  auto objective = [&](std::span<const double> n) {
    double sum_log = 0.0;
    for (double v : n) sum_log += std::log(v);
    return sum_log - big_n * std::log(x_value(xc, n, alpha));
  };

  std::vector<double> n(n0.begin(), n0.end());
  for (std::size_t i = 0; i < count; ++i) n[i] = std::clamp(n[i], box[i].lo, box[i].hi);
  double f = objective(n);
  for (int k = 0; k < cfg.max_inner_iters; ++k) {
    const double x = x_value(xc, n, alpha);
    std::vector<double> next(count);
    for (std::size_t i = 0; i < count; ++i) {
      // Gradient of N log X in n_i, the slope of the linearized term.
      const double gamma = big_n * xc.per_sample[i] * alpha[i] / x;
      next[i] = maximize_log_linear(gamma, box[i].lo, box[i].hi);
    }
    const double f_next = objective(next);
    const bool done = converged(f, f_next, cfg.inner_tol) && settled(n, next, cfg.inner_tol);
    n = std::move(next);
    f = f_next;
    if (done) break;
  }
  return n;
}

double solve_alpha_block(const Scenario& s, std::span<const double> n,
                         std::span<const double> alpha, std::size_t i,
                         const OptimizerConfig& cfg) {
  const auto xc = x_coefficients(s);
  const double big_n = static_cast<double>(s.size());
  const Interval box = alpha_block_interval(s, i, n, alpha, cfg);

  std::vector<double> a(alpha.begin(), alpha.end());
  double others_growth = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j != i) others_growth *= 1.0 + a[j];
  }
  // X is affine in alpha_i with this slope.
  const double slope = xc.per_sample[i] * n[i] + xc.overhead[i] + others_growth;

  a[i] = std::clamp(a[i], box.lo, box.hi);
  auto objective = [&](double ai) {
    a[i] = ai;
    return std::log(ai) - big_n * std::log(x_value(xc, n, a));
  };
  double current = a[i];
  double f = objective(current);
  for (int k = 0; k < cfg.max_inner_iters; ++k) {
    a[i] = current;
    const double grad_q = big_n * slope / x_value(xc, n, a);
    const double next = maximize_log_linear(grad_q, box.lo, box.hi);
    const double f_next = objective(next);
    const bool done = converged(f, f_next, cfg.inner_tol) &&
                      std::abs(next - current) <= cfg.inner_tol * next;
    current = next;
    f = f_next;
    if (done) break;
  }
  return current;
}

DecisionVector initial_point(const Scenario& s, const OptimizerConfig& cfg) {
  const std::size_t count = s.size();
  DecisionVector dv;
  dv.alpha.assign(count, cfg.alpha_max);
  dv.n.resize(count);
  const auto coeffs = all_coefficients(s);
  check_transmission_energy_positive(s, coeffs);

  for (std::size_t i = 0; i < count; ++i) {
    const double silence = others_silence(dv.alpha, i);
    // Slack is affine in n_i with slope -(a + c*silence).
    dv.n[i] = (coeffs[i].a + coeffs[i].c * silence < 0.0) ? s.nodes[i].duty.n_max : 1.0;
  }

  std::vector<std::string> diagnosis;
  for (std::size_t i = 0; i < count; ++i) {
    const double slack = constraint_slack(coeffs[i], i, dv.n, dv.alpha);
    if (slack < 0.0) {
      const auto e = energy_cycle(s, i, dv.n, dv.alpha);
      std::ostringstream os;
      os << node_label(s, i) << ": best achievable energy slack " << slack << " J (consumes "
         << e.e_total << " J vs harvested " << e.budget << " J per cycle at n=" << dv.n[i]
         << ", alpha=" << cfg.alpha_max << " for all nodes)";
      diagnosis.push_back(os.str());
    }
  }
  if (!diagnosis.empty()) {
    throw Infeasible("energy neutrality cannot be met by any admissible (n, alpha)",
                     std::move(diagnosis));
  }
  return dv;
}

IntegerDecision round_decision(const Scenario& s, const DecisionVector& dv) {
  IntegerDecision out;
  const std::size_t count = s.size();
  out.n.resize(count);
  out.w.resize(count);
  out.m.resize(count);
  out.slack.resize(count);
  out.feasible = true;
  std::vector<double> n_int(dv.n);
  for (std::size_t i = 0; i < count; ++i) {
    const auto c = energy_coefficients(s, i);
    const int cap = static_cast<int>(std::floor(s.nodes[i].duty.n_max + 1e-9));
    int v = std::clamp(static_cast<int>(std::floor(dv.n[i] + 1e-9)), 1, std::max(cap, 1));
    // Slack of node i only depends on its own n, so nodes are independent here.
    auto slack_at = [&](int value) {
      n_int[i] = value;
      return constraint_slack(c, i, n_int, dv.alpha);
    };
    // Same allowance as the continuous solution: a binding constraint may
    // land a rounding error below zero.
    auto ok = [&](int value) {
      const double budget = s.nodes[i].power.phi * s.nodes[i].duty.sleep_slots(value) *
                            s.protocol.sigma;
      return slack_at(value) >= -kSlackAllowance * budget;
    };
    while (v < cap && !ok(v)) ++v;
    while (v < cap && ok(v + 1)) ++v;
    out.n[i] = v;
    if (!ok(v)) out.feasible = false;
    out.slack[i] = slack_at(v);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double m = s.nodes[i].duty.sleep_slots(out.n[i]);
    out.m[i] = static_cast<int>(std::lround(m));
    const double w = window_from_alpha(dv.alpha[i], m);
    out.w[i] = std::max(1, static_cast<int>(std::lround(std::max(w, 1.0))));
  }
  return out;
}

OptResult evaluate_point(const Scenario& s, const DecisionVector& dv) {
  OptResult r;
  r.decision = dv;
  r.utility = utility(s, dv);
  r.perf = throughput(s, dv.n, dv.alpha);
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.energy.push_back(energy_cycle(s, i, dv.n, dv.alpha));
    r.slack.push_back(constraint_slack(s, i, dv.n, dv.alpha));
    r.recovered_w.push_back(r.perf.window[i]);
    if (r.perf.window[i] < 1.0) {
      std::ostringstream os;
      os << node_label(s, i) << ": recovered contention window " << r.perf.window[i]
         << " < 1 (alpha " << dv.alpha[i] << " exceeds what m = " << r.perf.sleep_slots[i]
         << " sleep slots allows)";
      r.warnings.push_back(os.str());
    }
  }
  r.integer_decision = round_decision(s, dv);
  return r;
}

OptResult solve_bcd(const Scenario& s, const OptimizerConfig& cfg,
                    const std::optional<DecisionVector>& init) {
  cfg.validate();
  s.validate();
  const auto coeffs = all_coefficients(s);
  check_transmission_energy_positive(s, coeffs);

  DecisionVector dv = init ? *init : initial_point(s, cfg);
  if (dv.n.size() != s.size() || dv.alpha.size() != s.size()) {
    throw InvalidParameter("initial decision vector size does not match node count");
  }
  std::vector<std::string> diagnosis;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double slack = constraint_slack(coeffs[i], i, dv.n, dv.alpha);
    const double budget = s.nodes[i].power.phi * s.nodes[i].duty.sleep_slots(dv.n[i]) *
                          s.protocol.sigma;
    if (slack < -kSlackAllowance * budget) {
      std::ostringstream os;
      os << node_label(s, i) << ": initial point violates energy neutrality by " << -slack << " J";
      diagnosis.push_back(os.str());
    }
  }
  if (!diagnosis.empty()) throw Infeasible("infeasible initialization", std::move(diagnosis));

  std::vector<double> trace{utility(s, dv)};
  SolveStatus status = SolveStatus::iteration_cap;
  int iter = 0;
  for (; iter < cfg.max_outer_iters; ++iter) {
    const DecisionVector prev = dv;
    dv.n = solve_n_block(s, dv.alpha, dv.n, cfg);
    for (std::size_t i = 0; i < s.size(); ++i) {
      dv.alpha[i] = solve_alpha_block(s, dv.n, dv.alpha, i, cfg);
    }
    trace.push_back(utility(s, dv));
    if (converged(trace[trace.size() - 2], trace.back(), cfg.outer_tol) &&
        settled(prev.n, dv.n, cfg.outer_tol) && settled(prev.alpha, dv.alpha, cfg.outer_tol)) {
      status = SolveStatus::converged;
      ++iter;
      break;
    }
  }

  OptResult r = evaluate_point(s, dv);
  r.utility_trace = std::move(trace);
  r.status = status;
  r.outer_iterations = iter;
  return r;
}

KktReport check_kkt(const Scenario& s, const DecisionVector& dv, double tol,
                    const OptimizerConfig& cfg) {
  const std::size_t count = s.size();
  const auto xc = x_coefficients(s);
  const auto coeffs = all_coefficients(s);
  constexpr double active_tol = 1e-7;  // slack, as a fraction of budget

  auto slacks = [&](std::span<const double> n, std::span<const double> a) {
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = constraint_slack(coeffs[j], j, n, a);
    return out;
  };
  auto budget = [&](std::size_t j, double n_j) {
    return s.nodes[j].power.phi * s.nodes[j].duty.sleep_slots(n_j) * s.protocol.sigma;
  };
  const auto base_slack = slacks(dv.n, dv.alpha);

  KktReport report;
  for (int block = 0; block < 2; ++block) {
    for (std::size_t i = 0; i < count; ++i) {
      DecisionVector probe = dv;
      auto& coord = block == 0 ? probe.n[i] : probe.alpha[i];
      const double x = coord;
      const double lower = block == 0 ? 1.0 : cfg.alpha_floor;
      const double upper = block == 0 ? s.nodes[i].duty.n_max : cfg.alpha_max;

      const double h = 1e-6 * std::max(1e-3, std::abs(x));
      coord = x + h;
      const double u_plus = utility_raw(s, xc, probe.n, probe.alpha);
      coord = x - h;
      const double u_minus = utility_raw(s, xc, probe.n, probe.alpha);
      const double grad = (u_plus - u_minus) / (2.0 * h);

      KktCoordinate c;
      c.name = (block == 0 ? "n[" : "alpha[") + std::to_string(i) + "]";
      c.node = i;
      c.value = x;
      c.derivative = grad;

      if (std::abs(grad) <= tol) {
        c.status = KktStatus::stationary;
      } else {
        const double dir = grad > 0.0 ? 1.0 : -1.0;
        const double bound_eps = 1e-9 * std::max(1.0, std::abs(x));
        if (dir > 0.0 && x >= upper - bound_eps) {
          c.status = KktStatus::at_upper_bound;
        } else if (dir < 0.0 && x <= lower + bound_eps) {
          c.status = KktStatus::at_lower_bound;
        } else {
          const double step = 1e-7 * std::max(1e-3, std::abs(x));
          coord = x + dir * step;
          const auto moved = slacks(probe.n, probe.alpha);
          bool blocked = false;
          for (std::size_t j = 0; j < count; ++j) {
            const double bj = budget(j, dv.n[j]);
            const bool active = base_slack[j] <= active_tol * bj;
            if (moved[j] < 0.0 || (active && moved[j] < base_slack[j])) blocked = true;
          }
          c.status = blocked ? KktStatus::energy_active : KktStatus::violated;
        }
      }
      if (c.status == KktStatus::violated) report.ok = false;
      report.coordinates.push_back(c);
    }
  }
  return report;
}

}  // namespace wpcsma

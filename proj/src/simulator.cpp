#include "wpcsma/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <ostream>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "wpcsma/error.hpp"
#include "wpcsma/mac_model.hpp"

namespace wpcsma {
namespace {

// Raw sums over a stretch of slots; statistics are ratios of these.
struct Accumulator {
  std::uint64_t slots = 0;
  std::uint64_t idle = 0;
  std::uint64_t collisions = 0;
  double time = 0.0;
  std::vector<std::uint64_t> successes;
  std::vector<std::uint64_t> col_part;
  std::vector<double> bits;
  std::vector<double> busy;
  std::vector<std::uint64_t> cycles;
  std::vector<CycleEnergy> energy_sum;

  explicit Accumulator(std::size_t n = 0)
      : successes(n), col_part(n), bits(n), busy(n), cycles(n), energy_sum(n) {}

  void add(const Accumulator& o) {
    slots += o.slots;
    idle += o.idle;
    collisions += o.collisions;
    time += o.time;
    for (std::size_t i = 0; i < successes.size(); ++i) {
      successes[i] += o.successes[i];
      col_part[i] += o.col_part[i];
      bits[i] += o.bits[i];
      busy[i] += o.busy[i];
      cycles[i] += o.cycles[i];
      auto& e = energy_sum[i];
      const auto& f = o.energy_sum[i];
      e.acq += f.acq;
      e.proc += f.proc;
      e.backoff += f.backoff;
      e.data += f.data;
      e.bg += f.bg;
      e.total += f.total;
    }
  }
};

CycleEnergy mean_cycle(const CycleEnergy& sum, std::uint64_t cycles) {
  if (cycles == 0) return {};
  const double c = static_cast<double>(cycles);
  return {sum.acq / c, sum.proc / c, sum.backoff / c, sum.data / c, sum.bg / c, sum.total / c};
}

double half_width(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return t_quantile_95(static_cast<int>(xs.size()) - 1) * sd /
         std::sqrt(static_cast<double>(xs.size()));
}

void fill_point_stats(SimStats& st, const Accumulator& acc) {
  const std::size_t n = acc.successes.size();
  const double slots = static_cast<double>(acc.slots);
  st.slots = acc.slots;
  st.total_time = acc.time;
  st.idle_slots = acc.idle;
  st.collision_slots = acc.collisions;
  st.success_slots = acc.successes;
  st.collision_participations = acc.col_part;
  st.delivered_bits = acc.bits;
  st.busy_time = acc.busy;
  st.cycles = acc.cycles;
  st.p_idle = static_cast<double>(acc.idle) / slots;
  st.p_col = static_cast<double>(acc.collisions) / slots;
  st.p_succ.resize(n);
  st.p_col_node.resize(n);
  st.throughput.resize(n);
  st.airtime.resize(n);
  st.energy_per_cycle.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.p_succ[i] = static_cast<double>(acc.successes[i]) / slots;
    st.p_col_node[i] = static_cast<double>(acc.col_part[i]) / slots;
    st.throughput[i] = acc.bits[i] / acc.time;
    st.airtime[i] = acc.busy[i] / acc.time;
    st.energy_per_cycle[i] = mean_cycle(acc.energy_sum[i], acc.cycles[i]);
  }
}

void fill_halfwidths(SimStats& st, const std::vector<Accumulator>& groups) {
  const std::size_t n = st.p_succ.size();
  auto collect = [&](auto&& metric) {
    std::vector<double> xs;
    for (const auto& g : groups) {
      if (g.slots == 0) continue;
      const double v = metric(g);
      if (std::isfinite(v)) xs.push_back(v);
    }
    return half_width(xs);
  };
  auto& hw = st.ci_halfwidth;
  hw.p_idle = collect([](const Accumulator& g) { return double(g.idle) / double(g.slots); });
  hw.p_col = collect([](const Accumulator& g) { return double(g.collisions) / double(g.slots); });
  hw.p_succ.resize(n);
  hw.throughput.resize(n);
  hw.airtime.resize(n);
  hw.energy_per_cycle.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    hw.p_succ[i] = collect([i](const Accumulator& g) { return double(g.successes[i]) / double(g.slots); });
    hw.throughput[i] = collect([i](const Accumulator& g) { return g.bits[i] / g.time; });
    hw.airtime[i] = collect([i](const Accumulator& g) { return g.busy[i] / g.time; });
    hw.energy_per_cycle[i] = collect([i](const Accumulator& g) {
      return g.cycles[i] == 0 ? std::nan("") : g.energy_sum[i].total / double(g.cycles[i]);
    });
  }
}

}  // namespace

double t_quantile_95(int dof) {
  if (dof < 1) throw InvalidParameter("degrees of freedom must be >= 1");
  boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 0.975);
}

void SimConfig::validate() const {
  if (!(n_slots > warmup_slots)) throw InvalidParameter("n_slots must exceed warmup_slots");
  if (batches < 2) throw InvalidParameter("batches must be >= 2");
  if (n_slots - warmup_slots < static_cast<std::uint64_t>(batches)) {
    throw InvalidParameter("fewer statistics slots than batches");
  }
}

SimPoint SimPoint::from_integer_decision(const IntegerDecision& d) {
  return SimPoint{d.w, d.m, d.n};
}

void SimPoint::validate(std::size_t nodes) const {
  if (w.size() != nodes || m.size() != nodes || n.size() != nodes) {
    throw InvalidParameter("simulation point size does not match node count");
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    const std::string tag = "point[" + std::to_string(i) + "]";
    if (w[i] < 1) throw InvalidParameter(tag + ".w must be >= 1");
    if (m[i] < 2) throw InvalidParameter(tag + ".m must be >= 2");
    if (n[i] < 1) throw InvalidParameter(tag + ".n must be >= 1");
  }
}

std::vector<double> SimPoint::alpha() const {
  std::vector<double> out;
  out.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.push_back(alpha_from_tau(attempt_probability(w[i], m[i])));
  }
  return out;
}

std::vector<double> SimPoint::n_real() const { return {n.begin(), n.end()}; }

SimStats simulate(const Scenario& s, const SimPoint& point, const SimConfig& cfg) {
  s.validate();
  cfg.validate();
  const std::size_t count = s.size();
  point.validate(count);

  const auto& p = s.protocol;
  const auto col = t_collision(p);
  std::vector<double> t_succ(count), bits(count);
  std::vector<CycleEnergy> fixed(count);  // per-cycle parts known up front
  std::vector<double> eps_succ(count), eps_col(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& nd = s.nodes[i];
    const auto link = nd.link(point.n[i]);
    t_succ[i] = t_success(p, link).total;
    bits[i] = point.n[i] * nd.l;
    fixed[i].acq = point.n[i] * nd.power.p_acq * p.sigma;
    fixed[i].proc = point.n[i] * nd.power.p_proc * nd.duty.g * p.sigma;
    fixed[i].bg = nd.power.e_bg;
    const auto data = energy_data(p, nd.power, link, {});
    eps_succ[i] = data.per_success;
    eps_col[i] = data.per_collision;
  }

  std::mt19937_64 rng(cfg.seed);

  // Start every node in a state drawn from its own stationary distribution.
  std::vector<NodeState> state(count);
  std::vector<int> countdown(count, 0);   // backoff slots spent in the current cycle
  std::vector<bool> counted(count, false);  // current cycle woke up inside the stats window
  for (std::size_t i = 0; i < count; ++i) {
    const auto b = stationary_distribution(point.w[i], point.m[i]);
    std::vector<double> weights(b.active);
    weights.insert(weights.end(), b.sleep.begin(), b.sleep.end());
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    const int idx = pick(rng);
    if (idx < point.w[i]) {
      state[i] = {NodeMode::active, idx};
    } else {
      state[i] = {NodeMode::sleeping, idx - point.w[i]};
    }
  }

  SimStats st;
  st.seed = cfg.seed;
  if (cfg.record_occupancy) {
    st.occupancy_active.resize(count);
    st.occupancy_sleep.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      st.occupancy_active[i].assign(static_cast<std::size_t>(point.w[i]), 0);
      st.occupancy_sleep[i].assign(static_cast<std::size_t>(point.m[i]), 0);
    }
  }

  const std::uint64_t stat_slots = cfg.n_slots - cfg.warmup_slots;
  const std::uint64_t batch_len = stat_slots / static_cast<std::uint64_t>(cfg.batches);
  std::vector<Accumulator> batches(static_cast<std::size_t>(cfg.batches), Accumulator(count));
  std::vector<std::size_t> transmitters;
  transmitters.reserve(count);

  if (cfg.trace) *cfg.trace << "slot,type,transmitters\n";

  for (std::uint64_t slot = 0; slot < cfg.n_slots; ++slot) {
    const bool in_stats = slot >= cfg.warmup_slots;
    Accumulator* acc = nullptr;
    if (in_stats) {
      const std::uint64_t b = std::min<std::uint64_t>((slot - cfg.warmup_slots) / batch_len,
                                                      static_cast<std::uint64_t>(cfg.batches) - 1);
      acc = &batches[static_cast<std::size_t>(b)];
    }

    transmitters.clear();
    for (std::size_t i = 0; i < count; ++i) {
      if (cfg.record_occupancy && in_stats) {
        const auto k = static_cast<std::size_t>(state[i].counter);
        if (state[i].mode == NodeMode::active) {
          ++st.occupancy_active[i][k];
        } else {
          ++st.occupancy_sleep[i][k];
        }
      }
      if (state[i].mode == NodeMode::active && state[i].counter == 0) transmitters.push_back(i);
    }

    double duration = p.sigma;
    const char* type = "idle";
    if (transmitters.size() == 1) {
      duration = t_succ[transmitters[0]];
      type = "success";
    } else if (transmitters.size() > 1) {
      duration = col.total;
      type = "collision";
    }

    if (acc) {
      ++acc->slots;
      acc->time += duration;
      if (transmitters.empty()) {
        ++acc->idle;
      } else if (transmitters.size() == 1) {
        const std::size_t i = transmitters[0];
        ++acc->successes[i];
        acc->bits[i] += bits[i];
        acc->busy[i] += duration;
      } else {
        ++acc->collisions;
        for (std::size_t i : transmitters) {
          ++acc->col_part[i];
          acc->busy[i] += duration;
        }
      }
    }

    if (cfg.trace) {
      *cfg.trace << slot << ',' << type << ',';
      for (std::size_t k = 0; k < transmitters.size(); ++k) {
        if (k) *cfg.trace << ';';
        *cfg.trace << (s.nodes[transmitters[k]].id.empty() ? std::to_string(transmitters[k])
                                                             : s.nodes[transmitters[k]].id);
      }
      *cfg.trace << '\n';
    }

    const bool success = transmitters.size() == 1;
    for (std::size_t i = 0; i < count; ++i) {
      auto& ns = state[i];
      const auto& pw = s.nodes[i].power;
      if (ns.mode == NodeMode::active) {
        if (ns.counter == 0) {
          if (counted[i] && acc) {
            CycleEnergy e = fixed[i];
            e.backoff = (p.t_difs + countdown[i] * p.sigma) * pw.p_listen;
            e.data = success ? eps_succ[i] : eps_col[i];
            e.total = e.acq + e.proc + e.backoff + e.data + e.bg;
            auto& sum = acc->energy_sum[i];
            sum.acq += e.acq;
            sum.proc += e.proc;
            sum.backoff += e.backoff;
            sum.data += e.data;
            sum.bg += e.bg;
            sum.total += e.total;
            ++acc->cycles[i];
          }
          ns = {NodeMode::sleeping, point.m[i] - 1};
        } else {
          // Each countdown slot is one sigma of listening; the remainder of a
          // busy slot is spent under NAV.
          --ns.counter;
          ++countdown[i];
        }
      } else if (ns.counter == 0) {
        std::uniform_int_distribution<int> backoff(0, point.w[i] - 1);
        ns = {NodeMode::active, backoff(rng)};
        countdown[i] = 0;
        counted[i] = slot + 1 >= cfg.warmup_slots;
      } else {
        --ns.counter;
      }
    }
  }

  Accumulator total(count);
  for (const auto& b : batches) total.add(b);
  fill_point_stats(st, total);
  fill_halfwidths(st, batches);
  return st;
}

SimStats simulate_replications(const Scenario& s, const SimPoint& point, const SimConfig& cfg,
                               int replications) {
  if (replications < 1) throw InvalidParameter("replications must be >= 1");
  if (replications == 1) return simulate(s, point, cfg);
  if (cfg.trace) throw InvalidParameter("tracing is not supported across replications");

  std::vector<std::future<SimStats>> runs;
  runs.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    SimConfig c = cfg;
    c.seed = cfg.seed + static_cast<std::uint64_t>(r);
    runs.push_back(std::async(std::launch::async, [&s, &point, c] { return simulate(s, point, c); }));
  }
  std::vector<SimStats> results;
  for (auto& f : runs) results.push_back(f.get());

  const std::size_t count = s.size();
  std::vector<Accumulator> groups;
  Accumulator total(count);
  for (const auto& r : results) {
    Accumulator a(count);
    a.slots = r.slots;
    a.idle = r.idle_slots;
    a.collisions = r.collision_slots;
    a.time = r.total_time;
    a.successes = r.success_slots;
    a.col_part = r.collision_participations;
    a.bits = r.delivered_bits;
    a.busy = r.busy_time;
    a.cycles = r.cycles;
    for (std::size_t i = 0; i < count; ++i) {
      const double c = static_cast<double>(r.cycles[i]);
      const auto& m = r.energy_per_cycle[i];
      a.energy_sum[i] = {m.acq * c, m.proc * c, m.backoff * c, m.data * c, m.bg * c, m.total * c};
    }
    total.add(a);
    groups.push_back(std::move(a));
  }
  SimStats st;
  st.seed = cfg.seed;
  fill_point_stats(st, total);
  fill_halfwidths(st, groups);
  if (cfg.record_occupancy) {
    st.occupancy_active = results.front().occupancy_active;
    st.occupancy_sleep = results.front().occupancy_sleep;
    for (std::size_t r = 1; r < results.size(); ++r) {
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < st.occupancy_active[i].size(); ++k) {
          st.occupancy_active[i][k] += results[r].occupancy_active[i][k];
        }
        for (std::size_t k = 0; k < st.occupancy_sleep[i].size(); ++k) {
          st.occupancy_sleep[i][k] += results[r].occupancy_sleep[i][k];
        }
      }
    }
  }
  return st;
}

std::vector<EnergyComparison> empirical_energy_check(const Scenario& s, const SimPoint& point,
                                                     const SimStats& stats) {
  point.validate(s.size());
  const auto alpha = point.alpha();
  const auto n = point.n_real();
  auto rel = [](double sim, double ana) {
    if (ana == 0.0) return sim == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (sim - ana) / std::abs(ana);
  };
  std::vector<EnergyComparison> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& nd = s.nodes[i];
    const auto& p = s.protocol;
    EnergyComparison c;
    // The integer point fixes W directly, so evaluate the backoff term at W
    // rather than at a window recovered through alpha and n h + g.
    std::vector<double> taus_others;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (j != i) taus_others.push_back(tau_from_alpha(alpha[j]));
    }
    c.analytical.acq = n[i] * nd.power.p_acq * p.sigma;
    c.analytical.proc = n[i] * nd.power.p_proc * nd.duty.g * p.sigma;
    c.analytical.backoff = energy_backoff(p, nd.power, point.w[i]);
    c.analytical.data = energy_data(p, nd.power, nd.link(n[i]), taus_others).expected;
    c.analytical.bg = nd.power.e_bg;
    c.analytical.total = c.analytical.acq + c.analytical.proc + c.analytical.backoff +
                         c.analytical.data + c.analytical.bg;
    c.simulated = stats.energy_per_cycle[i];
    c.relative_error = {rel(c.simulated.acq, c.analytical.acq),
                        rel(c.simulated.proc, c.analytical.proc),
                        rel(c.simulated.backoff, c.analytical.backoff),
                        rel(c.simulated.data, c.analytical.data),
                        rel(c.simulated.bg, c.analytical.bg),
                        rel(c.simulated.total, c.analytical.total)};
    c.total_halfwidth = stats.ci_halfwidth.energy_per_cycle.empty()
                            ? 0.0
                            : stats.ci_halfwidth.energy_per_cycle[i];
    out.push_back(c);
  }
  return out;
}

}  // namespace wpcsma

#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "wpcsma/error.hpp"
#include "wpcsma/mac_model.hpp"
#include "wpcsma/scenario_io.hpp"
#include "wpcsma/simulator.hpp"

using namespace wpcsma;

namespace {

Scenario first_nodes(int count) {
  Scenario s = example_scenario(1);
  s.nodes.resize(static_cast<std::size_t>(count));
  for (auto& nd : s.nodes) nd.duty.n_max = 10.0;
  return s;
}

}  // namespace

TEST_CASE("configuration and point validation") {
  SimConfig cfg;
  cfg.n_slots = 10;
  cfg.warmup_slots = 10;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg.warmup_slots = 0;
  cfg.batches = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);

  const auto s = first_nodes(2);
  SimConfig ok;
  ok.n_slots = 1000;
  CHECK_THROWS_AS(simulate(s, SimPoint{{0, 1}, {5, 5}, {1, 1}}, ok), InvalidParameter);
  CHECK_THROWS_AS(simulate(s, SimPoint{{1, 1}, {1, 5}, {1, 1}}, ok), InvalidParameter);
  CHECK_THROWS_AS(simulate(s, SimPoint{{1, 1}, {5, 5}, {0, 1}}, ok), InvalidParameter);
  CHECK_THROWS_AS(simulate(s, SimPoint{{1}, {5}, {1}}, ok), InvalidParameter);
}

TEST_CASE("single node with the shortest cycle") {
  auto s = first_nodes(1);
  const SimPoint point{{1}, {2}, {1}};
  SimConfig cfg;
  cfg.n_slots = 1'000'000;
  const auto st = simulate(s, point, cfg);
  // The chain is deterministic: one transmission every three slots.
  const auto d = oracle::durations(s.protocol, s.nodes[0].l, s.nodes[0].rate, 1.0);
  const double expected = s.nodes[0].l / (d.t_succ + 2.0 * s.protocol.sigma);
  CHECK(st.throughput[0] == doctest::Approx(expected).epsilon(1e-5));
  const auto perf = throughput(s, std::vector<double>{1.0}, std::vector<double>{0.5});
  CHECK(std::abs(st.throughput[0] / perf.throughput[0] - 1.0) < 0.005);
  CHECK(st.p_col == 0.0);
  CHECK(st.energy_per_cycle[0].backoff ==
        doctest::Approx(s.protocol.t_difs * s.nodes[0].power.p_listen).epsilon(1e-12));
}

TEST_CASE("two symmetric nodes match the slot probabilities") {
  const auto s = first_nodes(2);
  const SimPoint point{{16, 16}, {5, 5}, {1, 1}};
  SimConfig cfg;
  cfg.n_slots = 1'000'000;
  cfg.seed = 17;
  const auto st = simulate(s, point, cfg);
  const double tau = attempt_probability(16, 5);
  const std::vector<double> taus{tau, tau};
  const auto p = slot_probabilities(taus);
  const double slots = static_cast<double>(st.slots);
  auto within_3_sigma = [&](double observed, double prob) {
    return std::abs(observed - prob) <= 3.0 * std::sqrt(prob * (1.0 - prob) / slots);
  };
  CHECK(within_3_sigma(st.p_idle, p.p_idle));
  CHECK(within_3_sigma(st.p_col, p.p_col));
  CHECK(within_3_sigma(st.p_succ[0], p.p_succ[0]));
  CHECK(within_3_sigma(st.p_succ[1], p.p_succ[1]));
  CHECK(st.p_idle + st.p_col + st.p_succ[0] + st.p_succ[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(st.ci_halfwidth.p_idle > 0.0);
}

TEST_CASE("conservation of time and bits") {
  const auto s = first_nodes(3);
  const SimPoint point{{4, 9, 2}, {8, 11, 5}, {2, 3, 1}};
  SimConfig cfg;
  cfg.n_slots = 200'000;
  cfg.warmup_slots = 1'000;
  cfg.seed = 3;
  const auto st = simulate(s, point, cfg);
  const auto col = oracle::durations(s.protocol, 8.0, 1e6, 1.0).t_col;
  double time = st.idle_slots * s.protocol.sigma + st.collision_slots * col;
  std::uint64_t slots = st.idle_slots + st.collision_slots;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto d = oracle::durations(s.protocol, s.nodes[i].l, s.nodes[i].rate, point.n[i]);
    time += st.success_slots[i] * d.t_succ;
    slots += st.success_slots[i];
    CHECK(st.delivered_bits[i] == st.success_slots[i] * point.n[i] * s.nodes[i].l);
    CHECK(st.throughput[i] == doctest::Approx(st.delivered_bits[i] / st.total_time).epsilon(1e-15));
  }
  CHECK(slots == st.slots);
  CHECK(st.slots == cfg.n_slots - cfg.warmup_slots);
  CHECK(st.total_time == doctest::Approx(time).epsilon(1e-12));
}

TEST_CASE("single-node chain occupancy") {
  auto s = first_nodes(1);
  const int w = 7, m = 4;
  const SimPoint point{{w}, {m}, {1}};
  SimConfig cfg;
  cfg.n_slots = 500'000;
  cfg.seed = 99;
  cfg.record_occupancy = true;
  const auto st = simulate(s, point, cfg);
  const auto b = stationary_distribution(w, m);
  const double slots = static_cast<double>(st.slots);
  // Successive slots are correlated; the band is the i.i.d. 3-sigma band
  // widened fourfold.
  for (int k = 0; k < w; ++k) {
    const double freq = st.occupancy_active[0][k] / slots;
    CHECK(std::abs(freq - b.active[k]) <= 3.0 * std::sqrt(b.active[k] * (1 - b.active[k]) / slots) * 4.0);
  }
  for (int k = 0; k < m; ++k) {
    const double freq = st.occupancy_sleep[0][k] / slots;
    CHECK(std::abs(freq - b.sleep[k]) <= 3.0 * std::sqrt(b.sleep[k] * (1 - b.sleep[k]) / slots) * 4.0);
  }
}

TEST_CASE("determinism") {
  const auto s = first_nodes(3);
  const SimPoint point{{4, 9, 2}, {8, 11, 5}, {2, 3, 1}};
  SimConfig cfg;
  cfg.n_slots = 50'000;
  cfg.seed = 12345;
  std::ostringstream t1, t2;
  cfg.trace = &t1;
  const auto a = simulate(s, point, cfg);
  cfg.trace = &t2;
  const auto b = simulate(s, point, cfg);
  CHECK(t1.str() == t2.str());
  CHECK(a.throughput == b.throughput);
  CHECK(a.airtime == b.airtime);
  CHECK(a.total_time == b.total_time);
  CHECK(a.ci_halfwidth.throughput == b.ci_halfwidth.throughput);
  CHECK(a.rng == "mt19937_64");
  cfg.seed = 12346;
  cfg.trace = nullptr;
  const auto c = simulate(s, point, cfg);
  CHECK(c.throughput != a.throughput);

  const auto first_line = t1.str().substr(0, t1.str().find('\n'));
  CHECK(first_line == "slot,type,transmitters");
}

TEST_CASE("replications pool in seed order") {
  const auto s = first_nodes(2);
  const SimPoint point{{8, 8}, {5, 5}, {1, 1}};
  SimConfig cfg;
  cfg.n_slots = 20'000;
  cfg.seed = 5;
  const auto pooled = simulate_replications(s, point, cfg, 4);
  std::uint64_t idle = 0, slots = 0;
  double time = 0.0;
  for (int r = 0; r < 4; ++r) {
    SimConfig c = cfg;
    c.seed = cfg.seed + r;
    const auto one = simulate(s, point, c);
    idle += one.idle_slots;
    slots += one.slots;
    time += one.total_time;
  }
  CHECK(pooled.idle_slots == idle);
  CHECK(pooled.slots == slots);
  CHECK(pooled.total_time == doctest::Approx(time).epsilon(1e-14));
  const auto again = simulate_replications(s, point, cfg, 4);
  CHECK(again.throughput == pooled.throughput);
}

TEST_CASE("simulated energy per cycle") {
  const auto s = first_nodes(3);
  const SimPoint point{{12, 20, 6}, {8, 11, 5}, {2, 3, 1}};
  SimConfig cfg;
  cfg.n_slots = 1'000'000;
  cfg.seed = 8;
  const auto st = simulate(s, point, cfg);
  const auto cmp = empirical_energy_check(s, point, st);
  REQUIRE(cmp.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(cmp[i].simulated.acq == doctest::Approx(cmp[i].analytical.acq).epsilon(1e-12));
    CHECK(cmp[i].simulated.proc == doctest::Approx(cmp[i].analytical.proc).epsilon(1e-12));
    CHECK(cmp[i].simulated.bg == doctest::Approx(cmp[i].analytical.bg).epsilon(1e-12));
    // Uniform backoff draw: mean listening energy within a few percent.
    CHECK(std::abs(cmp[i].relative_error.backoff) < 0.02);
    CHECK(st.cycles[i] > 0);
  }
}

TEST_CASE("Student-t quantile") {
  CHECK(t_quantile_95(19) == doctest::Approx(2.093).epsilon(1e-3));
  CHECK(t_quantile_95(1) == doctest::Approx(12.706).epsilon(1e-3));
  CHECK_THROWS_AS(t_quantile_95(0), InvalidParameter);
}

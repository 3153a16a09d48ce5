#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wpcsma/error.hpp"
#include "wpcsma/energy_model.hpp"
#include "wpcsma/mac_model.hpp"
#include "wpcsma/scenario_io.hpp"

using namespace wpcsma;

namespace {

// Example-1 node profile with a 400-bit payload.
Scenario table_scenario(int nodes) {
  Scenario s = example_scenario(1);
  s.nodes.resize(static_cast<std::size_t>(nodes));
  for (auto& nd : s.nodes) {
    nd.l = 400.0;
    nd.duty.n_max = 60.0;
  }
  return s;
}

}  // namespace

TEST_CASE("backoff energy") {
  const auto s = table_scenario(1);
  const auto& pw = s.nodes[0].power;
  CHECK(energy_backoff(s.protocol, pw, 1.0) == doctest::Approx(0.34e-6).epsilon(1e-12));
  const double slope = energy_backoff(s.protocol, pw, 11.0) - energy_backoff(s.protocol, pw, 10.0);
  CHECK(slope == doctest::Approx(s.protocol.sigma * pw.p_listen / 2.0).epsilon(1e-10));
  CHECK_THROWS_AS(energy_backoff(s.protocol, pw, 0.99), InvalidParameter);

  // Written through the attempt odds and sleep length.
  const double sigma = s.protocol.sigma;
  for (double alpha : {0.01, 0.03, 0.05}) {
    for (double m : {5.0, 12.0, 32.0}) {
      const double w = window_from_alpha(alpha, m);
      if (w < 1.0) continue;
      const double b = sigma * pw.p_listen;
      const double expected = b / alpha - m * sigma * pw.p_listen + s.protocol.t_difs * pw.p_listen;
      CHECK(energy_backoff(s.protocol, pw, w) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("data energy") {
  const auto s = table_scenario(3);
  const auto& p = s.protocol;
  const auto& pw = s.nodes[0].power;
  const NodeLinkParams link{400.0, 11e6, 10.0};
  SUBCASE("alone on the channel") {
    const auto e = energy_data(p, pw, link, {});
    CHECK(e.p_success == 1.0);
    CHECK(e.expected == e.per_success);
    const auto ref = oracle::cycle_energy(s, 0, 10.0, 1.0, 1.0);
    CHECK(e.expected == doctest::Approx(ref.data).epsilon(1e-13));
  }
  SUBCASE("peers almost always transmit") {
    const std::vector<double> taus{1.0 - 1e-12, 1.0 - 1e-12};
    const auto e = energy_data(p, pw, link, taus);
    CHECK(e.expected == doctest::Approx(e.per_collision).epsilon(1e-9));
  }
  SUBCASE("two peers at tau = 0.1 against pattern enumeration") {
    const std::vector<double> taus{0.1, 0.1};
    const auto e = energy_data(p, pw, link, taus);
    const auto succ = oracle::cycle_energy(s, 0, 10.0, 1.0, 1.0).data;
    const auto col = oracle::cycle_energy(s, 0, 10.0, 1.0, 0.0).data;
    double expected = 0.0;
    for (int mask = 0; mask < 4; ++mask) {
      double prob = 1.0;
      for (int j = 0; j < 2; ++j) prob *= (mask >> j) & 1 ? taus[j] : 1.0 - taus[j];
      expected += prob * (mask == 0 ? succ : col);
    }
    CHECK(e.expected == doctest::Approx(expected).epsilon(1e-13));
    CHECK(e.per_success == doctest::Approx(succ).epsilon(1e-13));
    CHECK(e.per_collision == doctest::Approx(col).epsilon(1e-13));
  }
  SUBCASE("convex combination of the outcomes") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> taus(k % 6);
      for (auto& t : taus) t = u(rng);
      const auto e = energy_data(p, pw, link, taus);
      CHECK(e.expected >= std::min(e.per_success, e.per_collision) * (1 - 1e-15));
      CHECK(e.expected <= std::max(e.per_success, e.per_collision) * (1 + 1e-15));
    }
  }
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(energy_data(p, pw, link, bad), InvalidParameter);
}

TEST_CASE("per-cycle energy components") {
  const auto s = table_scenario(2);
  const std::vector<double> n{10.0, 10.0}, a{0.02, 0.02};
  const auto e = energy_cycle(s, 0, n, a);
  CHECK(e.e_acq == doctest::Approx(0.45e-6).epsilon(1e-12));
  CHECK(e.e_proc == doctest::Approx(10 * 0.108e-6).epsilon(1e-12));
  CHECK(e.e_total == e.e_acq + e.e_proc + e.e_tx_total + e.e_bg);
  CHECK(e.e_tx_total == e.e_backoff + e.e_data);
  CHECK(e.budget == doctest::Approx(15e-3 * 32 * 9e-6).epsilon(1e-13));

  const double m = 32.0;
  const double w = window_from_alpha(0.02, m);
  CHECK(e.window == doctest::Approx(w).epsilon(1e-14));
  CHECK_FALSE(e.backoff_below_window_floor);
  const auto ref = oracle::cycle_energy(s, 0, 10.0, w, 1.0 - 0.02 / 1.02);
  CHECK(e.e_backoff == doctest::Approx(ref.backoff).epsilon(1e-12));
  CHECK(e.e_data == doctest::Approx(ref.data).epsilon(1e-12));
  CHECK(e.e_total == doctest::Approx(ref.total).epsilon(1e-12));
  CHECK(e.slack() == doctest::Approx(ref.budget - ref.total).epsilon(1e-10));

  // The odds bound admits windows below one when m is long.
  const std::vector<double> dense{0.5, 0.5};
  const auto d = energy_cycle(s, 0, n, dense);
  CHECK(d.backoff_below_window_floor);
  CHECK(d.window < 1.0);
}

TEST_CASE("constraint coefficients") {
  const auto s = table_scenario(1);
  const auto c = energy_coefficients(s, 0);
  CHECK(c.b == doctest::Approx(9e-8).epsilon(1e-13));
  CHECK(c.c == doctest::Approx(512.0 / 11e6 * 15e-3).epsilon(1e-13));
  CHECK(c.a == doctest::Approx(5e-3 * 9e-6 + 6e-3 * 2 * 9e-6 - 25e-3 * 3 * 9e-6).epsilon(1e-12));
  CHECK(c.a < 0.0);
  CHECK(c.per_sample_acq == doctest::Approx(5e-3 * 9e-6).epsilon(1e-14));
  CHECK(c.per_sample_proc == doctest::Approx(6e-3 * 2 * 9e-6).epsilon(1e-14));
  CHECK(c.b > 0.0);
  CHECK(c.c > 0.0);
}

TEST_CASE("coefficient form equals the component form") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const int nodes = 1 + k % 6;
    const auto s = oracle::random_scenario(rng, nodes);
    std::vector<double> n(nodes), a(nodes);
    for (int i = 0; i < nodes; ++i) {
      n[i] = 1.0 + (s.nodes[i].duty.n_max - 1.0) * u(rng);
      a[i] = 1e-4 + (0.5 - 1e-4) * u(rng);
    }
    for (int i = 0; i < nodes; ++i) {
      const auto e = energy_cycle(s, i, n, a);
      const double slack = constraint_slack(s, i, n, a);
      const double scale = std::max(e.budget, e.e_total);
      CHECK(std::abs((e.budget - e.e_total) - slack) <= 1e-12 * scale);
      CHECK((slack >= 0.0) == (e.e_total <= e.budget));

      // Independent recomputation from the component definitions.
      double p_success = 1.0;
      for (int j = 0; j < nodes; ++j) {
        if (j != i) p_success *= 1.0 - a[j] / (1.0 + a[j]);
      }
      const double m = n[i] * s.nodes[i].duty.h + s.nodes[i].duty.g;
      const double w = 2.0 * (1.0 + a[i]) / a[i] - 2.0 * m - 1.0;
      const auto ref = oracle::cycle_energy(s, i, n[i], w, p_success);
      CHECK(std::abs(e.e_total - ref.total) <= 1e-12 * scale);
      CHECK(std::abs(slack - (ref.budget - ref.total)) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("energies scale with power") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const int nodes = 1 + k % 5;
    const auto s = oracle::random_scenario(rng, nodes);
    auto scaled = s;
    const double factor = 0.25 + 3.0 * u(rng);
    for (auto& nd : scaled.nodes) {
      for (double* f : {&nd.power.p_tx, &nd.power.p_rx, &nd.power.p_listen, &nd.power.p_acq,
                        &nd.power.p_proc, &nd.power.e_bg, &nd.power.phi}) {
        *f *= factor;
      }
    }
    std::vector<double> n(nodes), a(nodes);
    for (int i = 0; i < nodes; ++i) {
      n[i] = 1.0 + (s.nodes[i].duty.n_max - 1.0) * u(rng);
      a[i] = 1e-3 + 0.499 * u(rng);
    }
    for (int i = 0; i < nodes; ++i) {
      const auto e = energy_cycle(s, i, n, a);
      const auto f = energy_cycle(scaled, i, n, a);
      CHECK(f.e_acq == doctest::Approx(factor * e.e_acq).epsilon(1e-13));
      CHECK(f.e_proc == doctest::Approx(factor * e.e_proc).epsilon(1e-13));
      CHECK(f.e_data == doctest::Approx(factor * e.e_data).epsilon(1e-13));
      CHECK(std::abs(f.e_backoff - factor * e.e_backoff) <= 1e-12 * std::abs(factor * e.e_total));
      CHECK(f.e_total == doctest::Approx(factor * e.e_total).epsilon(1e-12));
      CHECK(f.budget == doctest::Approx(factor * e.budget).epsilon(1e-13));
    }
  }
}

TEST_CASE("slack input checks") {
  const auto s = table_scenario(2);
  const std::vector<double> n{1.0, 1.0}, a{0.0, 0.1};
  CHECK_THROWS_AS(constraint_slack(s, 0, n, a), InvalidParameter);
  CHECK_THROWS_AS(constraint_slack(s, 2, n, a), InvalidParameter);
  CHECK_NOTHROW(constraint_slack(s, 1, n, a));
}

#include "wpcsma/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "wpcsma/error.hpp"
#include "wpcsma/mac_model.hpp"

namespace wpcsma {
namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return csv_escape(*s);
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

std::string node_id(const Scenario& s, std::size_t i) {
  return s.nodes[i].id.empty() ? std::to_string(i) : s.nodes[i].id;
}

double rel_error(double sim, double ana) {
  if (ana == 0.0) return sim == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (sim - ana) / std::abs(ana);
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ResultTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw InvalidState("row width does not match header");
  rows.push_back(std::move(row));
}

void ResultTable::add_meta(std::string key, std::string value) {
  metadata.emplace_back(std::move(key), std::move(value));
}

void ResultTable::write_csv(std::ostream& out) const {
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << csv_escape(columns[c]);
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << cell_text(row[c]);
    }
    out << '\n';
  }
}

nlohmann::json ResultTable::to_json() const {
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [k, v] : metadata) meta[k] = v;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              obj[columns[c]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v));
            } else {
              obj[columns[c]] = v;
            }
          },
          row[c]);
    }
    rows_json.push_back(std::move(obj));
  }
  return {{"metadata", meta}, {"columns", columns}, {"rows", rows_json}};
}

void ResultTable::save(const std::filesystem::path& dir, const std::string& stem) const {
  std::filesystem::create_directories(dir);
  {
    std::ofstream csv(dir / (stem + ".csv"));
    if (!csv) throw InvalidParameter((dir / (stem + ".csv")).string() + ": cannot write");
    write_csv(csv);
  }
  std::ofstream js(dir / (stem + ".json"));
  if (!js) throw InvalidParameter((dir / (stem + ".json")).string() + ": cannot write");
  js << to_json().dump(2) << '\n';
}

ResultTable decision_table(const Scenario& s, const OptResult& r) {
  ResultTable t;
  t.columns = {"node",          "n_max",          "n_opt",         "alpha_opt",
               "tau",           "W_recovered",    "m",             "throughput_bps",
               "airtime",       "energy_consumed_J", "energy_received_J", "slack_J",
               "slack_ratio",   "n_int",          "W_int",         "m_int"};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& e = r.energy[i];
    t.add_row({node_id(s, i), s.nodes[i].duty.n_max, r.decision.n[i], r.decision.alpha[i],
               r.perf.tau[i], r.perf.window[i], r.perf.sleep_slots[i], r.perf.throughput[i],
               r.perf.airtime[i], e.e_total, e.budget, r.slack[i], r.slack[i] / e.budget,
               std::int64_t{r.integer_decision.n[i]}, std::int64_t{r.integer_decision.w[i]},
               std::int64_t{r.integer_decision.m[i]}});
  }
  t.add_meta("tool_version", kToolVersion);
  t.add_meta("scenario", s.name);
  t.add_meta("utility", format_double(r.utility));
  return t;
}

ResultTable simulation_table(const Scenario& s, const SimPoint& point, const SimStats& st) {
  const auto alpha = point.alpha();
  const auto perf = throughput(s, point.n_real(), alpha);
  ResultTable t;
  t.columns = {"node",
               "n",
               "W",
               "m",
               "throughput_bps_analytical",
               "throughput_bps_simulated",
               "throughput_rel_error",
               "throughput_ci_halfwidth",
               "airtime_analytical",
               "airtime_simulated",
               "airtime_rel_error",
               "p_succ_analytical",
               "p_succ_simulated",
               "p_succ_ci_halfwidth",
               "energy_per_cycle_J_analytical",
               "energy_per_cycle_J_simulated",
               "energy_rel_error",
               "cycles"};
  const auto energy = empirical_energy_check(s, point, st);
  for (std::size_t i = 0; i < s.size(); ++i) {
    t.add_row({node_id(s, i), std::int64_t{point.n[i]}, std::int64_t{point.w[i]},
               std::int64_t{point.m[i]}, perf.throughput[i], st.throughput[i],
               rel_error(st.throughput[i], perf.throughput[i]), st.ci_halfwidth.throughput[i],
               perf.airtime[i], st.airtime[i], rel_error(st.airtime[i], perf.airtime[i]),
               perf.slot_probs.p_succ[i], st.p_succ[i], st.ci_halfwidth.p_succ[i],
               energy[i].analytical.total, energy[i].simulated.total,
               energy[i].relative_error.total, static_cast<std::int64_t>(st.cycles[i])});
  }
  t.add_meta("tool_version", kToolVersion);
  t.add_meta("scenario", s.name);
  t.add_meta("rng", st.rng);
  t.add_meta("seed", std::to_string(st.seed));
  t.add_meta("slots", std::to_string(st.slots));
  t.add_meta("ci", "95% batch means");
  return t;
}

ResultTable slot_table(const Scenario& s, const SimPoint& point, const SimStats& st) {
  const auto perf = throughput(s, point.n_real(), point.alpha());
  ResultTable t;
  t.columns = {"metric", "analytical", "simulated", "ci_halfwidth", "rel_error"};
  t.add_row({std::string("p_idle"), perf.slot_probs.p_idle, st.p_idle, st.ci_halfwidth.p_idle,
             rel_error(st.p_idle, perf.slot_probs.p_idle)});
  t.add_row({std::string("p_col"), perf.slot_probs.p_col, st.p_col, st.ci_halfwidth.p_col,
             rel_error(st.p_col, perf.slot_probs.p_col)});
  t.add_meta("tool_version", kToolVersion);
  t.add_meta("scenario", s.name);
  t.add_meta("rng", st.rng);
  t.add_meta("seed", std::to_string(st.seed));
  t.add_meta("slots", std::to_string(st.slots));
  return t;
}

ResultTable utility_trace_table(const OptResult& r) {
  ResultTable t;
  t.columns = {"iteration", "utility"};
  for (std::size_t k = 0; k < r.utility_trace.size(); ++k) {
    t.add_row({static_cast<std::int64_t>(k), r.utility_trace[k]});
  }
  t.add_meta("tool_version", kToolVersion);
  t.add_meta("status", to_string(r.status));
  t.add_meta("outer_iterations", std::to_string(r.outer_iterations));
  return t;
}

}  // namespace wpcsma

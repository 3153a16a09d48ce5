#pragma once

// Tabular results: CSV with a '#' metadata block and a JSON sidecar.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "wpcsma/optimizer.hpp"
#include "wpcsma/simulator.hpp"

namespace wpcsma {

inline constexpr const char* kToolVersion = "1.0.0";

using Cell = std::variant<std::string, double, std::int64_t>;

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Written as "# key: value" lines ahead of the header, in order.
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<Cell> row);
  void add_meta(std::string key, std::string value);

  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
  /// Writes `<stem>.csv` and `<stem>.json` under `dir`.
  void save(const std::filesystem::path& dir, const std::string& stem) const;
};

/// Shortest text is not enough for reproducibility; every double is written
/// with 17 significant digits.
std::string format_double(double v);

/// One row per node: decision, perf, energy and slack.
ResultTable decision_table(const Scenario& s, const OptResult& r);

/// Analytical values at the integer point next to the simulated ones.
ResultTable simulation_table(const Scenario& s, const SimPoint& point, const SimStats& st);

/// Network-wide slot probabilities, analytical vs simulated.
ResultTable slot_table(const Scenario& s, const SimPoint& point, const SimStats& st);

ResultTable utility_trace_table(const OptResult& r);

}  // namespace wpcsma

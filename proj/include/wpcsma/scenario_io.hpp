#pragma once

// Scenario, decision-point and solver-config files.
//
// Scenario documents are JSON with the unit in every field name, so table
// values can be typed in as printed:
//
//   {
//     "name": "...",
//     "protocol": {"sigma_us": 9, "sifs_us": 16, "difs_us": 34, "ack_us": 38.67,
//                  "rts_us": 46.67, "cts_us": 38.67, "phy_hdr_us": 20,
//                  "mac_hdr_bytes": 36, "shdr_bytes": 14, "fcs_bytes": 4},
//     "nodes": [{"id": "1",
//                "link": {"l_bytes": 50, "rate_mbps": 11},
//                "duty": {"h": 3, "g": 2, "n_max": 10},
//                "power": {"p_tx_mw": 15, "p_rx_mw": 11.37, "p_listen_mw": 10,
//                          "p_acq_mw": 5, "p_proc_mw": 6, "e_bg_uj": 0,
//                          "phi_mw": 15}}]
//   }
//
// Every quantity also accepts its SI spelling (`sigma_s`, `l_bits`,
// `rate_bps`, `p_tx_w`, `e_bg_j`, ...). Values are converted to SI once at
// load.

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "wpcsma/optimizer.hpp"
#include "wpcsma/scenario.hpp"
#include "wpcsma/simulator.hpp"

namespace wpcsma {

/// Throws InvalidParameter with the offending field path on unknown keys,
/// missing or duplicate quantities, non-numeric values and any Scenario
/// invariant violation.
Scenario scenario_from_json(const nlohmann::json& doc);

/// Emits table units where the value survives the round trip bit for bit,
/// SI otherwise, so scenario_from_json(scenario_to_json(s)) == s.
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& s);

/// Standard timing constants shared by both examples.
ProtocolParams standard_protocol();

/// Built-in copies of the two evaluation networks (1 or 2).
Scenario example_scenario(int which);

/// Decision point file: {"n": [...], "alpha": [...]}. An integer point may
/// instead (or additionally) give "w", "m" and integer "n".
struct PointFile {
  std::optional<DecisionVector> continuous;
  std::optional<SimPoint> integer;
};

PointFile point_from_json(const nlohmann::json& doc, std::size_t nodes);
nlohmann::json point_to_json(const DecisionVector& dv, const IntegerDecision& rounded);
PointFile load_point(const std::filesystem::path& path, std::size_t nodes);

OptimizerConfig optimizer_config_from_json(const nlohmann::json& doc);
nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace wpcsma

#include "wpcsma/scenario_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wpcsma/error.hpp"

namespace wpcsma {
namespace {

using nlohmann::json;

struct Unit {
  const char* suffix;
  double factor;  // SI value = file value * factor
};

// First entry is the unit the tables use, last is SI.
constexpr std::array<Unit, 2> kMicroseconds{{{"us", 1e-6}, {"s", 1.0}}};
constexpr std::array<Unit, 2> kBytes{{{"bytes", 8.0}, {"bits", 1.0}}};
constexpr std::array<Unit, 2> kMbps{{{"mbps", 1e6}, {"bps", 1.0}}};
constexpr std::array<Unit, 2> kMilliwatts{{{"mw", 1e-3}, {"w", 1.0}}};
constexpr std::array<Unit, 2> kMicrojoules{{{"uj", 1e-6}, {"j", 1.0}}};

using Units = std::array<Unit, 2>;

struct Quantity {
  const char* name;
  const Units* units;
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_object(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw InvalidParameter(path + ": expected an object");
  return doc;
}

const json& member(const json& obj, const std::string& key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidParameter(join(path, key) + ": missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw InvalidParameter(path + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InvalidParameter(path + ": must be finite");
  return x;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw InvalidParameter(join(path, key) + ": unknown field");
  }
}

double read_quantity(const json& obj, const Quantity& q, const std::string& path) {
  const json* found = nullptr;
  std::string found_key;
  double factor = 1.0;
  for (const auto& u : *q.units) {
    const std::string key = std::string(q.name) + "_" + u.suffix;
    const auto it = obj.find(key);
    if (it == obj.end()) continue;
    if (found) {
      throw InvalidParameter(join(path, key) + ": duplicates " + join(path, found_key));
    }
    found = &*it;
    found_key = key;
    factor = u.factor;
  }
  if (!found) {
    throw InvalidParameter(join(path, std::string(q.name) + "_" + (*q.units)[0].suffix) +
                           ": missing");
  }
  return as_number(*found, join(path, found_key)) * factor;
}

void write_quantity(json& obj, const Quantity& q, double si) {
  const Unit& table = (*q.units)[0];
  const double v = si / table.factor;
  if (v * table.factor == si) {
    obj[std::string(q.name) + "_" + table.suffix] = v;
  } else {
    obj[std::string(q.name) + "_" + q.units->back().suffix] = si;
  }
}

std::set<std::string> allowed_keys(std::initializer_list<Quantity> qs,
                                   std::initializer_list<const char*> plain = {}) {
  std::set<std::string> out(plain.begin(), plain.end());
  for (const auto& q : qs) {
    for (const auto& u : *q.units) out.insert(std::string(q.name) + "_" + u.suffix);
  }
  return out;
}

const Quantity kSigma{"sigma", &kMicroseconds};
const Quantity kSifs{"sifs", &kMicroseconds};
const Quantity kDifs{"difs", &kMicroseconds};
const Quantity kAck{"ack", &kMicroseconds};
const Quantity kRts{"rts", &kMicroseconds};
const Quantity kCts{"cts", &kMicroseconds};
const Quantity kPhyHdr{"phy_hdr", &kMicroseconds};
const Quantity kMacHdr{"mac_hdr", &kBytes};
const Quantity kShdr{"shdr", &kBytes};
const Quantity kFcs{"fcs", &kBytes};
const Quantity kPayload{"l", &kBytes};
const Quantity kRate{"rate", &kMbps};
const Quantity kTx{"p_tx", &kMilliwatts};
const Quantity kRx{"p_rx", &kMilliwatts};
const Quantity kListen{"p_listen", &kMilliwatts};
const Quantity kAcq{"p_acq", &kMilliwatts};
const Quantity kProc{"p_proc", &kMilliwatts};
const Quantity kBg{"e_bg", &kMicrojoules};
const Quantity kPhi{"phi", &kMilliwatts};

ProtocolParams protocol_from_json(const json& doc, const std::string& path) {
  require_object(doc, path);
  reject_unknown(doc,
                 allowed_keys({kSigma, kSifs, kDifs, kAck, kRts, kCts, kPhyHdr, kMacHdr, kShdr,
                               kFcs}),
                 path);
  ProtocolParams p;
  p.sigma = read_quantity(doc, kSigma, path);
  p.t_sifs = read_quantity(doc, kSifs, path);
  p.t_difs = read_quantity(doc, kDifs, path);
  p.t_ack = read_quantity(doc, kAck, path);
  p.t_rts = read_quantity(doc, kRts, path);
  p.t_cts = read_quantity(doc, kCts, path);
  p.t_phy_hdr = read_quantity(doc, kPhyHdr, path);
  p.l_mac_hdr = read_quantity(doc, kMacHdr, path);
  p.l_shdr = read_quantity(doc, kShdr, path);
  p.l_fcs = read_quantity(doc, kFcs, path);
  return p;
}

json protocol_to_json(const ProtocolParams& p) {
  json out = json::object();
  write_quantity(out, kSigma, p.sigma);
  write_quantity(out, kSifs, p.t_sifs);
  write_quantity(out, kDifs, p.t_difs);
  write_quantity(out, kAck, p.t_ack);
  write_quantity(out, kRts, p.t_rts);
  write_quantity(out, kCts, p.t_cts);
  write_quantity(out, kPhyHdr, p.t_phy_hdr);
  write_quantity(out, kMacHdr, p.l_mac_hdr);
  write_quantity(out, kShdr, p.l_shdr);
  write_quantity(out, kFcs, p.l_fcs);
  return out;
}

NodeConfig node_from_json(const json& doc, const std::string& path) {
  require_object(doc, path);
  reject_unknown(doc, {"id", "link", "duty", "power"}, path);
  NodeConfig nd;
  if (const auto it = doc.find("id"); it != doc.end()) {
    if (!it->is_string()) throw InvalidParameter(join(path, "id") + ": expected a string");
    nd.id = it->get<std::string>();
  }

  const std::string link_path = join(path, "link");
  const auto& link = require_object(member(doc, "link", path), link_path);
  reject_unknown(link, allowed_keys({kPayload, kRate}), link_path);
  nd.l = read_quantity(link, kPayload, link_path);
  nd.rate = read_quantity(link, kRate, link_path);

  const std::string duty_path = join(path, "duty");
  const auto& duty = require_object(member(doc, "duty", path), duty_path);
  reject_unknown(duty, {"h", "g", "n_max"}, duty_path);
  nd.duty.h = as_number(member(duty, "h", duty_path), join(duty_path, "h"));
  nd.duty.g = as_number(member(duty, "g", duty_path), join(duty_path, "g"));
  nd.duty.n_max = as_number(member(duty, "n_max", duty_path), join(duty_path, "n_max"));

  const std::string power_path = join(path, "power");
  const auto& power = require_object(member(doc, "power", path), power_path);
  reject_unknown(power, allowed_keys({kTx, kRx, kListen, kAcq, kProc, kBg, kPhi}), power_path);
  nd.power.p_tx = read_quantity(power, kTx, power_path);
  nd.power.p_rx = read_quantity(power, kRx, power_path);
  nd.power.p_listen = read_quantity(power, kListen, power_path);
  nd.power.p_acq = read_quantity(power, kAcq, power_path);
  nd.power.p_proc = read_quantity(power, kProc, power_path);
  nd.power.e_bg = read_quantity(power, kBg, power_path);
  nd.power.phi = read_quantity(power, kPhi, power_path);
  return nd;
}

json node_to_json(const NodeConfig& nd) {
  json link = json::object();
  write_quantity(link, kPayload, nd.l);
  write_quantity(link, kRate, nd.rate);
  json duty = {{"h", nd.duty.h}, {"g", nd.duty.g}, {"n_max", nd.duty.n_max}};
  json power = json::object();
  write_quantity(power, kTx, nd.power.p_tx);
  write_quantity(power, kRx, nd.power.p_rx);
  write_quantity(power, kListen, nd.power.p_listen);
  write_quantity(power, kAcq, nd.power.p_acq);
  write_quantity(power, kProc, nd.power.p_proc);
  write_quantity(power, kBg, nd.power.e_bg);
  write_quantity(power, kPhi, nd.power.phi);
  return {{"id", nd.id}, {"link", link}, {"duty", duty}, {"power", power}};
}

// Table values go through the same conversion as a loaded file so the
// built-in scenarios compare equal to their JSON copies.
NodeConfig table_node(std::string id, double l_bytes, double rate_mbps, double n_max,
                      double p_tx_mw, double p_rx_mw, double p_listen_mw, double phi_mw) {
  NodeConfig nd;
  nd.id = std::move(id);
  nd.l = l_bytes * 8.0;
  nd.rate = rate_mbps * 1e6;
  nd.duty = DutyCycle{3.0, 2.0, n_max};
  nd.power.p_tx = p_tx_mw * 1e-3;
  nd.power.p_rx = p_rx_mw * 1e-3;
  nd.power.p_listen = p_listen_mw * 1e-3;
  nd.power.p_acq = 5.0 * 1e-3;
  nd.power.p_proc = 6.0 * 1e-3;
  nd.power.e_bg = 0.0;
  nd.power.phi = phi_mw * 1e-3;
  return nd;
}

std::vector<double> number_list(const json& v, const std::string& path, std::size_t nodes) {
  if (!v.is_array()) throw InvalidParameter(path + ": expected an array");
  if (v.size() != nodes) {
    throw InvalidParameter(path + ": expected " + std::to_string(nodes) + " entries, got " +
                           std::to_string(v.size()));
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<int> int_list(const json& v, const std::string& path, std::size_t nodes) {
  const auto xs = number_list(v, path, nodes);
  std::vector<int> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] != std::floor(xs[i]) || std::abs(xs[i]) > 1e9) {
      throw InvalidParameter(path + "[" + std::to_string(i) + "]: expected an integer");
    }
    out.push_back(static_cast<int>(xs[i]));
  }
  return out;
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
  require_object(doc, "scenario");
  reject_unknown(doc, {"name", "protocol", "nodes"}, "");
  Scenario s;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw InvalidParameter("name: expected a string");
    s.name = it->get<std::string>();
  }
  s.protocol = protocol_from_json(member(doc, "protocol", ""), "protocol");
  const auto& nodes = member(doc, "nodes", "");
  if (!nodes.is_array()) throw InvalidParameter("nodes: expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    s.nodes.push_back(node_from_json(nodes[i], "nodes[" + std::to_string(i) + "]"));
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json nodes = json::array();
  for (const auto& nd : s.nodes) nodes.push_back(node_to_json(nd));
  return {{"name", s.name}, {"protocol", protocol_to_json(s.protocol)}, {"nodes", nodes}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter(path.string() + ": cannot open");
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  try {
    return scenario_from_json(doc);
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

void save_scenario(const std::filesystem::path& path, const Scenario& s) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter(path.string() + ": cannot write");
  out << scenario_to_json(s).dump(2) << '\n';
}

ProtocolParams standard_protocol() {
  ProtocolParams p;
  p.sigma = 9.0 * 1e-6;
  p.t_sifs = 16.0 * 1e-6;
  p.t_difs = 34.0 * 1e-6;
  p.t_ack = 38.67 * 1e-6;
  p.t_rts = 46.67 * 1e-6;
  p.t_cts = 38.67 * 1e-6;
  p.t_phy_hdr = 20.0 * 1e-6;
  p.l_mac_hdr = 36.0 * 8.0;
  p.l_shdr = 14.0 * 8.0;
  p.l_fcs = 4.0 * 8.0;
  return p;
}

Scenario example_scenario(int which) {
  Scenario s;
  s.protocol = standard_protocol();
  if (which == 1) {
    // Only the 10-sample node is identified in the text; the other caps are
    // an assumption.
    s.name = "example1";
    for (int i = 0; i < 6; ++i) {
      s.nodes.push_back(table_node(std::to_string(i + 1), 50.0, 11.0, 10.0 * (i + 1), 15.0,
                                   11.37, 10.0, 15.0));
    }
  } else if (which == 2) {
    s.name = "example2";
    const std::array<double, 6> rate{5.5, 5.5, 6.0, 9.0, 11.0, 12.0};
    for (int i = 0; i < 6; ++i) {
      const double p_rx = 15.0 - i;
      s.nodes.push_back(table_node(std::to_string(i + 1), 10.0, rate[i], 10.0, 1.32 * p_rx,
                                   p_rx, 9.0, 10.0 + i));
    }
  } else {
    throw InvalidParameter("experiment must be 1 or 2");
  }
  s.validate();
  return s;
}

PointFile point_from_json(const json& doc, std::size_t nodes) {
  require_object(doc, "point");
  reject_unknown(doc, {"n", "alpha", "integer"}, "");
  PointFile out;
  const bool has_n = doc.contains("n");
  const bool has_alpha = doc.contains("alpha");
  if (has_n != has_alpha) throw InvalidParameter("point: n and alpha must be given together");
  if (has_alpha) {
    DecisionVector dv;
    dv.n = number_list(doc["n"], "n", nodes);
    dv.alpha = number_list(doc["alpha"], "alpha", nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      if (!(dv.alpha[i] > 0.0)) {
        throw InvalidParameter("alpha[" + std::to_string(i) + "]: must be positive");
      }
      if (!(dv.n[i] >= 1.0)) throw InvalidParameter("n[" + std::to_string(i) + "]: must be >= 1");
    }
    out.continuous = std::move(dv);
  }
  if (const auto it = doc.find("integer"); it != doc.end()) {
    require_object(*it, "integer");
    reject_unknown(*it, {"n", "w", "m"}, "integer");
    SimPoint sp;
    sp.n = int_list(member(*it, "n", "integer"), "integer.n", nodes);
    sp.w = int_list(member(*it, "w", "integer"), "integer.w", nodes);
    sp.m = int_list(member(*it, "m", "integer"), "integer.m", nodes);
    sp.validate(nodes);
    out.integer = std::move(sp);
  }
  if (!out.continuous && !out.integer) {
    throw InvalidParameter("point: needs n and alpha, or an integer block");
  }
  return out;
}

json point_to_json(const DecisionVector& dv, const IntegerDecision& rounded) {
  return {{"n", dv.n},
          {"alpha", dv.alpha},
          {"integer", {{"n", rounded.n}, {"w", rounded.w}, {"m", rounded.m}}}};
}

PointFile load_point(const std::filesystem::path& path, std::size_t nodes) {
  try {
    return point_from_json(read_json_file(path), nodes);
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
}

OptimizerConfig optimizer_config_from_json(const json& doc) {
  require_object(doc, "config");
  reject_unknown(doc,
                 {"outer_tol", "inner_tol", "max_outer_iters", "max_inner_iters", "alpha_floor",
                  "alpha_max"},
                 "");
  OptimizerConfig cfg;
  auto num = [&](const char* key, double& dst) {
    if (const auto it = doc.find(key); it != doc.end()) dst = as_number(*it, key);
  };
  auto count = [&](const char* key, int& dst) {
    if (const auto it = doc.find(key); it != doc.end()) {
      if (!it->is_number_integer()) throw InvalidParameter(std::string(key) + ": expected an integer");
      dst = it->get<int>();
    }
  };
  num("outer_tol", cfg.outer_tol);
  num("inner_tol", cfg.inner_tol);
  count("max_outer_iters", cfg.max_outer_iters);
  count("max_inner_iters", cfg.max_inner_iters);
  num("alpha_floor", cfg.alpha_floor);
  num("alpha_max", cfg.alpha_max);
  cfg.validate();
  return cfg;
}

json optimizer_config_to_json(const OptimizerConfig& cfg) {
  return {{"outer_tol", cfg.outer_tol},         {"inner_tol", cfg.inner_tol},
          {"max_outer_iters", cfg.max_outer_iters}, {"max_inner_iters", cfg.max_inner_iters},
          {"alpha_floor", cfg.alpha_floor},     {"alpha_max", cfg.alpha_max}};
}

}  // namespace wpcsma

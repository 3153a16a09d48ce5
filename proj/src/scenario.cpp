#include "wpcsma/scenario.hpp"

#include <cmath>
#include <string>

#include "wpcsma/error.hpp"

namespace wpcsma {
namespace {

std::string field(std::size_t i, const char* path) {
  return "nodes[" + std::to_string(i) + "]." + path;
}

void require(bool ok, std::size_t i, const char* path, const char* what) {
  if (!ok) throw InvalidParameter(field(i, path) + ": " + what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void Scenario::validate() const {
  protocol.validate();
  if (nodes.empty()) throw InvalidParameter("scenario must contain at least one node");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& nd = nodes[i];
    require(std::isfinite(nd.l) && nd.l > 0.0, i, "link.l", "must be positive");
    require(std::isfinite(nd.rate) && nd.rate > 0.0, i, "link.rate", "must be positive");
    require(std::isfinite(nd.duty.h) && nd.duty.h >= 1.0, i, "duty.h", "must be >= 1");
    require(std::isfinite(nd.duty.g) && nd.duty.g >= 1.0, i, "duty.g", "must be >= 1");
    require(std::isfinite(nd.duty.n_max) && nd.duty.n_max >= 1.0, i, "duty.n_max",
            "must be >= 1");
    require(finite_nonneg(nd.power.p_tx), i, "power.p_tx", "must be >= 0");
    require(finite_nonneg(nd.power.p_rx), i, "power.p_rx", "must be >= 0");
    require(finite_nonneg(nd.power.p_listen), i, "power.p_listen", "must be >= 0");
    require(finite_nonneg(nd.power.p_acq), i, "power.p_acq", "must be >= 0");
    require(finite_nonneg(nd.power.p_proc), i, "power.p_proc", "must be >= 0");
    require(finite_nonneg(nd.power.e_bg), i, "power.e_bg", "must be >= 0");
    require(std::isfinite(nd.power.phi) && nd.power.phi > 0.0, i, "power.phi", "must be positive");
  }
}

}  // namespace wpcsma

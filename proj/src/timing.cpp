#include "wpcsma/timing.hpp"

#include <cmath>
#include <string>

#include "wpcsma/error.hpp"

namespace wpcsma {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidParameter(std::string("protocol.") + name + " must be positive and finite");
  }
}

void require_rate(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw InvalidParameter("link.rate must be positive and finite");
  }
}

}  // namespace

void ProtocolParams::validate() const {
  require_positive(sigma, "sigma");
  require_positive(t_sifs, "t_sifs");
  require_positive(t_difs, "t_difs");
  require_positive(t_ack, "t_ack");
  require_positive(t_rts, "t_rts");
  require_positive(t_cts, "t_cts");
  require_positive(t_phy_hdr, "t_phy_hdr");
  require_positive(l_mac_hdr, "l_mac_hdr");
  require_positive(l_shdr, "l_shdr");
  require_positive(l_fcs, "l_fcs");
  if (!(t_difs > t_sifs)) {
    throw InvalidParameter("protocol.t_difs must exceed protocol.t_sifs");
  }
}

void NodeLinkParams::validate() const {
  if (!(l > 0.0) || !std::isfinite(l)) throw InvalidParameter("link.l must be positive");
  require_rate(rate);
  if (!(n >= 1.0) || !std::isfinite(n)) throw InvalidParameter("link.n must be >= 1");
}

double overhead_t_o(const ProtocolParams& p, double rate) {
  require_rate(rate);
  return p.t_phy_hdr + p.l_mac_hdr / rate + p.l_fcs / rate;
}

double per_sample_airtime(const ProtocolParams& p, double l, double rate) {
  require_rate(rate);
  return l / rate + p.l_shdr / rate;
}

double t_amsdu(const ProtocolParams& p, const NodeLinkParams& link) {
  if (!(link.n >= 0.0)) throw InvalidParameter("link.n must be non-negative");
  return overhead_t_o(p, link.rate) + link.n * per_sample_airtime(p, link.l, link.rate);
}

SuccessTiming t_success(const ProtocolParams& p, const NodeLinkParams& link) {
  SuccessTiming out;
  out.overhead = overhead_t_o(p, link.rate) + p.t_rts + p.t_cts + 3.0 * p.t_sifs + p.t_ack;
  if (!(link.n >= 0.0)) throw InvalidParameter("link.n must be non-negative");
  out.total = out.overhead + link.n * per_sample_airtime(p, link.l, link.rate);
  return out;
}

CollisionTiming t_collision(const ProtocolParams& p) {
  CollisionTiming out;
  out.timeout = p.t_sifs + p.t_cts + p.sigma;
  out.total = p.t_rts + out.timeout;
  return out;
}

}  // namespace wpcsma

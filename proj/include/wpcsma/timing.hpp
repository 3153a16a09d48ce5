#pragma once

// Frame and event durations of an 802.11 DCF exchange using RTS/CTS and an
// A-MSDU aggregate. All durations are in seconds, sizes in bits, rates in
// bits per second.

namespace wpcsma {

/// Global MAC/PHY timing constants shared by every node.
struct ProtocolParams {
  double sigma = 0.0;      // physical slot
  double t_sifs = 0.0;
  double t_difs = 0.0;
  double t_ack = 0.0;
  double t_rts = 0.0;
  double t_cts = 0.0;
  double t_phy_hdr = 0.0;
  double l_mac_hdr = 0.0;  // bits
  double l_shdr = 0.0;     // bits, A-MSDU sub-frame header
  double l_fcs = 0.0;      // bits

  /// Throws InvalidParameter unless every duration and size is positive and
  /// DIFS exceeds SIFS.
  void validate() const;

  friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Per-node link parameters that enter frame durations. `n` (samples per
/// cycle, one A-MSDU sub-frame each) is real-valued because the optimizer
/// treats it continuously.
struct NodeLinkParams {
  double l = 0.0;     // payload bits per sample
  double rate = 0.0;  // PHY data rate, bits/s
  double n = 1.0;

  void validate() const;
};

struct SuccessTiming {
  double overhead = 0.0;  // fixed part: T^o + RTS + CTS + 3 SIFS + ACK
  double total = 0.0;     // overhead + n * (l/R + T^shdr)
};

struct CollisionTiming {
  double timeout = 0.0;  // CTS timeout: SIFS + CTS + sigma
  double total = 0.0;    // RTS + timeout
};

/// PHY header plus MAC header and FCS clocked at `rate`.
double overhead_t_o(const ProtocolParams& p, double rate);

/// Airtime of one A-MSDU sub-frame carrying one sample: l/R + l_shdr/R.
double per_sample_airtime(const ProtocolParams& p, double l, double rate);

/// A-MSDU frame duration. Accepts n = 0 (bare overhead).
double t_amsdu(const ProtocolParams& p, const NodeLinkParams& link);

SuccessTiming t_success(const ProtocolParams& p, const NodeLinkParams& link);

CollisionTiming t_collision(const ProtocolParams& p);

}  // namespace wpcsma

#pragma once

#include "tierplan/model.hpp"
#include "tierplan/units.hpp"

namespace tierplan {

// Alpha-beta link: a fixed round-trip latency plus a serialization time
// proportional to payload size.
struct LinkSpec {
  double bandwidth_bps = 0;  // bits per second
  Duration rtt = kZero;

  void validate() const;
};

// Per-token payload sizes for the three transfer paths. Element counts
// come from the activation (D), query (D) and key/value (D_kv each)
// vectors; widths from the model's dtype.
struct PayloadModel {
  Bytes tier1_to_tier2_per_token = 0;  // dtype_bytes * (2D + 2D_kv)
  Bytes tier2_to_tier1_per_token = 0;  // dtype_bytes * 2D
  Bytes intra_tier1_per_token = 0;     // dtype_bytes * D

  static PayloadModel for_model(const TransformerSpec& spec);
};

// Pure serialization time: payload_bytes * 8 / bandwidth, no latency term.
Duration transfer_time(const LinkSpec& link, Bytes payload_bytes);

// rtt/2 + payload * 8 / bandwidth.
Duration one_way_transfer_time(const LinkSpec& link, Bytes payload_bytes);

// rtt + (fwd + bwd) * 8 / bandwidth.
Duration round_trip_transfer_time(const LinkSpec& link, Bytes fwd_bytes, Bytes bwd_bytes);

// Total Tier-1 egress in bits/s at a sustained token rate:
// K * ceil(N/K) * dtype_bytes * (2D + 2D_kv) * tokens_per_sec * 8.
double tier1_total_egress_bps(Count tier1_nodes, const TransformerSpec& spec,
                              double tokens_per_sec);

// Same shape with the smaller return payload: dtype_bytes * 2D per token.
double tier2_total_egress_bps(Count tier1_nodes, const TransformerSpec& spec,
                              double tokens_per_sec);

}  // namespace tierplan

#include "tierplan/netmodel.hpp"

#include <cmath>

#include "tierplan/errors.hpp"

namespace tierplan {

void LinkSpec::validate() const {
  if (bandwidth_bps <= 0) {
    throw ValidationError("link: bandwidth must be positive");
  }
  if (rtt < kZero) {
    throw ValidationError("link: rtt must be non-negative");
  }
}

PayloadModel PayloadModel::for_model(const TransformerSpec& spec) {
  PayloadModel p;
  p.tier1_to_tier2_per_token = spec.dtype_bytes * (2 * spec.d_model + 2 * spec.d_kv);
  p.tier2_to_tier1_per_token = spec.dtype_bytes * 2 * spec.d_model;
  p.intra_tier1_per_token = spec.dtype_bytes * spec.d_model;
  return p;
}

Duration transfer_time(const LinkSpec& link, Bytes payload_bytes) {
  const double seconds = static_cast<double>(payload_bytes) * 8.0 / link.bandwidth_bps;
  return Duration{std::llround(seconds * 1e9)};
}

Duration one_way_transfer_time(const LinkSpec& link, Bytes payload_bytes) {
  return Duration{link.rtt.count() / 2} + transfer_time(link, payload_bytes);
}

Duration round_trip_transfer_time(const LinkSpec& link, Bytes fwd_bytes, Bytes bwd_bytes) {
  return link.rtt + transfer_time(link, fwd_bytes + bwd_bytes);
}

namespace {

double egress_bps(Count tier1_nodes, const TransformerSpec& spec,
                  double tokens_per_sec, Bytes bytes_per_token) {
  const Count layers_per_node = ceil_div(spec.n_layers, tier1_nodes);
  return static_cast<double>(tier1_nodes) * static_cast<double>(layers_per_node) *
         static_cast<double>(bytes_per_token) * tokens_per_sec * 8.0;
}

}  // namespace

double tier1_total_egress_bps(Count tier1_nodes, const TransformerSpec& spec,
                              double tokens_per_sec) {
  if (tier1_nodes == 0) {
    throw ValidationError("tier1_total_egress: need at least one Tier-1 node");
  }
  return egress_bps(tier1_nodes, spec, tokens_per_sec,
                    PayloadModel::for_model(spec).tier1_to_tier2_per_token);
}

double tier2_total_egress_bps(Count tier1_nodes, const TransformerSpec& spec,
                              double tokens_per_sec) {
  if (tier1_nodes == 0) {
    throw ValidationError("tier2_total_egress: need at least one Tier-1 node");
  }
  return egress_bps(tier1_nodes, spec, tokens_per_sec,
                    PayloadModel::for_model(spec).tier2_to_tier1_per_token);
}

}  // namespace tierplan

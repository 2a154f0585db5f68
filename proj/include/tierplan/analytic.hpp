#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tierplan/model.hpp"
#include "tierplan/netmodel.hpp"
#include "tierplan/profiles.hpp"
#include "tierplan/units.hpp"

namespace tierplan {

// In-flight batches needed to keep a K-way pipeline over N layers busy:
// ceil(1 + K*t_n / (N*t_c)) * K. t_n is the one-way inter-node time.
Count if_pp(Count tier1_nodes, Count n_layers, Duration t_c, Duration t_n);

// Tensor-parallel variant: ceil(1 + t_n / (t_c_min / K)). t_c_min is the
// smallest per-barrier stage latency on a single node.
Count if_tp(Count tier1_nodes, Duration t_c_min, Duration t_n);

// Two-tier variant: ceil(1 + (t_att + t_n) / t_noatt) hides the Tier-2
// round-trip (attention plus transit) behind Tier-1 compute.
Count if_gh(Duration t_att, Duration t_n_roundtrip, Duration t_noatt);

struct MaxBatch {
  Count batch = 0;
  Count inflight = 0;
};

struct MaxBatchTwoTier {
  Count tier1_batch = 0;  // B*K'
  Count tier2_batch = 0;  // per-shard batch B
  Count inflight_gh = 0;
  Count inflight_pp = 0;
};

// Largest B with B * if_pp(B) <= context_slots, compute and transfer times
// evaluated at B from the profile and link. The per-layer compute time is
// NonAttention(B) plus Attention(B) when the profile carries an attention
// stage. Throws FeasibilityError when no batch fits.
MaxBatch max_batch_pp(Count tier1_nodes, Count n_layers, Count context_slots,
                      const KernelProfile& profile, const LinkSpec& link,
                      const TransformerSpec& spec);

// Tensor-parallel counterpart. The profile's NonAttention entries are read
// as the smallest per-synchronization-barrier latencies t_c_min(B); the
// caller decides the barrier granularity when building the profile.
MaxBatch max_batch_tp(Count tier1_nodes, Count context_slots,
                      const KernelProfile& min_stage_profile, const LinkSpec& link,
                      const TransformerSpec& spec);

// Two-tier search over the Tier-1 batch B*K'. Tier-2 nodes each receive a
// balanced shard (sizes differ by at most 1; latency is evaluated at the
// largest shard). Constraint: B*K' * if_gh * if_pp <= context_slots.
MaxBatchTwoTier max_batch_gh(Count tier1_nodes, Count tier2_per_tier1,
                             Count context_slots, const KernelProfile& tier1_profile,
                             const KernelProfile& tier2_profile,
                             const LinkSpec& inter_tier, const LinkSpec& intra_tier1,
                             const TransformerSpec& spec);

// Retail unit prices by device name.
struct CostTable {
  std::map<std::string, double> unit_price_usd;

  // Throws ValidationError when the device is missing from the table.
  double price_for(const std::string& device_name) const;
};

// CSV with header `device,unit_price_usd`.
CostTable load_cost_table(const std::string& path);
CostTable parse_cost_table(std::istream& in, const std::string& origin);

// (sum of node counts * unit prices) / throughput.
double cost_per_throughput(const std::vector<std::pair<std::string, Count>>& nodes,
                           const CostTable& table, double throughput_tps);

}  // namespace tierplan

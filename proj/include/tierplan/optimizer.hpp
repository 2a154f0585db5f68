#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tierplan/analytic.hpp"
#include "tierplan/des.hpp"
#include "tierplan/model.hpp"
#include "tierplan/netmodel.hpp"
#include "tierplan/profiles.hpp"

namespace tierplan {

struct TierSpec {
  std::string device_name;
  Count node_count_max = 0;
  Bytes memory_bytes_per_node = 0;
  std::optional<double> unit_cost;
};

struct ClusterSpec {
  TierSpec tier1;
  TierSpec tier2;  // node_count_max 0 when the cluster is single-tier only
  LinkSpec inter_tier;
  LinkSpec intra_tier1;
  std::optional<double> oversubscription;

  void validate() const;
  // Paged-cache oversubscription factor; defaults to 3.0 for two-tier
  // layouts and 2.0 for single-tier ones.
  double oversubscription_for(bool two_tier) const;
};

ClusterSpec load_cluster_spec(const std::string& path);
ClusterSpec parse_cluster_spec(std::istream& in, const std::string& origin);

// Contiguous layer spans per node; remainder layers go to the lowest ranks.
std::vector<Count> layer_spans(Count n_layers, Count nodes);

// Weight bytes resident per node; the embedding/classifier share (when
// vocab_size is present) lands on node 0.
std::vector<Bytes> node_weight_bytes(const TransformerSpec& spec, Count tier1_nodes);

bool weights_fit(const TransformerSpec& spec, Count tier1_nodes, Bytes memory_per_node);

// In-flight prompt capacity. Every in-flight prompt pins a KV slice on
// every node (proportional to the layers that node hosts), so capacity is
// the minimum over nodes, not the sum.
Count single_tier_context_slots(const TransformerSpec& spec, Count tier1_nodes,
                                Bytes memory_per_node, Count seq_len);

// Two-tier capacity comes from Tier-2 memory only; each Tier-1 node's K'
// attention nodes hold the slices for its layers. A fixed 5% of Tier-2
// memory is reserved for the runtime.
Count two_tier_context_slots(const TransformerSpec& spec, Count tier1_nodes,
                             Count tier2_per_tier1, Bytes tier2_memory_per_node,
                             Count seq_len);

// floor(oversubscription * context_slots / tier1_batch).
Count inflight_count(Count context_slots, Count tier1_batch, double oversubscription);

struct CandidateConfig {
  Count tier1_nodes = 0;     // K
  Count tier2_per_tier1 = 0; // K'; 0 denotes the single-tier baseline
  Count batch = 0;           // Tier-2 shard batch, or the batch when K'=0
};

// All (K, K', B) with K hosting the weights, K'*K within the Tier-2 node
// budget, and B drawn from `grid` with B*max(K',1) <= tier1_batch_cap.
std::vector<CandidateConfig> enumerate_configs(const ClusterSpec& cluster,
                                               const TransformerSpec& spec,
                                               const std::vector<Count>& grid,
                                               Count tier1_batch_cap);

enum class ObjectiveKind { MaxThroughput, MinCostPerThroughput };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::MaxThroughput;
  std::optional<Count> max_nodes;
  std::optional<double> max_cost;
};

enum class BindingConstraint { Memory, Compute, Bandwidth, None };
const char* binding_constraint_name(BindingConstraint b);

// Resource class of the busiest occupying pipe in a finished simulation.
BindingConstraint classify_bottleneck(const SimReport& sim);

struct ConfigResult {
  Count tier1_nodes = 0;
  Count tier2_per_tier1 = 0;
  Count batch = 0;
  Count tier1_batch = 0;
  Count inflight = 0;
  Count inflight_required = 0;   // analytic minimum for full utilization
  Count inflight_available = 0;  // oversubscribed capacity allows
  Count context_slots = 0;
  bool feasible = false;
  BindingConstraint binding = BindingConstraint::None;
  double throughput_tps = 0;
  double tbt_ns = 0;
  double cost_usd = 0;            // NaN when no price is known
  double cost_per_throughput = 0; // NaN when no price is known
};

enum class IfPolicy { MaxAvailable, AnalyticMinimum };

struct EvaluateOptions {
  Count seq_len = 0;  // 0 -> spec.max_seq_len; also picks the profile seq axis
  std::optional<double> oversubscription;
  IfPolicy if_policy = IfPolicy::MaxAvailable;
  SimOptions sim;
};

// Derived DES stage delays for an explicit configuration.
TwoTierStageLatencies derive_two_tier_latencies(const TransformerSpec& spec,
                                                const KernelProfile& tier1_profile,
                                                const KernelProfile& tier2_profile,
                                                const LinkSpec& inter_tier,
                                                Count shard_batch, Count tier2_per_tier1,
                                                std::optional<Count> seq_len);
SingleTierStageLatencies derive_single_tier_latencies(const TransformerSpec& spec,
                                                      const KernelProfile& tier1_profile,
                                                      const LinkSpec& intra_tier1,
                                                      Count batch,
                                                      std::optional<Count> seq_len);

// Simulates one configuration and fills a ConfigResult. A config is
// feasible when the oversubscribed context capacity admits the analytic
// in-flight minimum (the max-batch-size constraint); otherwise it is
// reported with binding = Memory. `costs` may be null.
ConfigResult evaluate(const CandidateConfig& config, const ClusterSpec& cluster,
                      const TransformerSpec& spec, const KernelProfile& tier1_profile,
                      const KernelProfile* tier2_profile, const CostTable* costs,
                      const EvaluateOptions& options);

struct OptimizeOptions {
  EvaluateOptions eval;
  Count threads = 1;
  bool refine = false;  // re-search integer batches around the grid optimum
};

struct OptimizeOutcome {
  ConfigResult best;
  std::vector<ConfigResult> ranked;  // feasible first, objective order
};

// Exhaustive argmax over enumerate_configs. Ties break by lower cost,
// then lower K, K', B. Throws FeasibilityError when nothing is feasible.
OptimizeOutcome optimize(const ClusterSpec& cluster, const TransformerSpec& spec,
                         const KernelProfile& tier1_profile,
                         const KernelProfile* tier2_profile, const CostTable* costs,
                         const Objective& objective, const OptimizeOptions& options);

// Builds the price table for a run: explicit table entries take
// precedence, cluster unit_cost fields fill the gaps.
CostTable resolve_cost_table(const ClusterSpec& cluster, const CostTable* explicit_table);

}  // namespace tierplan

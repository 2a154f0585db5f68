#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tierplan/units.hpp"

namespace tierplan {

enum class PipeKind { ComputeNode, Link, StaticDelay };

// Which queued batch a pipe serves next. LatestStageFirst drains batches
// that are further along the transformer; EarliestStageFirst is the
// literal order written in the simulation pseudocode. Ties break by
// (timestamp, batch id) either way, making the event order total.
enum class PopOrder { LatestStageFirst, EarliestStageFirst };

struct SimOptions {
  Count warmup_passes = 2;   // generations discarded before measuring
  Count iterations = 8;      // measured generations (E)
  PopOrder pop_order = PopOrder::LatestStageFirst;
  bool retain_event_log = false;
  bool track_utilization = false;
  Count iteration_cap = 100000;
};

// Two-tier per-layer stage delays, in pipeline order:
// Tier-1 non-attention, Tier-1->Tier-2 link, half RTT, Tier-2 attention,
// Tier-2->Tier-1 link, half RTT (the RTT halves share `inter_rtt`).
struct TwoTierStageLatencies {
  Duration tier1_compute = kZero;
  Duration link_fwd = kZero;
  Duration inter_rtt = kZero;  // full RTT; applied as two half-RTT delays
  Duration tier2_compute = kZero;
  Duration link_bwd = kZero;
};

// Single-tier per-layer stage delays: fused compute (non-attention plus
// attention), inter-node link, half RTT.
struct SingleTierStageLatencies {
  Duration compute = kZero;
  Duration link = kZero;
  Duration rtt = kZero;  // full RTT; applied as one half-RTT delay per layer
};

struct EventRecord {
  Count seq = 0;
  Count pipe = 0;
  Count batch = 0;
  Count stage = 0;
  Duration enqueue = kZero;
  Duration start = kZero;
  Duration finish = kZero;
};

struct ConfigEcho {
  Count tier1_nodes = 0;     // K
  Count tier2_per_tier1 = 0; // K', 0 for single-tier
  Count batch = 0;           // Tier-2 shard batch (two-tier) or the batch
  Count tier1_batch = 0;     // B*K' (two-tier) or B
  Count inflight = 0;        // IF
};

struct LatencyBreakdown {
  Duration compute = kZero;
  Duration transit = kZero;       // link occupancy
  Duration static_delay = kZero;  // RTT terms
  Duration queue_wait = kZero;
  Count passes = 0;
};

struct SimReport {
  std::vector<Duration> gen_ts;  // post-warm-up arrivals of batch 0 at stage 0
  double tbt_ns = 0;             // mean inter-arrival, 0 when iterations < 2
  double throughput_tps = 0;     // B_total * IF / tbt
  ConfigEcho config_echo;

  // Whole-run busy fraction per pipe, for bottleneck classification.
  std::vector<double> pipe_busy_fraction;
  std::vector<PipeKind> pipe_kinds;

  // Post-warm-up-window utilization per node; filled when
  // SimOptions::track_utilization is set.
  std::vector<double> tier1_utilization;
  std::vector<double> tier2_utilization;

  std::optional<std::vector<EventRecord>> event_log;
};

// Simulates the two-tier pipeline: 6 stages per layer, one pipe group per
// Tier-1 node (the K' Tier-2 nodes of a group act in parallel on shards
// and are modeled as one pipe at the largest-shard latency; their
// transfers serialize onto the owning node's NIC as one FIFO link).
// Layers are assigned contiguously, remainder to the lowest-ranked nodes.
SimReport simulate_two_tier(Count n_layers, Count tier1_nodes, Count tier2_per_tier1,
                            Count shard_batch, Count inflight,
                            const TwoTierStageLatencies& latencies,
                            const SimOptions& options = {});

// Single-tier pipeline: 3 stages per layer.
SimReport simulate_single_tier(Count n_layers, Count tier1_nodes, Count batch,
                               Count inflight, const SingleTierStageLatencies& latencies,
                               const SimOptions& options = {});

// B_total * IF / mean(delta gen_ts). Throws ValidationError with fewer
// than 2 timestamps.
double throughput_from(const std::vector<Duration>& gen_ts, Count batch_total,
                       Count inflight);

// Per-token-pass totals for batch 0 over the measured window; the four
// components sum to the window span exactly. Requires a retained log.
LatencyBreakdown latency_breakdown(const SimReport& report);

}  // namespace tierplan

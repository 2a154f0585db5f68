#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tierplan/optimizer.hpp"
#include "tierplan/units.hpp"

namespace tierplan {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasible = 3;

struct OutputArgs {
  std::optional<std::string> json_path;
  std::optional<std::string> csv_path;
  std::string timestamp;  // empty keeps reports reproducible
};

struct AnalyzeArgs {
  std::string model_path;
  std::string cluster_path;
  std::vector<std::string> profile_paths;  // Tier-1 first, Tier-2 second
  std::optional<Count> seq_len;
  std::optional<double> tokens_per_sec;
  std::optional<Count> tier1_nodes;      // defaults to the cluster maximum
  std::optional<Count> tier2_per_tier1;  // defaults to tier2.max / K
  OutputArgs out;
  std::vector<std::string> raw_args;
};

struct SweepRange {
  std::int64_t begin = 0;
  std::int64_t end = 0;
  std::int64_t step = 0;
};

struct SimulateArgs {
  std::string model_path;
  std::string cluster_path;
  std::vector<std::string> profile_paths;
  Count tier1_nodes = 0;      // K
  Count tier2_per_tier1 = 0;  // K'; 0 = single-tier
  Count batch = 0;            // Tier-2 shard batch (or the batch when K'=0)
  std::optional<Count> inflight_override;
  Count iterations = 8;
  Count warmup = 2;
  std::optional<Count> seq_len;
  std::optional<double> oversubscription;
  // Overrides the inter-tier bandwidth (inter-node when single-tier).
  std::optional<double> bandwidth_override_bps;
  bool scale_if = false;
  bool earliest_stage_pop = false;
  std::optional<SweepRange> rtt_sweep;      // nanoseconds
  std::optional<SweepRange> seq_len_sweep;  // tokens
  std::optional<std::string> event_log_path;
  OutputArgs out;
  std::vector<std::string> raw_args;
};

struct OptimizeArgs {
  std::string model_path;
  std::string cluster_path;
  std::vector<std::string> profile_paths;
  std::string objective = "throughput";  // or "cost"
  std::optional<std::string> cost_table_path;
  std::optional<Count> max_nodes;
  std::optional<double> max_cost;
  std::optional<double> oversubscription;
  std::string if_policy = "max";  // or "min"
  bool refine = false;
  Count threads = 0;  // 0 = hardware concurrency
  std::optional<Count> seq_len;
  Count iterations = 8;
  OutputArgs out;
  std::vector<std::string> raw_args;
};

struct ValidateArgs {
  std::vector<std::string> paths;
  OutputArgs out;
  std::vector<std::string> raw_args;
};

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& err);
int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

// "a:b" or "a:b:step" with duration suffixes (for --rtt-sweep) or bare
// integers (for --seq-len-sweep).
SweepRange parse_duration_sweep(const std::string& text);
SweepRange parse_count_sweep(const std::string& text);

}  // namespace tierplan

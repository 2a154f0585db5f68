#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tierplan/commands.hpp"
#include "tierplan/errors.hpp"
#include "tierplan/manifest.hpp"
#include "tierplan/units.hpp"

namespace {

std::vector<std::string> collect_args(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return args;
}

void add_output_options(CLI::App* cmd, tierplan::OutputArgs& out) {
  cmd->add_option("--json", out.json_path, "Write the full JSON report to this path");
  cmd->add_option("--csv", out.csv_path, "Write CSV output to this path");
  cmd->add_option("--timestamp", out.timestamp,
                  "Timestamp string embedded in the manifest (default: empty, "
                  "keeping reports byte-reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(tierplan::kToolName) +
               " - capacity planner for two-tier LLM inference clusters"};
  app.set_version_flag("--version",
                       std::string(tierplan::kToolName) + " " + tierplan::kToolVersion);
  app.require_subcommand(1);

  const auto raw_args = collect_args(argc, argv);

  tierplan::AnalyzeArgs analyze;
  analyze.raw_args = raw_args;
  auto* cmd_an = app.add_subcommand("analyze", "Closed-form capacity and bandwidth analysis");
  cmd_an->add_option("--model", analyze.model_path, "Model spec JSON")->required();
  cmd_an->add_option("--cluster", analyze.cluster_path, "Cluster spec JSON")->required();
  cmd_an->add_option("--profile", analyze.profile_paths,
                     "Kernel profile CSV (Tier-1 first, Tier-2 second)");
  cmd_an->add_option("--seq-len", analyze.seq_len, "Sequence length (default: model max)");
  cmd_an->add_option("--tokens-per-sec", analyze.tokens_per_sec,
                     "Token rate for the egress bandwidth table");
  cmd_an->add_option("-K,--tier1-nodes", analyze.tier1_nodes, "Tier-1 node count");
  cmd_an->add_option("--k2,--tier2-per-node", analyze.tier2_per_tier1,
                     "Tier-2 nodes per Tier-1 node");
  add_output_options(cmd_an, analyze.out);

  tierplan::SimulateArgs simulate;
  simulate.raw_args = raw_args;
  std::string rtt_sweep_text;
  std::string seq_sweep_text;
  auto* cmd_sim = app.add_subcommand("simulate", "Discrete-event simulation of one configuration");
  cmd_sim->add_option("--model", simulate.model_path, "Model spec JSON")->required();
  cmd_sim->add_option("--cluster", simulate.cluster_path, "Cluster spec JSON")->required();
  cmd_sim->add_option("--profile", simulate.profile_paths,
                      "Kernel profile CSV (Tier-1 first, Tier-2 second)")
      ->required();
  cmd_sim->add_option("-K,--tier1-nodes", simulate.tier1_nodes, "Tier-1 node count")
      ->required();
  cmd_sim->add_option("--k2,--tier2-per-node", simulate.tier2_per_tier1,
                      "Tier-2 nodes per Tier-1 node (0 = single-tier)");
  cmd_sim->add_option("-B,--batch", simulate.batch,
                      "Tier-2 shard batch size (or the batch when single-tier)")
      ->required();
  cmd_sim->add_option("--if", simulate.inflight_override, "Override the in-flight batch count");
  cmd_sim->add_option("--iters", simulate.iterations, "Measured token generations (E)");
  cmd_sim->add_option("--warmup", simulate.warmup, "Warm-up passes to discard");
  cmd_sim->add_option("--seq-len", simulate.seq_len, "Sequence length (default: model max)");
  cmd_sim->add_option("--oversubscription", simulate.oversubscription,
                      "Paged-cache oversubscription factor");
  cmd_sim->add_flag("--scale-if", simulate.scale_if,
                    "Recompute the analytic in-flight minimum per point instead of "
                    "using all available memory");
  cmd_sim->add_flag("--earliest-stage-pop", simulate.earliest_stage_pop,
                    "Serve earliest-stage batches first (default: latest-stage first)");
  std::string bandwidth_text;
  cmd_sim->add_option("--bandwidth", bandwidth_text,
                      "Override the inter-tier (inter-node when single-tier) bandwidth, "
                      "e.g. 8gbps or 250mbps");
  cmd_sim->add_option("--rtt-sweep", rtt_sweep_text, "RTT sweep begin:end[:step], e.g. 2ms:200ms:20ms");
  cmd_sim->add_option("--seq-len-sweep", seq_sweep_text, "Sequence-length sweep begin:end[:step]");
  cmd_sim->add_option("--event-log", simulate.event_log_path, "Write the event log CSV here");
  add_output_options(cmd_sim, simulate.out);

  tierplan::OptimizeArgs optimize;
  optimize.raw_args = raw_args;
  auto* cmd_opt = app.add_subcommand("optimize", "Exhaustive (K, K', B) configuration search");
  cmd_opt->add_option("--model", optimize.model_path, "Model spec JSON")->required();
  cmd_opt->add_option("--cluster", optimize.cluster_path, "Cluster spec JSON")->required();
  cmd_opt->add_option("--profile", optimize.profile_paths,
                      "Kernel profile CSV (Tier-1 first, Tier-2 second)")
      ->required();
  cmd_opt->add_option("--objective", optimize.objective, "'throughput' or 'cost'")
      ->check(CLI::IsMember({"throughput", "cost"}));
  cmd_opt->add_option("--costs", optimize.cost_table_path, "Cost table CSV (device,unit_price_usd)");
  cmd_opt->add_option("--max-nodes", optimize.max_nodes, "Total node budget constraint");
  cmd_opt->add_option("--max-cost", optimize.max_cost, "Total cost budget constraint (USD)");
  cmd_opt->add_option("--oversubscription", optimize.oversubscription,
                      "Paged-cache oversubscription factor");
  cmd_opt->add_option("--if-policy", optimize.if_policy,
                      "'max' (all available memory) or 'min' (analytic minimum)")
      ->check(CLI::IsMember({"max", "min"}));
  cmd_opt->add_flag("--refine", optimize.refine,
                    "Re-search integer batch sizes around the grid optimum");
  cmd_opt->add_option("--threads", optimize.threads, "Evaluation threads (0 = all cores)");
  cmd_opt->add_option("--seq-len", optimize.seq_len, "Sequence length (default: model max)");
  cmd_opt->add_option("--iters", optimize.iterations, "Measured generations per simulation");
  add_output_options(cmd_opt, optimize.out);

  tierplan::ValidateArgs validate;
  validate.raw_args = raw_args;
  auto* cmd_val = app.add_subcommand("validate", "Schema and invariant checks on input files");
  cmd_val->add_option("files", validate.paths, "Model/cluster/profile/cost files")->required();
  add_output_options(cmd_val, validate.out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_an->parsed()) return tierplan::cmd_analyze(analyze, std::cout, std::cerr);
    if (cmd_sim->parsed()) {
      if (!bandwidth_text.empty()) {
        simulate.bandwidth_override_bps = tierplan::parse_bandwidth_bps(bandwidth_text);
      }
      if (!rtt_sweep_text.empty()) {
        simulate.rtt_sweep = tierplan::parse_duration_sweep(rtt_sweep_text);
      }
      if (!seq_sweep_text.empty()) {
        simulate.seq_len_sweep = tierplan::parse_count_sweep(seq_sweep_text);
      }
      return tierplan::cmd_simulate(simulate, std::cout, std::cerr);
    }
    if (cmd_opt->parsed()) return tierplan::cmd_optimize(optimize, std::cout, std::cerr);
    if (cmd_val->parsed()) return tierplan::cmd_validate(validate, std::cout, std::cerr);
  } catch (const tierplan::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tierplan::kExitInputError;
  }
  return tierplan::kExitInternal;
}

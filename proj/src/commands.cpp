#include "tierplan/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tierplan/analytic.hpp"
#include "tierplan/des.hpp"
#include "tierplan/errors.hpp"
#include "tierplan/manifest.hpp"
#include "tierplan/model.hpp"
#include "tierplan/netmodel.hpp"
#include "tierplan/optimizer.hpp"
#include "tierplan/profiles.hpp"

namespace tierplan {

namespace {

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const FeasibilityError& e) {
    err << "error: " << e.what() << " [binding: " << e.binding_constraint() << "]\n";
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << content;
}

void emit_json(const OutputArgs& out_args, const RunManifest& manifest,
               const nlohmann::json& body) {
  if (!out_args.json_path) return;
  const nlohmann::json full = {{"manifest", manifest.to_json()}, {"report", body}};
  write_file(*out_args.json_path, full.dump(2) + "\n");
}

std::string human_bytes(Bytes bytes) {
  std::ostringstream out;
  if (bytes >= kGiB && bytes % kMiB == 0) {
    out << std::setprecision(10) << static_cast<double>(bytes) / static_cast<double>(kGiB)
        << " GiB";
  } else if (bytes >= kMiB) {
    out << std::setprecision(10) << static_cast<double>(bytes) / static_cast<double>(kMiB)
        << " MiB";
  } else {
    out << bytes << " B";
  }
  return out.str();
}

struct LoadedInputs {
  TransformerSpec model;
  ClusterSpec cluster;
  std::vector<KernelProfile> profiles;
};

LoadedInputs load_inputs(const std::string& model_path, const std::string& cluster_path,
                         const std::vector<std::string>& profile_paths,
                         RunManifest& manifest) {
  LoadedInputs in;
  in.model = load_model_spec(model_path);
  manifest.add_input(model_path);
  in.cluster = load_cluster_spec(cluster_path);
  manifest.add_input(cluster_path);
  for (const auto& path : profile_paths) {
    in.profiles.push_back(load_profile(path));
    manifest.add_input(path);
  }
  return in;
}

const KernelProfile* tier2_profile_of(const LoadedInputs& in) {
  return in.profiles.size() >= 2 ? &in.profiles[1] : nullptr;
}

nlohmann::json config_result_json(const ConfigResult& r) {
  nlohmann::json j{{"K", r.tier1_nodes},
                   {"K_prime", r.tier2_per_tier1},
                   {"B", r.batch},
                   {"tier1_batch", r.tier1_batch},
                   {"IF", r.inflight},
                   {"IF_required", r.inflight_required},
                   {"IF_available", r.inflight_available},
                   {"context_slots", r.context_slots},
                   {"feasible", r.feasible},
                   {"binding_constraint", binding_constraint_name(r.binding)},
                   {"throughput_tps", r.throughput_tps},
                   {"tbt_ns", r.tbt_ns}};
  j["cost_usd"] = std::isnan(r.cost_usd) ? nlohmann::json() : nlohmann::json(r.cost_usd);
  j["cost_per_throughput"] = std::isnan(r.cost_per_throughput)
                                 ? nlohmann::json()
                                 : nlohmann::json(r.cost_per_throughput);
  return j;
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

// Per-barrier latency stand-in for the tensor-parallel formulas: the
// smallest profiled stage at each batch. Real barrier granularity is
// finer than whole fused stages; this is the closest the profile offers.
KernelProfile min_stage_profile(const KernelProfile& profile) {
  KernelProfile out(profile.device_name() + "-min-stage");
  for (Count b : profile.profiled_batches(StageKind::NonAttention)) {
    Duration best = profile.latency(StageKind::NonAttention, b);
    for (StageKind stage : {StageKind::Attention, StageKind::Classifier}) {
      if (profile.has_stage(stage)) {
        best = std::min(best, profile.latency(stage, b));
      }
    }
    out.insert(StageKind::NonAttention, 0, b, best);
  }
  out.finalize();
  return out;
}

void append_grid_warnings(const KernelProfile& profile, StageKind stage, Count batch,
                          std::vector<std::string>& warnings) {
  if (!profile.has_stage(stage)) return;
  const auto batches = profile.profiled_batches(stage);
  if (batch > batches.back()) {
    warnings.push_back("profile '" + profile.device_name() + "': batch " +
                       std::to_string(batch) + " above the profiled grid (max " +
                       std::to_string(batches.back()) + "), " +
                       stage_kind_name(stage) + " latency extrapolated");
  } else if (batch < batches.front()) {
    warnings.push_back("profile '" + profile.device_name() + "': batch " +
                       std::to_string(batch) + " below the profiled grid (min " +
                       std::to_string(batches.front()) + "), " +
                       stage_kind_name(stage) + " latency clamped");
  }
}

}  // namespace

SweepRange parse_duration_sweep(const std::string& text) {
  SweepRange range;
  std::istringstream in(text);
  std::string a, b, c;
  std::getline(in, a, ':');
  std::getline(in, b, ':');
  const bool has_step = static_cast<bool>(std::getline(in, c, ':'));
  if (a.empty() || b.empty()) {
    throw ValidationError("sweep range must be begin:end[:step], got '" + text + "'");
  }
  range.begin = parse_duration(a).count();
  range.end = parse_duration(b).count();
  range.step = has_step ? parse_duration(c).count() : (range.end - range.begin) / 8;
  if (range.end < range.begin || (range.end > range.begin && range.step <= 0)) {
    throw ValidationError("bad sweep range '" + text + "'");
  }
  return range;
}

SweepRange parse_count_sweep(const std::string& text) {
  SweepRange range;
  std::istringstream in(text);
  std::string a, b, c;
  std::getline(in, a, ':');
  std::getline(in, b, ':');
  const bool has_step = static_cast<bool>(std::getline(in, c, ':'));
  if (a.empty() || b.empty()) {
    throw ValidationError("sweep range must be begin:end[:step], got '" + text + "'");
  }
  try {
    range.begin = std::stoll(a);
    range.end = std::stoll(b);
    range.step = has_step ? std::stoll(c) : std::max<std::int64_t>((range.end - range.begin) / 8, 1);
  } catch (const std::exception&) {
    throw ValidationError("bad sweep range '" + text + "'");
  }
  if (range.begin <= 0 || range.end < range.begin ||
      (range.end > range.begin && range.step <= 0)) {
    throw ValidationError("bad sweep range '" + text + "'");
  }
  return range;
}

namespace {

std::vector<std::int64_t> sweep_points(const SweepRange& range) {
  std::vector<std::int64_t> points;
  if (range.end == range.begin || range.step <= 0) {
    points.push_back(range.begin);
    if (range.end != range.begin) points.push_back(range.end);
    return points;
  }
  for (std::int64_t v = range.begin; v < range.end; v += range.step) points.push_back(v);
  points.push_back(range.end);
  return points;
}

}  // namespace

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunManifest manifest;
    manifest.command = "analyze";
    manifest.args = args.raw_args;
    manifest.timestamp = args.out.timestamp;
    const auto in = load_inputs(args.model_path, args.cluster_path, args.profile_paths,
                                manifest);
    const TransformerSpec& model = in.model;
    const ClusterSpec& cluster = in.cluster;

    const Count k = args.tier1_nodes.value_or(
        std::min<Count>(cluster.tier1.node_count_max, model.n_layers));
    if (k == 0 || k > model.n_layers) {
      throw ValidationError("analyze: K must be in [1, n_layers]");
    }
    const Count k2 = args.tier2_per_tier1.value_or(cluster.tier2.node_count_max / k);
    const Count seq = args.seq_len.value_or(model.max_seq_len);

    nlohmann::json body;
    std::vector<std::string> warnings;
    if (!model.vocab_size) {
      warnings.push_back("vocab_size absent: embedding/classifier weights excluded");
    }
    for (const auto& profile : in.profiles) {
      for (const auto& w : profile.warnings()) warnings.push_back(w);
    }

    const Bytes kv = kv_bytes_per_prompt(model, seq);
    const Bytes weights = weights_bytes(model);
    body["model"] = {{"name", model.name},
                     {"n_layers", model.n_layers},
                     {"d_model", model.d_model},
                     {"seq_len", seq},
                     {"kv_bytes_per_prompt", kv},
                     {"weights_bytes", weights},
                     {"weights_fit_at_K", weights_fit(model, k, cluster.tier1.memory_bytes_per_node)}};
    body["config"] = {{"K", k}, {"K_prime", k2}};

    out << "model " << model.name << ": " << model.n_layers << " layers, d_model "
        << model.d_model << "\n";
    out << "kv cache per prompt @ seq_len " << seq << ": " << kv << " bytes ("
        << human_bytes(kv) << ")\n";
    out << "weights: " << weights << " bytes (" << human_bytes(weights) << ")\n";

    if (seq > 0) {
      const Count slots_single =
          single_tier_context_slots(model, k, cluster.tier1.memory_bytes_per_node, seq);
      body["single_tier"] = {{"context_slots", slots_single}};
      out << "single-tier context slots @ K=" << k << ": " << slots_single << "\n";
      if (!in.profiles.empty()) {
        const KernelProfile& prof1 = in.profiles.front();
        try {
          const auto mb = max_batch_pp(k, model.n_layers, slots_single, prof1,
                                       cluster.intra_tier1, model);
          body["single_tier"]["max_batch"] = mb.batch;
          body["single_tier"]["IF_pp"] = mb.inflight;
          out << "single-tier max batch: " << mb.batch << " (IF_pp " << mb.inflight
              << ")\n";
        } catch (const FeasibilityError& e) {
          body["single_tier"]["max_batch"] = nullptr;
          body["single_tier"]["infeasible"] = e.binding_constraint();
          out << "single-tier max batch: infeasible (" << e.binding_constraint() << ")\n";
        }
        // Tensor-parallel row, with the smallest profiled stage standing
        // in for the per-barrier latency.
        try {
          const auto barrier = min_stage_profile(prof1);
          const auto mb = max_batch_tp(k, slots_single, barrier, cluster.intra_tier1,
                                       model);
          body["tensor_parallel"] = {{"max_batch", mb.batch},
                                     {"IF_tp", mb.inflight},
                                     {"barrier", "smallest profiled stage"}};
          out << "tensor-parallel max batch: " << mb.batch << " (IF_tp " << mb.inflight
              << ", barrier = smallest profiled stage)\n";
        } catch (const FeasibilityError& e) {
          body["tensor_parallel"] = {{"max_batch", nullptr},
                                     {"infeasible", e.binding_constraint()}};
        }
      }
      if (k2 >= 1 && in.profiles.size() >= 2) {
        const Count slots_two = two_tier_context_slots(
            model, k, k2, cluster.tier2.memory_bytes_per_node, seq);
        body["two_tier"] = {{"context_slots", slots_two}};
        out << "two-tier context slots @ K=" << k << ", K'=" << k2 << ": " << slots_two
            << "\n";
        try {
          const auto mb =
              max_batch_gh(k, k2, slots_two, in.profiles[0], in.profiles[1],
                           cluster.inter_tier, cluster.intra_tier1, model);
          body["two_tier"]["max_tier1_batch"] = mb.tier1_batch;
          body["two_tier"]["tier2_batch"] = mb.tier2_batch;
          body["two_tier"]["IF_gh"] = mb.inflight_gh;
          body["two_tier"]["IF_pp"] = mb.inflight_pp;
          out << "two-tier max tier1 batch: " << mb.tier1_batch << " (tier2 batch "
              << mb.tier2_batch << ", IF_gh " << mb.inflight_gh << ", IF_pp "
              << mb.inflight_pp << ")\n";
        } catch (const FeasibilityError& e) {
          body["two_tier"]["max_tier1_batch"] = nullptr;
          body["two_tier"]["infeasible"] = e.binding_constraint();
          out << "two-tier max batch: infeasible (" << e.binding_constraint() << ")\n";
        }
      }
    } else {
      body["single_tier"] = nullptr;
      body["two_tier"] = nullptr;
    }

    if (args.tokens_per_sec) {
      const double t = *args.tokens_per_sec;
      const double t1 = tier1_total_egress_bps(k, model, t);
      const double t2 = tier2_total_egress_bps(k, model, t);
      nlohmann::json egress{{"tokens_per_sec", t},
                            {"tier1_total_gbps", t1 / 1e9},
                            {"tier1_per_node_gbps", t1 / 1e9 / static_cast<double>(k)},
                            {"tier2_total_gbps", t2 / 1e9}};
      if (k2 >= 1) {
        egress["tier2_per_node_gbps"] = t2 / 1e9 / static_cast<double>(k * k2);
      } else {
        egress["tier2_per_node_gbps"] = nullptr;
      }
      body["egress"] = egress;
      out << "egress @ " << t << " tok/s: tier1 " << t1 / 1e9 << " Gbps total, "
          << t1 / 1e9 / static_cast<double>(k) << " Gbps/node; tier2 " << t2 / 1e9
          << " Gbps total\n";
    }

    body["warnings"] = warnings;
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    emit_json(args.out, manifest, body);
    return kExitOk;
  });
}

namespace {

struct SimPoint {
  ConfigResult result;
  SimReport sim;
};

// One explicit-configuration run: capacity accounting, analytic in-flight
// numbers, then the simulation at the resolved count (override > analytic
// minimum under --scale-if > all available memory).
SimPoint run_explicit(const TransformerSpec& model, const ClusterSpec& cluster,
                      const std::vector<KernelProfile>& profiles, const SimulateArgs& args,
                      Count seq, const SimOptions& sim_options,
                      std::optional<Count> inflight_override) {
  const Count k = args.tier1_nodes;
  const Count k2 = args.tier2_per_tier1;
  const bool two_tier = k2 >= 1;
  if (two_tier && profiles.size() < 2) {
    throw ValidationError(
        "simulate: two-tier config needs a Tier-2 profile (pass two --profile files)");
  }

  SimPoint point;
  ConfigResult& r = point.result;
  r.tier1_nodes = k;
  r.tier2_per_tier1 = k2;
  r.batch = args.batch;
  r.tier1_batch = args.batch * std::max<Count>(k2, 1);
  r.cost_usd = std::numeric_limits<double>::quiet_NaN();
  r.cost_per_throughput = std::numeric_limits<double>::quiet_NaN();

  if (!weights_fit(model, k, cluster.tier1.memory_bytes_per_node)) {
    throw FeasibilityError("simulate: model weights do not fit on " + std::to_string(k) +
                               " Tier-1 node(s)",
                           "memory");
  }
  r.context_slots =
      two_tier
          ? two_tier_context_slots(model, k, k2, cluster.tier2.memory_bytes_per_node, seq)
          : single_tier_context_slots(model, k, cluster.tier1.memory_bytes_per_node, seq);
  const double oversub =
      args.oversubscription.value_or(cluster.oversubscription_for(two_tier));
  r.inflight_available =
      r.context_slots == 0 ? 0 : inflight_count(r.context_slots, r.tier1_batch, oversub);

  const std::optional<Count> seq_q = seq ? std::optional<Count>(seq) : std::nullopt;
  const auto payload = PayloadModel::for_model(model);
  TwoTierStageLatencies lat2;
  SingleTierStageLatencies lat1;
  if (two_tier) {
    lat2 = derive_two_tier_latencies(model, profiles[0], profiles[1], cluster.inter_tier,
                                     args.batch, k2, seq_q);
    const Duration t_rt = round_trip_transfer_time(
        cluster.inter_tier, r.tier1_batch * payload.tier1_to_tier2_per_token,
        r.tier1_batch * payload.tier2_to_tier1_per_token);
    const Duration t_n1 = one_way_transfer_time(
        cluster.intra_tier1, r.tier1_batch * payload.intra_tier1_per_token);
    r.inflight_required = if_gh(lat2.tier2_compute, t_rt, lat2.tier1_compute) *
                          if_pp(k, model.n_layers, lat2.tier1_compute, t_n1);
  } else {
    lat1 = derive_single_tier_latencies(model, profiles[0], cluster.intra_tier1,
                                        args.batch, seq_q);
    const Duration t_n1 = one_way_transfer_time(
        cluster.intra_tier1, args.batch * payload.intra_tier1_per_token);
    r.inflight_required = if_pp(k, model.n_layers, lat1.compute, t_n1);
  }

  if (inflight_override) {
    r.inflight = *inflight_override;
  } else if (args.scale_if) {
    r.inflight = std::min(r.inflight_required, r.inflight_available);
  } else {
    r.inflight = r.inflight_available;
  }
  if (r.inflight == 0) {
    throw FeasibilityError("simulate: configuration cannot hold a single in-flight batch",
                           "memory");
  }
  r.feasible = r.inflight_available >= r.inflight_required;

  if (two_tier) {
    point.sim = simulate_two_tier(model.n_layers, k, k2, args.batch, r.inflight, lat2,
                                  sim_options);
  } else {
    point.sim = simulate_single_tier(model.n_layers, k, args.batch, r.inflight, lat1,
                                     sim_options);
  }
  r.throughput_tps = point.sim.throughput_tps;
  r.tbt_ns = point.sim.tbt_ns;
  r.binding = r.feasible ? classify_bottleneck(point.sim) : BindingConstraint::Memory;
  return point;
}

std::string event_log_csv(const std::vector<EventRecord>& log) {
  std::ostringstream out;
  out << "event_seq,pipe_id,batch_id,stage,enqueue_ts_ns,start_ts_ns,finish_ts_ns\n";
  for (const EventRecord& rec : log) {
    out << rec.seq << ',' << rec.pipe << ',' << rec.batch << ',' << rec.stage << ','
        << rec.enqueue.count() << ',' << rec.start.count() << ',' << rec.finish.count()
        << '\n';
  }
  return out.str();
}

}  // namespace

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunManifest manifest;
    manifest.command = "simulate";
    manifest.args = args.raw_args;
    manifest.timestamp = args.out.timestamp;
    auto in = load_inputs(args.model_path, args.cluster_path, args.profile_paths,
                          manifest);
    if (in.profiles.empty()) {
      throw ValidationError("simulate: at least one --profile is required");
    }
    if (args.tier1_nodes == 0 || args.batch == 0) {
      throw ValidationError("simulate: K and B must be >= 1");
    }
    if (args.bandwidth_override_bps) {
      if (args.tier2_per_tier1 >= 1) {
        in.cluster.inter_tier.bandwidth_bps = *args.bandwidth_override_bps;
      } else {
        in.cluster.intra_tier1.bandwidth_bps = *args.bandwidth_override_bps;
      }
      in.cluster.validate();
    }
    const Count seq = args.seq_len.value_or(in.model.max_seq_len);

    SimOptions sim_options;
    sim_options.warmup_passes = args.warmup;
    sim_options.iterations = args.iterations;
    sim_options.pop_order = args.earliest_stage_pop ? PopOrder::EarliestStageFirst
                                                    : PopOrder::LatestStageFirst;

    nlohmann::json body;

    if (args.rtt_sweep || args.seq_len_sweep) {
      nlohmann::json rows = nlohmann::json::array();
      std::ostringstream csv;
      if (args.rtt_sweep) {
        csv << "rtt_ms,inflight,tbt_ns,throughput_tps,feasible\n";
        for (std::int64_t rtt_ns : sweep_points(*args.rtt_sweep)) {
          ClusterSpec swept = in.cluster;
          if (args.tier2_per_tier1 >= 1) {
            swept.inter_tier.rtt = Duration{rtt_ns};
          } else {
            swept.intra_tier1.rtt = Duration{rtt_ns};
          }
          bool feasible = true;
          SimPoint point;
          try {
            point = run_explicit(in.model, swept, in.profiles, args, seq, sim_options,
                                 args.inflight_override);
          } catch (const FeasibilityError&) {
            feasible = false;
          }
          const double rtt_ms = static_cast<double>(rtt_ns) / 1e6;
          rows.push_back({{"rtt_ms", rtt_ms},
                          {"inflight", feasible ? point.result.inflight : 0},
                          {"tbt_ns", feasible ? point.result.tbt_ns : 0.0},
                          {"throughput_tps", feasible ? point.result.throughput_tps : 0.0},
                          {"feasible", feasible}});
          csv << csv_double(rtt_ms) << ',' << (feasible ? point.result.inflight : 0) << ','
              << csv_double(feasible ? point.result.tbt_ns : 0.0) << ','
              << csv_double(feasible ? point.result.throughput_tps : 0.0) << ','
              << (feasible ? 1 : 0) << '\n';
        }
        body["rtt_sweep"] = rows;
      } else {
        csv << "seq_len,context_slots,inflight,tbt_ns,throughput_tps,feasible\n";
        for (std::int64_t s : sweep_points(*args.seq_len_sweep)) {
          bool feasible = true;
          SimPoint point;
          try {
            point = run_explicit(in.model, in.cluster, in.profiles, args,
                                 static_cast<Count>(s), sim_options,
                                 args.inflight_override);
          } catch (const FeasibilityError&) {
            feasible = false;
          } catch (const ValidationError&) {
            feasible = false;  // e.g. seq_len beyond max_seq_len
          }
          rows.push_back({{"seq_len", s},
                          {"context_slots", feasible ? point.result.context_slots : 0},
                          {"inflight", feasible ? point.result.inflight : 0},
                          {"tbt_ns", feasible ? point.result.tbt_ns : 0.0},
                          {"throughput_tps", feasible ? point.result.throughput_tps : 0.0},
                          {"feasible", feasible}});
          csv << s << ',' << (feasible ? point.result.context_slots : 0) << ','
              << (feasible ? point.result.inflight : 0) << ','
              << csv_double(feasible ? point.result.tbt_ns : 0.0) << ','
              << csv_double(feasible ? point.result.throughput_tps : 0.0) << ','
              << (feasible ? 1 : 0) << '\n';
        }
        body["seq_len_sweep"] = rows;
      }
      if (args.out.csv_path) write_file(*args.out.csv_path, csv.str());
      out << (args.rtt_sweep ? "rtt sweep: " : "seq_len sweep: ") << rows.size()
          << " points\n";
      for (const auto& row : rows) {
        out << "  " << (args.rtt_sweep ? row["rtt_ms"].dump() : row["seq_len"].dump())
            << " -> " << row["throughput_tps"].dump() << " tok/s (IF "
            << row["inflight"].dump() << ")\n";
      }
      emit_json(args.out, manifest, body);
      return kExitOk;
    }

    sim_options.retain_event_log = true;
    sim_options.track_utilization = true;
    const SimPoint point = run_explicit(in.model, in.cluster, in.profiles, args, seq,
                                        sim_options, args.inflight_override);

    std::vector<std::string> warnings;
    for (const auto& profile : in.profiles) {
      for (const auto& w : profile.warnings()) warnings.push_back(w);
    }
    append_grid_warnings(in.profiles[0], StageKind::NonAttention,
                         point.result.tier1_batch, warnings);
    if (args.tier2_per_tier1 >= 1 && in.profiles.size() >= 2) {
      append_grid_warnings(in.profiles[1], StageKind::Attention, args.batch, warnings);
    } else {
      append_grid_warnings(in.profiles[0], StageKind::Attention, args.batch, warnings);
    }
    body["warnings"] = warnings;
    for (const auto& w : warnings) out << "warning: " << w << "\n";

    body["config"] = config_result_json(point.result);
    nlohmann::json gen = nlohmann::json::array();
    for (Duration ts : point.sim.gen_ts) gen.push_back(ts.count());
    body["gen_ts_ns"] = gen;
    body["tbt_ns"] = point.sim.tbt_ns;
    body["throughput_tps"] = point.sim.throughput_tps;
    body["tier1_utilization"] = point.sim.tier1_utilization;
    body["tier2_utilization"] = point.sim.tier2_utilization;
    if (point.sim.event_log) {
      const auto breakdown = latency_breakdown(point.sim);
      body["latency_breakdown"] = {{"compute_ns", breakdown.compute.count()},
                                   {"transit_ns", breakdown.transit.count()},
                                   {"static_delay_ns", breakdown.static_delay.count()},
                                   {"queue_wait_ns", breakdown.queue_wait.count()},
                                   {"passes", breakdown.passes}};
    }

    out << "config K=" << point.result.tier1_nodes << " K'=" << point.result.tier2_per_tier1
        << " B=" << point.result.batch << " IF=" << point.result.inflight << "\n";
    out << "tbt: " << point.sim.tbt_ns / 1e6 << " ms, throughput: "
        << point.sim.throughput_tps << " tok/s\n";
    if (!point.sim.tier1_utilization.empty()) {
      double min_util = 1.0;
      for (double u : point.sim.tier1_utilization) min_util = std::min(min_util, u);
      out << "tier1 utilization (min over nodes): " << min_util * 100.0 << "%\n";
    }

    if (args.event_log_path && point.sim.event_log) {
      write_file(*args.event_log_path, event_log_csv(*point.sim.event_log));
      out << "event log: " << *args.event_log_path << " (" << point.sim.event_log->size()
          << " events)\n";
    }
    emit_json(args.out, manifest, body);
    return kExitOk;
  });
}

int cmd_optimize(const OptimizeArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunManifest manifest;
    manifest.command = "optimize";
    manifest.args = args.raw_args;
    manifest.timestamp = args.out.timestamp;
    const auto in = load_inputs(args.model_path, args.cluster_path, args.profile_paths,
                                manifest);
    if (in.profiles.empty()) {
      throw ValidationError("optimize: at least one --profile is required");
    }
    if (in.cluster.tier2.node_count_max > 0 && in.profiles.size() < 2) {
      throw ValidationError(
          "optimize: the cluster has Tier-2 nodes; pass a second --profile with their "
          "attention latencies");
    }

    CostTable explicit_costs;
    bool have_explicit_costs = false;
    if (args.cost_table_path) {
      explicit_costs = load_cost_table(*args.cost_table_path);
      manifest.add_input(*args.cost_table_path);
      have_explicit_costs = true;
    }
    const CostTable costs =
        resolve_cost_table(in.cluster, have_explicit_costs ? &explicit_costs : nullptr);
    const CostTable* costs_ptr = costs.unit_price_usd.empty() ? nullptr : &costs;

    Objective objective;
    if (args.objective == "throughput") {
      objective.kind = ObjectiveKind::MaxThroughput;
    } else if (args.objective == "cost") {
      objective.kind = ObjectiveKind::MinCostPerThroughput;
    } else {
      throw ValidationError("optimize: objective must be 'throughput' or 'cost'");
    }
    objective.max_nodes = args.max_nodes;
    objective.max_cost = args.max_cost;

    OptimizeOptions options;
    options.eval.seq_len = args.seq_len.value_or(0);
    options.eval.oversubscription = args.oversubscription;
    options.eval.if_policy =
        args.if_policy == "min" ? IfPolicy::AnalyticMinimum : IfPolicy::MaxAvailable;
    options.eval.sim.iterations = args.iterations;
    options.refine = args.refine;
    options.threads =
        args.threads ? args.threads : std::max(1u, std::thread::hardware_concurrency());

    const auto outcome = optimize(in.cluster, in.model, in.profiles[0],
                                  tier2_profile_of(in), costs_ptr, objective, options);

    nlohmann::json body;
    body["objective"] = args.objective;
    body["best"] = config_result_json(outcome.best);
    nlohmann::json ranked = nlohmann::json::array();
    for (const auto& r : outcome.ranked) ranked.push_back(config_result_json(r));
    body["ranked"] = ranked;

    out << "best config: K=" << outcome.best.tier1_nodes
        << " K'=" << outcome.best.tier2_per_tier1 << " B=" << outcome.best.batch
        << " IF=" << outcome.best.inflight << "\n";
    out << "  throughput: " << outcome.best.throughput_tps << " tok/s";
    if (!std::isnan(outcome.best.cost_usd)) {
      out << ", cost: $" << outcome.best.cost_usd << ", cost/throughput: $"
          << outcome.best.cost_per_throughput << " per tok/s";
    }
    out << "\n  evaluated " << outcome.ranked.size() << " configurations\n";

    if (args.out.csv_path) {
      std::ostringstream csv;
      csv << "K,Kprime,B,IF,throughput,cost,cost_per_thr,binding_constraint\n";
      for (const auto& r : outcome.ranked) {
        csv << r.tier1_nodes << ',' << r.tier2_per_tier1 << ',' << r.batch << ','
            << r.inflight << ',' << csv_double(r.throughput_tps) << ','
            << csv_double(r.cost_usd) << ',' << csv_double(r.cost_per_throughput) << ','
            << binding_constraint_name(r.binding) << '\n';
      }
      write_file(*args.out.csv_path, csv.str());
    }
    emit_json(args.out, manifest, body);
    return kExitOk;
  });
}

namespace {

enum class FileKind { Model, Cluster, Profile, CostTable, Unknown };

FileKind classify_file(const std::string& path, const std::string& content) {
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '{') {
    if (content.find("\"tier1\"") != std::string::npos) return FileKind::Cluster;
    return FileKind::Model;
  }
  std::istringstream in(content);
  std::string header;
  std::getline(in, header);
  if (header.rfind("device,stage,", 0) == 0) return FileKind::Profile;
  if (header.rfind("device,unit_price_usd", 0) == 0) return FileKind::CostTable;
  (void)path;
  return FileKind::Unknown;
}

}  // namespace

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    RunManifest manifest;
    manifest.command = "validate";
    manifest.args = args.raw_args;
    manifest.timestamp = args.out.timestamp;

    nlohmann::json diagnostics = nlohmann::json::array();
    std::vector<std::string> warnings;

    for (const auto& path : args.paths) {
      std::ifstream file(path, std::ios::binary);
      if (!file) {
        diagnostics.push_back({{"file", path}, {"message", "cannot open file"}});
        continue;
      }
      std::ostringstream buffer;
      buffer << file.rdbuf();
      const std::string content = buffer.str();
      manifest.inputs.push_back(
          RunManifest::Input{path, sha256_bytes(content.data(), content.size())});

      try {
        std::istringstream stream(content);
        switch (classify_file(path, content)) {
          case FileKind::Model:
            parse_model_spec(stream, path);
            break;
          case FileKind::Cluster:
            parse_cluster_spec(stream, path);
            break;
          case FileKind::Profile: {
            const auto profile = parse_profile(stream, path);
            for (const auto& w : profile.warnings()) warnings.push_back(w);
            break;
          }
          case FileKind::CostTable:
            parse_cost_table(stream, path);
            break;
          case FileKind::Unknown:
            throw ValidationError(path + ": unrecognized file type");
        }
      } catch (const ValidationError& e) {
        diagnostics.push_back({{"file", path}, {"message", e.what()}});
      }
    }

    nlohmann::json body;
    body["clean"] = diagnostics.empty();
    body["diagnostics"] = diagnostics;
    body["warnings"] = warnings;

    for (const auto& d : diagnostics) {
      out << "violation: " << d["message"].get<std::string>() << "\n";
    }
    for (const auto& w : warnings) out << "warning: " << w << "\n";
    if (diagnostics.empty()) out << "ok: " << args.paths.size() << " file(s) clean\n";

    emit_json(args.out, manifest, body);
    return diagnostics.empty() ? kExitOk : kExitInputError;
  });
}

}  // namespace tierplan

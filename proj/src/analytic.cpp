#include "tierplan/analytic.hpp"

#include <fstream>
#include <sstream>

#include "tierplan/errors.hpp"

namespace tierplan {

Count if_pp(Count tier1_nodes, Count n_layers, Duration t_c, Duration t_n) {
  if (tier1_nodes == 0) throw ValidationError("if_pp: K must be >= 1");
  if (n_layers < tier1_nodes) {
    throw ValidationError("if_pp: need at least one layer per node");
  }
  if (t_c <= kZero) throw ValidationError("if_pp: t_c must be positive");
  if (t_n < kZero) throw ValidationError("if_pp: t_n must be non-negative");
  const auto num = tier1_nodes * static_cast<std::uint64_t>(t_n.count());
  const auto den = n_layers * static_cast<std::uint64_t>(t_c.count());
  return (1 + ceil_div(num, den)) * tier1_nodes;
}

Count if_tp(Count tier1_nodes, Duration t_c_min, Duration t_n) {
  if (tier1_nodes == 0) throw ValidationError("if_tp: K must be >= 1");
  if (t_c_min <= kZero) throw ValidationError("if_tp: t_c_min must be positive");
  if (t_n < kZero) throw ValidationError("if_tp: t_n must be non-negative");
  const auto num = tier1_nodes * static_cast<std::uint64_t>(t_n.count());
  const auto den = static_cast<std::uint64_t>(t_c_min.count());
  return 1 + ceil_div(num, den);
}

Count if_gh(Duration t_att, Duration t_n_roundtrip, Duration t_noatt) {
  if (t_noatt <= kZero) throw ValidationError("if_gh: t_noatt must be positive");
  if (t_att < kZero || t_n_roundtrip < kZero) {
    throw ValidationError("if_gh: latencies must be non-negative");
  }
  const auto num = static_cast<std::uint64_t>(t_att.count()) +
                   static_cast<std::uint64_t>(t_n_roundtrip.count());
  return 1 + ceil_div(num, static_cast<std::uint64_t>(t_noatt.count()));
}

namespace {

Duration single_tier_layer_time(const KernelProfile& profile, Count batch) {
  Duration t = profile.latency(StageKind::NonAttention, batch);
  if (profile.has_stage(StageKind::Attention)) {
    t += profile.latency(StageKind::Attention, batch);
  }
  return t;
}

}  // namespace

MaxBatch max_batch_pp(Count tier1_nodes, Count n_layers, Count context_slots,
                      const KernelProfile& profile, const LinkSpec& link,
                      const TransformerSpec& spec) {
  if (context_slots < tier1_nodes) {
    throw FeasibilityError(
        "max_batch_pp: " + std::to_string(context_slots) + " context slots cannot hold " +
            std::to_string(tier1_nodes) + " in-flight batches (IF_pp >= K)",
        "memory");
  }
  const auto payload = PayloadModel::for_model(spec);
  MaxBatch best;
  const Count bound = context_slots / tier1_nodes;  // IF_pp(B) >= K
  for (Count b = 1; b <= bound; ++b) {
    const Duration t_c = single_tier_layer_time(profile, b);
    const Duration t_n = one_way_transfer_time(link, b * payload.intra_tier1_per_token);
    const Count inflight = if_pp(tier1_nodes, n_layers, t_c, t_n);
    if (b <= context_slots / inflight) {
      best = MaxBatch{b, inflight};
    }
  }
  if (best.batch == 0) {
    throw FeasibilityError("max_batch_pp: no batch size satisfies the context constraint",
                           "memory");
  }
  return best;
}

MaxBatch max_batch_tp(Count tier1_nodes, Count context_slots,
                      const KernelProfile& min_stage_profile, const LinkSpec& link,
                      const TransformerSpec& spec) {
  if (context_slots == 0) {
    throw FeasibilityError("max_batch_tp: zero context slots", "memory");
  }
  const auto payload = PayloadModel::for_model(spec);
  MaxBatch best;
  for (Count b = 1; b <= context_slots; ++b) {
    const Duration t_c_min = min_stage_profile.latency(StageKind::NonAttention, b);
    const Duration t_n = one_way_transfer_time(link, b * payload.intra_tier1_per_token);
    const Count inflight = if_tp(tier1_nodes, t_c_min, t_n);
    if (b <= context_slots / inflight) {
      best = MaxBatch{b, inflight};
    }
  }
  if (best.batch == 0) {
    throw FeasibilityError("max_batch_tp: no batch size satisfies the context constraint",
                           "memory");
  }
  return best;
}

MaxBatchTwoTier max_batch_gh(Count tier1_nodes, Count tier2_per_tier1,
                             Count context_slots, const KernelProfile& tier1_profile,
                             const KernelProfile& tier2_profile,
                             const LinkSpec& inter_tier, const LinkSpec& intra_tier1,
                             const TransformerSpec& spec) {
  if (tier2_per_tier1 == 0) {
    throw ValidationError("max_batch_gh: K' must be >= 1");
  }
  if (context_slots < tier1_nodes) {
    throw FeasibilityError("max_batch_gh: context slots below the in-flight minimum",
                           "memory");
  }
  const auto payload = PayloadModel::for_model(spec);
  MaxBatchTwoTier best;
  const Count bound = context_slots / tier1_nodes;  // IF_gh >= 1, IF_pp >= K
  for (Count bt = 1; bt <= bound; ++bt) {
    const Count shard = ceil_div(bt, tier2_per_tier1);
    const Duration t_noatt = tier1_profile.latency(StageKind::NonAttention, bt);
    const Duration t_att = tier2_profile.latency(StageKind::Attention, shard);
    const Duration t_rt = round_trip_transfer_time(
        inter_tier, bt * payload.tier1_to_tier2_per_token,
        bt * payload.tier2_to_tier1_per_token);
    const Count ifgh = if_gh(t_att, t_rt, t_noatt);
    const Duration t_n1 =
        one_way_transfer_time(intra_tier1, bt * payload.intra_tier1_per_token);
    const Count ifpp = if_pp(tier1_nodes, spec.n_layers, t_noatt, t_n1);
    if (bt <= context_slots / (ifgh * ifpp)) {
      best = MaxBatchTwoTier{bt, shard, ifgh, ifpp};
    }
  }
  if (best.tier1_batch == 0) {
    throw FeasibilityError("max_batch_gh: no batch size satisfies the context constraint",
                           "memory");
  }
  return best;
}

double CostTable::price_for(const std::string& device_name) const {
  auto it = unit_price_usd.find(device_name);
  if (it == unit_price_usd.end()) {
    throw ValidationError("no unit price for device '" + device_name + "'");
  }
  return it->second;
}

CostTable parse_cost_table(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(origin + ": empty cost table");
  }
  {
    std::istringstream hdr(line);
    std::string a, b;
    std::getline(hdr, a, ',');
    std::getline(hdr, b, ',');
    if (a != "device" || b.substr(0, 14) != "unit_price_usd") {
      throw ValidationError(origin + ": bad header, expected device,unit_price_usd");
    }
  }
  CostTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string device, price_text;
    if (!std::getline(row, device, ',') || !std::getline(row, price_text, ',')) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    double price = 0;
    try {
      price = std::stod(price_text);
    } catch (const std::exception&) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": malformed price");
    }
    if (price <= 0) {
      throw ValidationError(origin + ":" + std::to_string(line_no) +
                            ": unit price must be positive");
    }
    if (!table.unit_price_usd.emplace(device, price).second) {
      throw ValidationError(origin + ":" + std::to_string(line_no) + ": duplicate device '" +
                            device + "'");
    }
  }
  return table;
}

CostTable load_cost_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open cost table '" + path + "'");
  return parse_cost_table(in, path);
}

double cost_per_throughput(const std::vector<std::pair<std::string, Count>>& nodes,
                           const CostTable& table, double throughput_tps) {
  if (throughput_tps <= 0) {
    throw ValidationError("cost_per_throughput: throughput must be positive");
  }
  double total = 0;
  for (const auto& [device, count] : nodes) {
    total += table.price_for(device) * static_cast<double>(count);
  }
  return total / throughput_tps;
}

}  // namespace tierplan

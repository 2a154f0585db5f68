#include "tierplan/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tierplan/errors.hpp"

namespace tierplan {

const char* stage_kind_name(StageKind kind) {
  switch (kind) {
    case StageKind::NonAttention:
      return "nonattention";
    case StageKind::Attention:
      return "attention";
    case StageKind::Classifier:
      return "classifier";
  }
  return "?";
}

std::optional<StageKind> stage_kind_from_name(const std::string& name) {
  if (name == "nonattention") return StageKind::NonAttention;
  if (name == "attention") return StageKind::Attention;
  if (name == "classifier") return StageKind::Classifier;
  return std::nullopt;
}

void KernelProfile::insert(StageKind stage, Count seq_len, Count batch,
                           Duration latency) {
  if (batch == 0) {
    throw ValidationError("profile '" + device_name_ + "': batch_size must be >= 1");
  }
  if (latency <= kZero) {
    throw ValidationError("profile '" + device_name_ + "': non-positive latency for " +
                          stage_kind_name(stage) + " batch " + std::to_string(batch));
  }
  auto& grid = tables_[stage][seq_len];
  for (const Entry& e : grid) {
    if (e.batch == batch) {
      throw ValidationError("profile '" + device_name_ + "': duplicate entry for " +
                            stage_kind_name(stage) + " seq_len " +
                            std::to_string(seq_len) + " batch " + std::to_string(batch));
    }
  }
  grid.push_back(Entry{batch, latency});
}

void KernelProfile::finalize() {
  for (auto& [stage, by_seq] : tables_) {
    for (auto& [seq, grid] : by_seq) {
      std::sort(grid.begin(), grid.end(),
                [](const Entry& a, const Entry& b) { return a.batch < b.batch; });
      if (stage == StageKind::NonAttention) {
        for (std::size_t i = 1; i < grid.size(); ++i) {
          if (grid[i].latency < grid[i - 1].latency) {
            warnings_.push_back("profile '" + device_name_ +
                                "': nonattention latency not monotone at batch " +
                                std::to_string(grid[i].batch) + " (seq_len " +
                                std::to_string(seq) + ")");
            break;
          }
        }
      }
    }
  }
}

bool KernelProfile::has_stage(StageKind stage) const {
  return tables_.count(stage) > 0;
}

const std::vector<KernelProfile::Entry>& KernelProfile::grid_for(
    StageKind stage, std::optional<Count> seq_len) const {
  auto it = tables_.find(stage);
  if (it == tables_.end() || it->second.empty()) {
    throw ValidationError("profile '" + device_name_ + "': no entries for stage " +
                          stage_kind_name(stage));
  }
  const auto& by_seq = it->second;
  if (!seq_len) {
    return by_seq.rbegin()->second;  // max profiled sequence length
  }
  auto seq_it = by_seq.lower_bound(*seq_len);
  if (seq_it == by_seq.end()) {
    return by_seq.rbegin()->second;
  }
  return seq_it->second;
}

Duration KernelProfile::latency(StageKind stage, Count batch,
                                std::optional<Count> seq_len) const {
  if (batch == 0) {
    throw ValidationError("profile '" + device_name_ + "': latency query at batch 0");
  }
  const auto& grid = grid_for(stage, seq_len);

  // Below the grid: clamp to the smallest profiled batch.
  if (batch <= grid.front().batch) {
    return grid.front().latency;
  }
  // Above the grid: extrapolate linearly from the top two points.
  if (batch >= grid.back().batch) {
    if (batch == grid.back().batch) return grid.back().latency;
    if (grid.size() == 1) return grid.back().latency;
    const Entry& a = grid[grid.size() - 2];
    const Entry& b = grid.back();
    const long double slope =
        static_cast<long double>((b.latency - a.latency).count()) /
        static_cast<long double>(b.batch - a.batch);
    const long double value =
        static_cast<long double>(b.latency.count()) +
        slope * static_cast<long double>(batch - b.batch);
    return Duration{static_cast<std::int64_t>(std::llroundl(value))};
  }
  // Interior: linear interpolation between the bracketing profiled batches.
  auto hi = std::lower_bound(grid.begin(), grid.end(), batch,
                             [](const Entry& e, Count b) { return e.batch < b; });
  if (hi->batch == batch) return hi->latency;
  auto lo = hi - 1;
  const long double t = static_cast<long double>(batch - lo->batch) /
                        static_cast<long double>(hi->batch - lo->batch);
  const long double value =
      static_cast<long double>(lo->latency.count()) +
      t * static_cast<long double>((hi->latency - lo->latency).count());
  return Duration{static_cast<std::int64_t>(std::llroundl(value))};
}

std::vector<Count> KernelProfile::profiled_batches(StageKind stage) const {
  const auto& grid = grid_for(stage, std::nullopt);
  std::vector<Count> out;
  out.reserve(grid.size());
  for (const Entry& e : grid) out.push_back(e.batch);
  return out;
}

Count KernelProfile::max_profiled_batch(StageKind stage) const {
  return grid_for(stage, std::nullopt).back().batch;
}

Count KernelProfile::max_seq_len_profiled() const {
  Count best = 0;
  for (const auto& [stage, by_seq] : tables_) {
    if (!by_seq.empty()) best = std::max(best, by_seq.rbegin()->first);
  }
  return best;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim ASCII whitespace
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

}  // namespace

KernelProfile parse_profile(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError(origin + ": empty profile file");
  }
  const auto header = split_csv_line(line);
  const std::vector<std::string> expected = {"device", "stage", "seq_len",
                                             "batch_size", "latency_us"};
  if (header != std::vector<std::string>(expected.begin(), expected.end())) {
    throw ValidationError(origin +
                          ": bad header, expected device,stage,seq_len,batch_size,latency_us");
  }

  KernelProfile profile;
  std::string device;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    const std::string where = origin + ":" + std::to_string(line_no);
    if (fields.size() != 5) {
      throw ValidationError(where + ": expected 5 fields, got " +
                            std::to_string(fields.size()));
    }
    if (device.empty()) {
      device = fields[0];
      profile = KernelProfile(device);
    } else if (fields[0] != device) {
      throw ValidationError(where + ": profile file mixes devices '" + device +
                            "' and '" + fields[0] + "'");
    }
    const auto stage = stage_kind_from_name(fields[1]);
    if (!stage) {
      throw ValidationError(where + ": unknown stage '" + fields[1] + "'");
    }
    Count seq_len = 0;
    Count batch = 0;
    double latency_us = 0;
    try {
      seq_len = std::stoull(fields[2]);
      batch = std::stoull(fields[3]);
      latency_us = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw ValidationError(where + ": malformed numeric field");
    }
    if (latency_us <= 0) {
      throw ValidationError(where + ": latency_us must be positive");
    }
    profile.insert(*stage, seq_len, batch, Duration{std::llround(latency_us * 1000.0)});
  }
  if (device.empty()) {
    throw ValidationError(origin + ": profile has no data rows");
  }
  profile.finalize();
  return profile;
}

KernelProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile '" + path + "'");
  return parse_profile(in, path);
}

std::vector<Count> batch_grid(Count max_batch) {
  if (max_batch == 0) {
    throw ValidationError("batch_grid: max_batch must be >= 1");
  }
  std::vector<Count> grid;
  for (int k = 0;; ++k) {
    const auto value =
        static_cast<Count>(std::llround(std::pow(2.0, static_cast<double>(k) / 2.0)));
    if (value > max_batch) break;
    if (grid.empty() || grid.back() != value) grid.push_back(value);
  }
  if (grid.back() != max_batch) grid.push_back(max_batch);
  return grid;
}

KernelProfile synthesize_profile(const SynthProfileParams& params) {
  KernelProfile profile(params.device_name);
  const auto grid = batch_grid(params.max_batch);
  auto fill = [&](StageKind stage, const SynthStageParams& p) {
    if (p.fixed <= kZero && p.per_item <= kZero) {
      throw ValidationError("synthesize_profile: stage " +
                            std::string(stage_kind_name(stage)) +
                            " needs a positive fixed or per_item time");
    }
    for (Count b : grid) {
      const Duration linear{p.per_item.count() * static_cast<std::int64_t>(b)};
      profile.insert(stage, params.seq_len, b, std::max(p.fixed, linear));
    }
  };
  if (params.nonattention) fill(StageKind::NonAttention, *params.nonattention);
  if (params.attention) fill(StageKind::Attention, *params.attention);
  if (params.classifier) fill(StageKind::Classifier, *params.classifier);
  profile.finalize();
  return profile;
}

}  // namespace tierplan

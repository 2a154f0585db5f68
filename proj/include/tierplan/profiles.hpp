#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tierplan/units.hpp"

namespace tierplan {

enum class StageKind { NonAttention, Attention, Classifier };

const char* stage_kind_name(StageKind kind);
std::optional<StageKind> stage_kind_from_name(const std::string& name);

// Per-device kernel latency table, keyed by (stage, seq_len, batch).
// Queries interpolate linearly between the two nearest profiled batches;
// outside the grid they extrapolate from the top two points (above) or
// clamp to the smallest batch (below), attaching a warning either way.
class KernelProfile {
 public:
  struct Entry {
    Count batch = 0;
    Duration latency = kZero;
  };

  KernelProfile() = default;
  explicit KernelProfile(std::string device_name) : device_name_(std::move(device_name)) {}

  const std::string& device_name() const { return device_name_; }

  // Throws ValidationError on duplicate (stage, seq_len, batch) keys or
  // non-positive latency.
  void insert(StageKind stage, Count seq_len, Count batch, Duration latency);

  // Run after all inserts: sorts grids, checks NonAttention monotonicity
  // (violations become warnings, not errors).
  void finalize();

  bool has_stage(StageKind stage) const;

  // Latency at the given batch. Attention queries default to the maximum
  // profiled sequence length; a sweep may request another seq_len, which
  // picks the smallest profiled length >= the request (or the maximum).
  Duration latency(StageKind stage, Count batch,
                   std::optional<Count> seq_len = std::nullopt) const;

  std::vector<Count> profiled_batches(StageKind stage) const;
  Count max_profiled_batch(StageKind stage) const;
  Count max_seq_len_profiled() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  const std::vector<Entry>& grid_for(StageKind stage, std::optional<Count> seq_len) const;

  std::string device_name_;
  // stage -> seq_len -> entries sorted by batch
  std::map<StageKind, std::map<Count, std::vector<Entry>>> tables_;
  std::vector<std::string> warnings_;
  mutable bool warned_extrapolation_ = false;
};

// CSV with header `device,stage,seq_len,batch_size,latency_us`;
// stage in {nonattention, attention, classifier}; rows in any order.
KernelProfile load_profile(const std::string& path);
KernelProfile parse_profile(std::istream& in, const std::string& origin);

// Rounded geometric batch grid with ratio sqrt(2): 1, 2, 3, 4, 6, 8, ...
// Deduplicated, capped at max_batch, always contains 1 and max_batch.
std::vector<Count> batch_grid(Count max_batch);

// Synthetic saturating profile for fixtures: per stage,
// latency(B) = max(fixed, B * per_item), sampled on batch_grid(max_batch).
struct SynthStageParams {
  Duration fixed = kZero;
  Duration per_item = kZero;
};
struct SynthProfileParams {
  std::string device_name = "synthetic";
  Count max_batch = 4096;
  Count seq_len = 1;
  std::optional<SynthStageParams> nonattention;
  std::optional<SynthStageParams> attention;
  std::optional<SynthStageParams> classifier;
};
KernelProfile synthesize_profile(const SynthProfileParams& params);

}  // namespace tierplan

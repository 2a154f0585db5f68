#pragma once

// Shared fixture builders: a Llama2-70B-like architecture, synthetic
// saturating profiles with T4/EPYC-like magnitudes, and cluster specs
// sized for the tests.

#include <string>

#include "tierplan/model.hpp"
#include "tierplan/netmodel.hpp"
#include "tierplan/optimizer.hpp"
#include "tierplan/profiles.hpp"
#include "tierplan/units.hpp"

namespace tierplan::testing {

using namespace std::chrono_literals;

inline TransformerSpec llama70b_like() {
  TransformerSpec spec;
  spec.name = "llama2-70b-like";
  spec.n_layers = 80;
  spec.d_model = 8192;
  spec.d_kv = 1024;
  spec.d_hidden = 28672;
  spec.n_heads = 64;
  spec.n_kv_heads = 8;
  spec.max_seq_len = 2048;
  spec.dtype_bytes = 2;
  spec.vocab_size = 32000;
  spec.validate();
  return spec;
}

inline TransformerSpec tiny_spec() {
  TransformerSpec spec;
  spec.name = "tiny";
  spec.n_layers = 1;
  spec.d_model = 2;
  spec.d_kv = 2;
  spec.d_hidden = 2;
  spec.n_heads = 1;
  spec.n_kv_heads = 1;
  spec.max_seq_len = 16;
  spec.dtype_bytes = 2;
  spec.validate();
  return spec;
}

// Saturating non-attention profile with the kink exactly on the batch
// grid (256), so linear interpolation reproduces the synthetic function
// everywhere: latency(B) = max(5.6ms, B * 21.875us).
inline KernelProfile t4_like_profile(Count max_batch = 4096) {
  SynthProfileParams params;
  params.device_name = "t4-like";
  params.max_batch = max_batch;
  params.seq_len = 2048;
  params.nonattention = SynthStageParams{Duration{5'600'000}, Duration{21'875}};
  params.attention = SynthStageParams{kZero, Duration{80'000}};  // 80us per prompt
  return synthesize_profile(params);
}

// Batch-linear attention profile, EPYC-like magnitude: 80us per prompt.
inline KernelProfile epyc_like_profile(Count max_batch = 4096) {
  SynthProfileParams params;
  params.device_name = "epyc-like";
  params.max_batch = max_batch;
  params.seq_len = 2048;
  params.attention = SynthStageParams{kZero, Duration{80'000}};
  return synthesize_profile(params);
}

inline LinkSpec ethernet_8gbps() { return LinkSpec{8e9, Duration{2'000'000}}; }

// Effectively-infinite link: transfer times round to 0 ns, RTT 0.
inline LinkSpec ideal_link() { return LinkSpec{1e21, kZero}; }

inline ClusterSpec t4_epyc_cluster(Count tier1_nodes, Count tier2_nodes) {
  ClusterSpec cluster;
  cluster.tier1 = TierSpec{"t4-like", tier1_nodes, 16 * kGiB, 1780.0};
  cluster.tier2 = TierSpec{"epyc-like", tier2_nodes, 110 * kGiB, 800.0};
  cluster.inter_tier = ethernet_8gbps();
  cluster.intra_tier1 = ethernet_8gbps();
  return cluster;
}

}  // namespace tierplan::testing

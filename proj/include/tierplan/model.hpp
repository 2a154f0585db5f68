#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "tierplan/units.hpp"

namespace tierplan {

// Decoder-only transformer architecture constants. These drive every
// memory, compute and payload formula in the planner.
struct TransformerSpec {
  std::string name;
  Count n_layers = 0;     // N
  Count d_model = 0;      // D, activation dimension
  Count d_kv = 0;         // D_kv, key/value dimension
  Count d_hidden = 0;     // D_h, FFN hidden dimension
  Count n_heads = 0;      // H
  Count n_kv_heads = 0;   // H_kv
  Count max_seq_len = 0;  // S
  Count dtype_bytes = 0;  // bytes per element; 2 for half precision
  std::optional<Count> vocab_size;

  // Throws ValidationError on any violated invariant.
  void validate() const;
};

// Per-layer resource totals. Memory is element loads+stores, compute is
// multiply-accumulate operations; byte conversion is a separate
// multiplication by dtype_bytes where a formula calls for it.
struct ResourceFootprint {
  std::uint64_t mem_accesses = 0;
  std::uint64_t flops = 0;
};

// KV-cache bytes one in-flight prompt pins across all layers: key and
// value vector per token per layer, i.e. 2 * dtype_bytes * N * S * D_kv.
Bytes kv_bytes_per_prompt(const TransformerSpec& spec, Count seq_len);

// Non-attention GEMM totals for one layer at batch B:
//   mem   = D(2D + 3D_h + 2D_kv) + B(8D + 3D_h + 2D_kv)
//   flops = B * D * (2D + 3D_h + 2D_kv)
ResourceFootprint nonattention_footprint(const TransformerSpec& spec, Count batch);

// Attention totals for one layer at batch B, sequence length S:
//   mem = 2B(D + SH + SD_kv), flops = 2SBD
ResourceFootprint attention_footprint(const TransformerSpec& spec, Count batch,
                                      Count seq_len);

// Total parameter bytes at dtype_bytes width. Per layer:
// 2D^2 + 2D*D_kv + 3D*D_h elements; embedding plus classifier add
// 2 * vocab_size * D elements when vocab_size is present.
Bytes weights_bytes(const TransformerSpec& spec);

// floor(free_bytes / per_prompt_bytes); per_prompt_bytes must be positive.
Count context_slots(Bytes free_bytes, Bytes per_prompt_bytes);

// Loads a model spec from a JSON document. Unknown fields are rejected.
TransformerSpec load_model_spec(const std::string& path);
TransformerSpec parse_model_spec(std::istream& in, const std::string& origin);

}  // namespace tierplan

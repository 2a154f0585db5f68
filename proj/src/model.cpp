#include "tierplan/model.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tierplan/errors.hpp"

namespace tierplan {

void TransformerSpec::validate() const {
  auto positive = [&](Count v, const char* field) {
    if (v == 0) {
      throw ValidationError("model '" + name + "': " + field +
                            " must be strictly positive");
    }
  };
  positive(n_layers, "n_layers");
  positive(d_model, "d_model");
  positive(d_kv, "d_kv");
  positive(d_hidden, "d_hidden");
  positive(n_heads, "n_heads");
  positive(n_kv_heads, "n_kv_heads");
  positive(max_seq_len, "max_seq_len");
  if (d_model % n_heads != 0) {
    throw ValidationError("model '" + name + "': d_model not divisible by n_heads");
  }
  if (d_kv % n_kv_heads != 0) {
    throw ValidationError("model '" + name + "': d_kv not divisible by n_kv_heads");
  }
  if (dtype_bytes != 1 && dtype_bytes != 2 && dtype_bytes != 4) {
    throw ValidationError("model '" + name + "': dtype_bytes must be 1, 2 or 4");
  }
  if (vocab_size && *vocab_size == 0) {
    throw ValidationError("model '" + name + "': vocab_size must be positive when present");
  }
}

Bytes kv_bytes_per_prompt(const TransformerSpec& spec, Count seq_len) {
  if (seq_len > spec.max_seq_len) {
    throw ValidationError("seq_len " + std::to_string(seq_len) +
                          " exceeds max_seq_len " + std::to_string(spec.max_seq_len));
  }
  return 2 * spec.dtype_bytes * spec.n_layers * seq_len * spec.d_kv;
}

ResourceFootprint nonattention_footprint(const TransformerSpec& spec, Count batch) {
  const std::uint64_t d = spec.d_model;
  const std::uint64_t dh = spec.d_hidden;
  const std::uint64_t dkv = spec.d_kv;
  ResourceFootprint f;
  f.mem_accesses = d * (2 * d + 3 * dh + 2 * dkv) + batch * (8 * d + 3 * dh + 2 * dkv);
  f.flops = batch * d * (2 * d + 3 * dh + 2 * dkv);
  return f;
}

ResourceFootprint attention_footprint(const TransformerSpec& spec, Count batch,
                                      Count seq_len) {
  const std::uint64_t d = spec.d_model;
  const std::uint64_t h = spec.n_heads;
  const std::uint64_t dkv = spec.d_kv;
  ResourceFootprint f;
  f.mem_accesses = 2 * batch * (d + seq_len * h + seq_len * dkv);
  f.flops = 2 * seq_len * batch * d;
  return f;
}

Bytes weights_bytes(const TransformerSpec& spec) {
  const std::uint64_t d = spec.d_model;
  std::uint64_t elements =
      spec.n_layers * (2 * d * d + 2 * d * spec.d_kv + 3 * d * spec.d_hidden);
  if (spec.vocab_size) {
    elements += 2 * *spec.vocab_size * d;
  }
  return elements * spec.dtype_bytes;
}

Count context_slots(Bytes free_bytes, Bytes per_prompt_bytes) {
  if (per_prompt_bytes == 0) {
    throw ValidationError("context_slots: per_prompt_bytes must be positive");
  }
  return free_bytes / per_prompt_bytes;
}

namespace {

TransformerSpec from_json(const nlohmann::json& doc, const std::string& origin) {
  if (!doc.is_object()) {
    throw ValidationError(origin + ": model spec must be a JSON object");
  }
  static const char* known[] = {"name",       "n_layers",   "d_model",
                                "d_kv",       "d_hidden",   "n_heads",
                                "n_kv_heads", "max_seq_len", "dtype_bytes",
                                "vocab_size"};
  for (const auto& [key, value] : doc.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError(origin + ": unknown model field '" + key + "'");
  }
  auto require = [&](const char* field) -> const nlohmann::json& {
    auto it = doc.find(field);
    if (it == doc.end()) {
      throw ValidationError(origin + ": missing model field '" + std::string(field) + "'");
    }
    return *it;
  };
  auto count_field = [&](const char* field) -> Count {
    const auto& v = require(field);
    if (!v.is_number_unsigned()) {
      throw ValidationError(origin + ": field '" + std::string(field) +
                            "' must be a non-negative integer");
    }
    return v.get<Count>();
  };

  TransformerSpec spec;
  spec.name = require("name").get<std::string>();
  spec.n_layers = count_field("n_layers");
  spec.d_model = count_field("d_model");
  spec.d_kv = count_field("d_kv");
  spec.d_hidden = count_field("d_hidden");
  spec.n_heads = count_field("n_heads");
  spec.n_kv_heads = count_field("n_kv_heads");
  spec.max_seq_len = count_field("max_seq_len");
  spec.dtype_bytes = count_field("dtype_bytes");
  if (auto it = doc.find("vocab_size"); it != doc.end()) {
    if (!it->is_number_unsigned()) {
      throw ValidationError(origin + ": field 'vocab_size' must be a non-negative integer");
    }
    spec.vocab_size = it->get<Count>();
  }
  spec.validate();
  return spec;
}

}  // namespace

TransformerSpec parse_model_spec(std::istream& in, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(origin + ": " + e.what());
  }
  return from_json(doc, origin);
}

TransformerSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model spec '" + path + "'");
  return parse_model_spec(in, path);
}

}  // namespace tierplan

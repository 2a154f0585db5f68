#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace tierplan {

inline constexpr const char* kToolName = "tierplan";
inline constexpr const char* kToolVersion = "0.1.0";

// Provenance block embedded in every report. Identical manifests imply
// identical report bodies; the timestamp stays empty unless the caller
// injects one, so repeated runs are byte-identical.
struct RunManifest {
  std::string command;
  std::vector<std::string> args;
  struct Input {
    std::string path;
    std::string sha256;
  };
  std::vector<Input> inputs;
  std::string timestamp;

  void add_input(const std::string& path);
  nlohmann::json to_json() const;
};

std::string sha256_file(const std::string& path);
std::string sha256_bytes(const void* data, std::size_t size);

}  // namespace tierplan

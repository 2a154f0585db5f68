#include "tierplan/manifest.hpp"

#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "tierplan/errors.hpp"

namespace tierplan {

std::string sha256_bytes(const void* data, std::size_t size) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  if (EVP_Digest(data, size, digest, &digest_len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * digest_len);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for hashing");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string bytes = buffer.str();
  return sha256_bytes(bytes.data(), bytes.size());
}

void RunManifest::add_input(const std::string& path) {
  inputs.push_back(Input{path, sha256_file(path)});
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json inputs_json = nlohmann::json::array();
  for (const Input& input : inputs) {
    inputs_json.push_back({{"path", input.path}, {"sha256", input.sha256}});
  }
  return nlohmann::json{{"tool", kToolName},
                        {"version", kToolVersion},
                        {"command", command},
                        {"args", args},
                        {"inputs", inputs_json},
                        {"timestamp", timestamp}};
}

}  // namespace tierplan

#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wl1/version.hpp"

namespace wl1 {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << content;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline nlohmann::json load_json(const std::filesystem::path& path) {
  return nlohmann::json::parse(read_file(path));
}

// Every CLI run writes one manifest capturing command + effective parameters;
// re-running from the manifest reproduces the CSV outputs byte for byte.
inline nlohmann::json make_manifest(const std::string& command, const nlohmann::json& params) {
  return nlohmann::json{{"schema", kManifestSchema},
                        {"version", kVersion},
                        {"rng_scheme", kRngScheme},
                        {"command", command},
                        {"params", params}};
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& command,
                           const nlohmann::json& params) {
  write_file(dir / "manifest.json", make_manifest(command, params).dump(2) + "\n");
}

}  // namespace wl1

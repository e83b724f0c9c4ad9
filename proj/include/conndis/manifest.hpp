// Run manifests: the resolved configuration and input digests of a run.
#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "conndis/errors.hpp"

namespace conndis {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a 64-bit over raw bytes.
inline std::uint64_t fnv1a64(const char* data, std::size_t size, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot read '" + path.string() + "' for digest");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return hex;
}

// Ordered key/value pairs describing one run; sufficient to reproduce it.
// Deliberately carries no timestamps so identical runs emit identical bytes.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> fields;

  explicit RunManifest(const std::string& command) {
    fields.emplace_back("command", command);
    fields.emplace_back("version", kVersion);
  }

  void add(const std::string& key, std::string value) { fields.emplace_back(key, std::move(value)); }

  void add_input(const std::string& key, const std::filesystem::path& path) {
    fields.emplace_back(key, path.string());
    fields.emplace_back(key + "_digest", digest_file(path));
  }

  void write(std::ostream& out) const {
    out << "conndis-manifest\t1\n";
    for (const auto& [k, v] : fields) out << k << "\t" << v << "\n";
  }

  void write_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw LoadError("cannot write manifest '" + path.string() + "'");
    write(out);
  }
};

}  // namespace conndis

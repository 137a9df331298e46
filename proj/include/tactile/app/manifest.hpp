#pragma once

// Run manifests: what a command was asked to do and content hashes of what
// it read and wrote. A command that consumes another command's output lists
// that run's manifest among its inputs, so runs chain by hash.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace tactile::app {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);
/// IoError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::optional<std::uint64_t> seed;
  nlohmann::json config = nlohmann::json::object();
  std::vector<FileDigest> inputs;   // paths as given
  std::vector<FileDigest> outputs;  // relative to the output directory

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& out_dir, const std::string& name);

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);

  /// Writes manifest.json into `out_dir` and returns its path.
  std::filesystem::path write(const std::filesystem::path& out_dir) const;
  static RunManifest read(const std::filesystem::path& path);
};

inline constexpr const char* kManifestName = "manifest.json";

}  // namespace tactile::app

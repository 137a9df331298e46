#include "tactile/app/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>

#include "tactile/errors.hpp"

namespace tactile::app {

using nlohmann::json;

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::Io, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string sha256_hex(std::string_view text) {
  return sha256_hex(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({path.generic_string(), sha256_file(path)});
}

void RunManifest::add_output(const std::filesystem::path& out_dir,
                             const std::string& name) {
  outputs.push_back({name, sha256_file(out_dir / name)});
}

namespace {

json digests_json(const std::vector<FileDigest>& files) {
  json out = json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return out;
}

std::vector<FileDigest> digests_from_json(const json& j) {
  std::vector<FileDigest> out;
  for (const auto& f : j) out.push_back({f.at("path"), f.at("sha256")});
  return out;
}

}  // namespace

json RunManifest::to_json() const {
  return {{"format", "tactile-run-manifest"},
          {"command", command},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"config", config},
          {"inputs", digests_json(inputs)},
          {"outputs", digests_json(outputs)}};
}

RunManifest RunManifest::from_json(const json& j) {
  try {
    RunManifest m;
    m.command = j.at("command");
    if (!j.at("seed").is_null()) m.seed = j.at("seed").get<std::uint64_t>();
    m.config = j.at("config");
    m.inputs = digests_from_json(j.at("inputs"));
    m.outputs = digests_from_json(j.at("outputs"));
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run manifest: ") + e.what());
  }
}

std::filesystem::path RunManifest::write(const std::filesystem::path& out_dir) const {
  const auto path = out_dir / kManifestName;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json().dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
  return path;
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace tactile::app

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace lossforge {

inline constexpr const char* kToolVersion = "1.0.0";

// Reproducibility record written once per output directory. The timestamp is
// the only non-deterministic line any command produces.
struct RunManifest {
    std::string command;
    std::string config_digest;
    std::vector<std::pair<std::string, std::string>> input_digests; // (path, digest)
    std::string tool_version = kToolVersion;
    std::string timestamp_utc;
};

// FNV-1a 64-bit content digest, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
std::string file_digest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

} // namespace lossforge

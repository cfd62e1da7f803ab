#include "lossforge/manifest.hpp"

#include <cstdint>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lossforge/errors.hpp"

namespace lossforge {

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_validation("file-missing", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
    std::filesystem::create_directories(out_dir);
    nlohmann::json j;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    j["input_digests"] = nlohmann::json::array();
    for (const auto& [path, digest] : manifest.input_digests)
        j["input_digests"].push_back({{"path", path}, {"digest", digest}});
    j["tool_version"] = manifest.tool_version;
    std::string stamp = manifest.timestamp_utc;
    if (stamp.empty()) {
        char buf[32];
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        stamp = buf;
    }
    j["timestamp_utc"] = stamp;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out)
        fail_validation("file-unwritable",
                        "cannot write manifest in '" + out_dir.string() + "'");
    out << j.dump(2) << "\n";
}

} // namespace lossforge

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lossforge/participation.hpp"

namespace testsupport {

inline std::filesystem::path fixtures_dir() { return LOSSFORGE_FIXTURES_DIR; }

inline std::filesystem::path fixture(const std::string& rel) { return fixtures_dir() / rel; }

// The fixed package conductor + MA dielectric channels used throughout: 5N5
// aluminum surface resistance 0.61 uOhm at 50 nm penetration depth and MA
// loss tangent 4.1e-2.
inline std::map<std::string, lossforge::ChannelLoss> package_fixed() {
    std::map<std::string, lossforge::ChannelLoss> fixed;
    fixed["pkg_cond"] = {0.61e-6, 0.28e-6, 50e-9, ""};
    fixed["pkg_ma"] = {4.1e-2, 1.8e-2, 0.0, ""};
    return fixed;
}

} // namespace testsupport

#pragma once

namespace lossforge::cli {

// Full command-line surface; returns the process exit code.
// 0 success, 1 validation error, 2 numerical failure, 64 usage.
int dispatch(int argc, const char* const* argv);

} // namespace lossforge::cli

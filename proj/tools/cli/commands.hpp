#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace torus_lab::cli {

enum ExitCode : int { kOk = 0, kError = 1, kViolated = 2 };

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned threads = 0;               // 0: TORUS_LAB_THREADS, then hardware
};

const std::vector<std::string>& command_names();

/// Runs one command and writes its CSV files plus summary.txt into
/// output_dir (created if missing). Errors are reported on `err`.
int run(const std::string& command, const std::filesystem::path& config_path,
        const std::filesystem::path& output_dir, const RunOptions& options, std::ostream& err);

}  // namespace torus_lab::cli

#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>

namespace logsp::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kConfigError = 2, kDiverged = 3 };

// Each command writes its reports into `out` and a one-line summary to `log`.
int run_verify(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_solve(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_moser(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);
int run_kernel_bench(const RunConfig& cfg, const std::filesystem::path& out, std::ostream& log);

}  // namespace logsp::cli

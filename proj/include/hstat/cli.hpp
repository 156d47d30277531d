/// @file cli.hpp
/// @brief Batch runner behind the command-line tool. One JSON config names a
/// command, a metric preset, a grid (size or input file) and command
/// parameters; the run writes report.json plus any grid/CSV sidecars.
#pragma once

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>

namespace hstat::cli {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 1 numeric failure, 2 usage error
  nlohmann::json report;
};

/// FNV-1a 64 of the compact dump, hex encoded.
std::string config_digest(const nlohmann::json& config);

/// Runs the config and writes out_dir/report.json. Relative input paths
/// are resolved against base_dir.
RunOutcome run(const nlohmann::json& config, const std::filesystem::path& out_dir,
               const std::filesystem::path& base_dir = ".");

}  // namespace hstat::cli

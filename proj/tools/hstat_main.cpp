#include "hstat/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Volume, residual and regularity diagnostics for gradient graphs"};
  std::string config_path;
  std::string out_dir = ".";
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "directory for report.json and sidecar files");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  nlohmann::json config;
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "cannot read config " << config_path << '\n';
    return 2;
  }
  try {
    is >> config;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config is not valid JSON: " << e.what() << '\n';
    return 2;
  }
  const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
  const auto outcome = hstat::cli::run(config, out_dir, base.empty() ? "." : base);
  for (const auto& err : outcome.report["errors"])
    std::cerr << err["kind"].get<std::string>() << ": " << err["message"].get<std::string>() << '\n';
  std::cout << outcome.report["results"].dump(2) << '\n';
  return outcome.exit_code;
}

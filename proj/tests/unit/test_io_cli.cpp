#include <doctest.h>

#include "hstat/cli.hpp"
#include "hstat/errors.hpp"
#include "hstat/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace hstat;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hstat_unit_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string fnv1a_reference(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace

TEST_CASE("base64 round trip is bitwise exact") {
  const std::vector<double> v = {0.0, -0.0, 1.0 / 3.0, std::numbers::pi, 1e-300, -7.25e12, 5e-324};
  const std::vector<double> back = decode_doubles(encode_doubles(v));
  REQUIRE(back.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(std::memcmp(&back[i], &v[i], sizeof(double)) == 0);
  // 8 zero bytes encode to "AAAAAAAAAAA="
  CHECK(encode_doubles({0.0}) == "AAAAAAAAAAA=");
  CHECK_THROWS_AS(decode_doubles("AAAA"), Error);
}

TEST_CASE("grid files round trip") {
  const fs::path dir = scratch("grid");
  const PotentialGrid g = PotentialGrid::sample(2, 8, potentials::sincos(0.3), "sincos");
  for (GridEncoding enc : {GridEncoding::Base64, GridEncoding::Plain}) {
    write_grid(dir / "g.json", g, enc);
    const PotentialGrid r = read_grid(dir / "g.json");
    CHECK(r.dim() == 2);
    CHECK(r.cells() == 8);
    CHECK(r.description() == "sincos");
    CHECK(r.values() == g.values());
  }
  json bad = grid_to_json(g);
  bad["N"] = 9;
  CHECK_THROWS_AS(grid_from_json(bad), Error);
  CHECK_THROWS_AS(read_grid(dir / "missing.json"), Error);
}

TEST_CASE("profile csv") {
  const fs::path dir = scratch("csv");
  DecayProfile p;
  p.radii = {0.5, 0.25};
  p.phi = {2.0, 0.5};
  p.osc = {0.0, 0.0};
  write_profile_csv(dir / "p.csv", p);
  std::ifstream is(dir / "p.csv");
  std::string header, row;
  std::getline(is, header);
  std::getline(is, row);
  CHECK(header == "rho,phi,osc");
  CHECK(row.rfind("0.5,2,0", 0) == 0);
}

TEST_CASE("config digest is FNV-1a of the compact dump") {
  CHECK(fnv1a_reference("a") == "af63dc4c8601ec8c");
  const json cfg = {{"command", "volume"}, {"grid", {{"n", 2}, {"N", 16}}}};
  CHECK(cli::config_digest(cfg) == fnv1a_reference(cfg.dump()));
}

TEST_CASE("cli volume and ellipticity") {
  const fs::path dir = scratch("cli_volume");
  const json vol = {{"command", "volume"},
                    {"metric", {{"kind", "flat"}}},
                    {"grid", {{"n", 2}, {"N", 64}}},
                    {"params", {{"preset_u", "zero"}, {"region", "unit_ball"}}}};
  const auto a = cli::run(vol, dir);
  CHECK(a.exit_code == 0);
  CHECK(a.report["results"]["volume"].get<double>() == doctest::Approx(std::numbers::pi).epsilon(2e-3 / std::numbers::pi));
  CHECK(fs::exists(dir / "report.json"));
  // deterministic apart from the wall time
  auto b = cli::run(vol, dir);
  json ra = a.report, rb = b.report;
  ra.erase("wall_ms");
  rb.erase("wall_ms");
  CHECK(ra.dump() == rb.dump());

  const json ell = {{"command", "ellipticity"}, {"metric", {{"kind", "flat"}}}, {"params", {{"preset_u", "zero"}}}};
  const auto e = cli::run(ell, scratch("cli_ell"));
  CHECK(e.exit_code == 0);
  CHECK(std::abs(e.report["results"]["lambda_min"].get<double>() - 0.5) < 1e-6);
}

TEST_CASE("cli campanato on a solve-bvp output") {
  const fs::path dir = scratch("cli_chain");
  const json solve = {{"command", "solve-bvp"},
                      {"grid", {{"n", 2}, {"N", 32}}},
                      {"params", {{"preset_u", "cubic_harmonic"}, {"output_grid", "w.json"}}}};
  const auto s = cli::run(solve, dir);
  REQUIRE(s.exit_code == 0);
  const json camp = {{"command", "campanato"},
                     {"grid", {{"input", (dir / "w.json").string()}}},
                     {"params", {{"radii", {0.8, 0.4, 0.2}}, {"csv", "profile.csv"}}}};
  const auto c = cli::run(camp, dir);
  REQUIRE(c.exit_code == 0);
  CHECK(fs::exists(dir / "profile.csv"));
  CHECK(c.report["results"]["osc_slope"].get<double>() == doctest::Approx(4.0).epsilon(0.05 / 4));
}

TEST_CASE("cli exit codes") {
  const fs::path dir = scratch("cli_codes");
  CHECK(cli::run(json{{"command", "nope"}}, dir).exit_code == 2);
  CHECK(cli::run(json::array(), dir).exit_code == 2);
  CHECK(cli::run(json{{"command", "volume"}, {"grid", {{"n", 4}}}}, dir).exit_code == 2);
  CHECK(cli::run(json{{"command", "volume"}, {"grid", {{"input", "/nonexistent/g.json"}}}}, dir).exit_code == 2);
  const auto steep = cli::run(json{{"command", "minimize"},
                                   {"grid", {{"n", 2}, {"N", 16}}},
                                   {"params", {{"preset_u", "paraboloid"}, {"c", 1.5}}}},
                              dir);
  CHECK(steep.exit_code == 1);
  CHECK(steep.report["errors"][0]["kind"] == "steepness");
}

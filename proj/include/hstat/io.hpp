/// @file io.hpp
/// @brief Grid files and CSV sidecars.
///
/// A grid file is a JSON object
///   {"n": 2, "N": 64, "description": "...", "encoding": "base64", "values": "..."}
/// where values holds the (N+1)^n node values in row-major order (axis 0
/// slowest), either base64 of little-endian IEEE-754 doubles or, with
/// "encoding": "plain", a JSON array of numbers.
#pragma once

#include "hstat/campanato.hpp"
#include "hstat/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace hstat {

enum class GridEncoding { Base64, Plain };

std::string encode_doubles(const std::vector<double>& values);
std::vector<double> decode_doubles(const std::string& text);

nlohmann::json grid_to_json(const PotentialGrid& g, GridEncoding enc = GridEncoding::Base64);
PotentialGrid grid_from_json(const nlohmann::json& j);

void write_grid(const std::filesystem::path& path, const PotentialGrid& g, GridEncoding enc = GridEncoding::Base64);
PotentialGrid read_grid(const std::filesystem::path& path);

/// CSV with header "rho,phi,osc", one row per radius.
void write_profile_csv(const std::filesystem::path& path, const DecayProfile& p);

}  // namespace hstat

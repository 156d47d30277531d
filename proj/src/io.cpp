#include "hstat/io.hpp"

#include "hstat/errors.hpp"

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace hstat {

namespace {

namespace it = boost::archive::iterators;
using ToBase64 = it::base64_from_binary<it::transform_width<std::string::const_iterator, 6, 8>>;
using FromBase64 = it::transform_width<it::binary_from_base64<std::string::const_iterator>, 8, 6>;

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

}  // namespace

std::string encode_doubles(const std::vector<double>& values) {
  std::string bytes(values.size() * 8, '\0');
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t v = to_little(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(&bytes[i * 8], &v, 8);
  }
  std::string out(ToBase64(bytes.cbegin()), ToBase64(bytes.cend()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::vector<double> decode_doubles(const std::string& text) {
  std::string clean;
  clean.reserve(text.size());
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  if (clean.size() % 4 != 0) fail(ErrorKind::Io, "base64 length is not a multiple of 4");
  const std::size_t pad = clean.size() - clean.find_last_not_of('=') - 1;
  if (pad > 2) fail(ErrorKind::Io, "malformed base64 padding");
  std::replace(clean.end() - static_cast<std::ptrdiff_t>(pad), clean.end(), '=', 'A');
  std::string bytes;
  try {
    bytes.assign(FromBase64(clean.cbegin()), FromBase64(clean.cend()));
  } catch (const std::exception&) {
    fail(ErrorKind::Io, "malformed base64 data");
  }
  bytes.erase(bytes.end() - static_cast<std::ptrdiff_t>(pad), bytes.end());
  if (bytes.size() % 8 != 0) fail(ErrorKind::Io, "base64 payload is not a whole number of doubles");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t v;
    std::memcpy(&v, &bytes[i * 8], 8);
    out[i] = std::bit_cast<double>(to_little(v));
  }
  return out;
}

nlohmann::json grid_to_json(const PotentialGrid& g, GridEncoding enc) {
  nlohmann::json j;
  j["n"] = g.dim();
  j["N"] = g.cells();
  j["description"] = g.description();
  if (enc == GridEncoding::Base64) {
    j["encoding"] = "base64";
    j["values"] = encode_doubles(g.values());
  } else {
    j["encoding"] = "plain";
    j["values"] = g.values();
  }
  return j;
}

PotentialGrid grid_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const int N = j.at("N").get<int>();
    const std::string desc = j.value("description", std::string{});
    const std::string enc = j.value("encoding", std::string("plain"));
    std::vector<double> values;
    if (enc == "base64")
      values = decode_doubles(j.at("values").get<std::string>());
    else if (enc == "plain")
      values = j.at("values").get<std::vector<double>>();
    else
      fail(ErrorKind::Io, "unknown grid encoding '" + enc + "'");
    return PotentialGrid(n, N, std::move(values), desc);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, std::string("malformed grid file: ") + e.what());
  }
}

void write_grid(const std::filesystem::path& path, const PotentialGrid& g, GridEncoding enc) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot write " + path.string());
  os << grid_to_json(g, enc).dump(2) << '\n';
  if (!os) fail(ErrorKind::Io, "write failed for " + path.string());
}

PotentialGrid read_grid(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Io, "cannot read " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Io, "grid file " + path.string() + " is not valid JSON: " + e.what());
  }
  return grid_from_json(j);
}

void write_profile_csv(const std::filesystem::path& path, const DecayProfile& p) {
  std::ofstream os(path);
  if (!os) fail(ErrorKind::Io, "cannot write " + path.string());
  os.imbue(std::locale::classic());
  os << "rho,phi,osc\n" << std::setprecision(17);
  for (std::size_t k = 0; k < p.radii.size(); ++k) os << p.radii[k] << ',' << p.phi[k] << ',' << p.osc[k] << '\n';
  if (!os) fail(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace hstat

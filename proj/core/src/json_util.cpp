#include "tweetdyn/json_util.hpp"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "tweetdyn/dates.hpp"

namespace tweetdyn {

double round_sig(double value, int digits) {
  if (!std::isfinite(value)) return value;
  if (value == 0.0) return 0.0;
  return std::stod(fmt::format("{:.{}g}", value, digits));
}

std::string format_real(double value, int digits) {
  if (value == 0.0) return "0";
  return fmt::format("{:.{}g}", value, digits);
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << doc.dump(2) << '\n';
  if (!out) throw Error(fmt::format("write failed for '{}'", path.string()));
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace tweetdyn

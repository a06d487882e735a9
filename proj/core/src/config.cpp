#include "tweetdyn/config.hpp"

#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "tweetdyn/dates.hpp"

namespace tweetdyn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#' || view.front() == ';') continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(fmt::format("config line {}: expected 'key = value'", line_no));
    }
    std::string_view key = trim(view.substr(0, eq));
    std::string_view value = trim(view.substr(eq + 1));
    if (key.empty()) throw Error(fmt::format("config line {}: empty key", line_no));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    config.set(std::string(key), std::string(value));
  }
  return config;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open config file '{}'", path.string()));
  return parse(in);
}

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  auto it = values_.find(std::string(key));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueConfig::get_or(std::string_view key, std::string fallback) const {
  auto value = get(key);
  return value ? *value : std::move(fallback);
}

std::optional<double> KeyValueConfig::get_double(std::string_view key) const {
  auto value = get(key);
  if (!value) return std::nullopt;
  try {
    std::size_t used = 0;
    double d = std::stod(*value, &used);
    if (used != value->size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw Error(fmt::format("config key '{}': '{}' is not a number", key, *value));
  }
}

std::optional<std::int64_t> KeyValueConfig::get_int(std::string_view key) const {
  auto value = get(key);
  if (!value) return std::nullopt;
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), out);
  if (ec != std::errc{} || ptr != value->data() + value->size()) {
    throw Error(fmt::format("config key '{}': '{}' is not an integer", key, *value));
  }
  return out;
}

std::optional<bool> KeyValueConfig::get_bool(std::string_view key) const {
  auto value = get(key);
  if (!value) return std::nullopt;
  if (*value == "true" || *value == "1" || *value == "yes" || *value == "on") return true;
  if (*value == "false" || *value == "0" || *value == "no" || *value == "off") return false;
  throw Error(fmt::format("config key '{}': '{}' is not a boolean", key, *value));
}

}  // namespace tweetdyn

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

namespace tweetdyn {

using Json = nlohmann::ordered_json;

/// Rounds to `digits` significant decimal digits so serialized artifacts do
/// not depend on last-ulp differences between builds.
double round_sig(double value, int digits = 12);

/// Fixed-precision text for CSV cells.
std::string format_real(double value, int digits = 12);

/// 64-bit FNV-1a, used for stable config hashes in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

/// Writes `doc` with 2-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& doc);
Json read_json_file(const std::filesystem::path& path);

}  // namespace tweetdyn

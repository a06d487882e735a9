#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tweetdyn/config.hpp"
#include "tweetdyn/dates.hpp"
#include "tweetdyn/ingest.hpp"
#include "tweetdyn/spectral.hpp"
#include "tweetdyn/strategy.hpp"
#include "tweetdyn/topic.hpp"

namespace tweetdyn::cli {

inline constexpr const char* kOutputEnv = "TWEETDYN_OUT";

/// Every tunable of a run. Built from defaults, then a `key = value` file,
/// then `--set key=value` flags; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  void apply(const KeyValueConfig& overrides);
  void set(const std::string& key, const std::string& value);

  /// All keys, defaults included, in key order.
  const KeyValueConfig& settings() const { return settings_; }
  /// FNV-1a over the canonical `key=value` lines.
  std::string hash() const;

  std::optional<std::filesystem::path> input() const;
  std::optional<InputFormat> format() const;
  ColumnMapping columns() const;
  DateWindow window(const std::string& name) const;  // "pre" or "post"
  CohortSpec cohort(const std::string& window_name) const;
  SpectralConfig spectral() const;
  TopicConfig topic() const;
  SimplexPartition partition() const;
  std::uint64_t seed() const;

  struct Changepoint {
    Day origin;
    std::int64_t first = 200;
    std::int64_t change = 616;
    std::int64_t last = 859;
    double sigma = 5.0;
    std::optional<std::string> language;
  };
  Changepoint changepoint() const;

  /// Type- and range-checks every key.
  void validate() const;

 private:
  KeyValueConfig settings_;
};

/// Entry point shared by the executable and the tests. `args[0]` is the
/// program name. Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tweetdyn::cli

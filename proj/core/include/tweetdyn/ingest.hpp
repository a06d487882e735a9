#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "tweetdyn/config.hpp"
#include "tweetdyn/dates.hpp"
#include "tweetdyn/graph.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

/// One tweet. `retweeted_user_id` is present exactly when `is_retweet` is set.
struct TweetRecord {
  std::string tweet_id;
  std::string user_id;
  Timestamp timestamp{};
  std::string language;
  bool is_retweet = false;
  std::optional<std::string> retweeted_user_id;
  std::string text;

  bool operator==(const TweetRecord&) const = default;
};

enum class TweetCategory : std::uint8_t { Original = 0, Spreading = 1, Amplifying = 2 };

const char* to_string(TweetCategory category);

enum class InputFormat { Csv, Jsonl };

/// Guesses the format from a file extension (.csv / .jsonl / .json / .ndjson).
InputFormat format_from_path(const std::filesystem::path& path);

/// Maps dataset column (CSV) or key (JSONL) names onto record fields.
/// Defaults follow the public information-operations release schema.
struct ColumnMapping {
  std::string tweet_id = "tweetid";
  std::string user_id = "userid";
  std::string timestamp = "tweet_time";
  std::string language = "tweet_language";
  std::string is_retweet = "is_retweet";
  std::string retweeted_user_id = "retweet_userid";
  // Optional: a missing text column yields empty texts.
  std::string text = "tweet_text";

  /// Reads `column.<field>` overrides.
  static ColumnMapping from_config(const KeyValueConfig& config);
};

struct RowRejection {
  std::size_t row;  // 1-based data row (CSV) or line (JSONL)
  std::string reason;
};

struct ParseReport {
  std::size_t rows_read = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  /// First `kMaxStoredRejections` rejections; `rejected` counts all of them.
  std::vector<RowRejection> rejections;
  std::vector<std::string> warnings;

  static constexpr std::size_t kMaxStoredRejections = 1000;

  Json to_json() const;
};

struct ParseResult {
  std::vector<TweetRecord> records;
  ParseReport report;
};

/// Single-pass parse. Throws Error if the stream is unreadable or a required
/// column is missing; malformed rows are skipped and recorded in the report.
ParseResult parse_records(std::istream& in, InputFormat format, const ColumnMapping& columns = {});
ParseResult read_records_file(const std::filesystem::path& path,
                              std::optional<InputFormat> format = std::nullopt,
                              const ColumnMapping& columns = {});

/// Writes records in the schema `parse_records` reads.
void write_records(std::ostream& out, std::span<const TweetRecord> records, InputFormat format,
                   const ColumnMapping& columns = {});

using UserSet = std::unordered_set<std::string>;

TweetCategory categorize(const TweetRecord& record, const UserSet& campaign_users);

/// Tweets per category, indexed by TweetCategory.
std::array<std::size_t, 3> tally_categories(std::span<const TweetRecord> records,
                                            const UserSet& campaign_users);

/// The campaign is every account that authored a record in the release.
UserSet campaign_users(std::span<const TweetRecord> records);

struct CohortSpec {
  DateWindow window;
  /// Window over which `min_total_tweets` is counted; defaults to `window`.
  std::optional<DateWindow> volume_window;
  std::int64_t min_total_tweets = 0;
  double active_day_fraction = 0.0;
  std::optional<std::string> language;

  void validate() const;
  /// Reads `cohort.start`, `cohort.end`, `cohort.volume_start`, `cohort.volume_end`,
  /// `cohort.min_total_tweets`, `cohort.active_day_fraction` and `cohort.language`
  /// on top of `defaults`.
  static CohortSpec from_config(const KeyValueConfig& config, const CohortSpec& defaults);
};

struct CohortSelection {
  std::vector<std::string> users;  // sorted
  std::vector<std::string> warnings;
};

/// Users meeting the volume threshold and tweeting on at least
/// `active_day_fraction` of the window's days. The language filter is
/// applied before counting.
CohortSelection select_cohort(std::span<const TweetRecord> records, const CohortSpec& spec);

/// Undirected retweet network among campaign accounts: one vertex per campaign
/// account seen in `records` (as author or retweet target), edge weight = number
/// of retweet events between the pair in either direction. Self-retweets are
/// dropped.
WeightedGraph retweet_network(std::span<const TweetRecord> records, const UserSet& campaign_users);

}  // namespace tweetdyn

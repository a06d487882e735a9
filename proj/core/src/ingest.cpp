#include "tweetdyn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "tweetdyn/csv.hpp"

namespace tweetdyn {
namespace {

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "True" || s == "TRUE" || s == "1") return true;
  if (s == "false" || s == "False" || s == "FALSE" || s == "0") return false;
  return std::nullopt;
}

class Recorder {
 public:
  explicit Recorder(ParseReport& report) : report_(report) {}

  void reject(std::size_t row, std::string reason) {
    ++report_.rejected;
    if (report_.rejections.size() < ParseReport::kMaxStoredRejections) {
      report_.rejections.push_back({row, std::move(reason)});
    }
  }

 private:
  ParseReport& report_;
};

struct RawFields {
  std::string tweet_id;
  std::string user_id;
  std::string timestamp;
  std::string language;
  std::string is_retweet;
  std::string retweeted_user_id;
  std::string text;
};

// Shared validation for both input formats. Returns the rejection reason on failure.
std::optional<std::string> build_record(RawFields&& raw, TweetRecord& out) {
  for (const std::string* s : {&raw.tweet_id, &raw.user_id, &raw.timestamp, &raw.language,
                               &raw.is_retweet, &raw.retweeted_user_id, &raw.text}) {
    if (!is_valid_utf8(*s)) return "invalid UTF-8";
  }
  if (raw.tweet_id.empty()) return "empty tweet id";
  if (raw.user_id.empty()) return "empty user id";
  auto ts = parse_timestamp(raw.timestamp);
  if (!ts) return fmt::format("malformed timestamp '{}'", raw.timestamp);
  auto rt = parse_bool(raw.is_retweet);
  if (!rt) return fmt::format("malformed is_retweet value '{}'", raw.is_retweet);
  if (*rt && raw.retweeted_user_id.empty()) return "retweet without retweeted user id";
  if (!*rt && !raw.retweeted_user_id.empty()) return "non-retweet carries a retweeted user id";

  out.tweet_id = std::move(raw.tweet_id);
  out.user_id = std::move(raw.user_id);
  out.timestamp = *ts;
  out.language = std::move(raw.language);
  out.is_retweet = *rt;
  out.retweeted_user_id =
      *rt ? std::optional<std::string>(std::move(raw.retweeted_user_id)) : std::nullopt;
  out.text = std::move(raw.text);
  return std::nullopt;
}

void parse_csv(std::istream& in, const ColumnMapping& columns, ParseResult& result) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw Error("CSV input has no header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) position.emplace(header[i], i);
  auto require = [&](const std::string& name) {
    auto it = position.find(name);
    if (it == position.end()) throw Error(fmt::format("missing required column '{}'", name));
    return it->second;
  };
  const std::size_t c_id = require(columns.tweet_id);
  const std::size_t c_user = require(columns.user_id);
  const std::size_t c_time = require(columns.timestamp);
  const std::size_t c_lang = require(columns.language);
  const std::size_t c_rt = require(columns.is_retweet);
  const std::size_t c_rtuser = require(columns.retweeted_user_id);
  std::optional<std::size_t> c_text;
  if (auto it = position.find(columns.text); it != position.end()) {
    c_text = it->second;
  } else {
    result.report.warnings.push_back(
        fmt::format("no '{}' column; tweet texts will be empty", columns.text));
  }

  Recorder recorder(result.report);
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++row;
    ++result.report.rows_read;
    if (fields.size() != header.size()) {
      recorder.reject(row, fmt::format("expected {} fields, found {}", header.size(), fields.size()));
      continue;
    }
    RawFields raw{std::move(fields[c_id]),   std::move(fields[c_user]), std::move(fields[c_time]),
                  std::move(fields[c_lang]), std::move(fields[c_rt]),   std::move(fields[c_rtuser]),
                  c_text ? std::move(fields[*c_text]) : std::string{}};
    TweetRecord record;
    if (auto reason = build_record(std::move(raw), record)) {
      recorder.reject(row, std::move(*reason));
      continue;
    }
    result.records.push_back(std::move(record));
  }
}

std::optional<std::string> json_field(const nlohmann::json& obj, const std::string& key,
                                      bool required, std::string& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) return fmt::format("missing key '{}'", key);
    out.clear();
    return std::nullopt;
  }
  if (it->is_string()) {
    out = it->get<std::string>();
  } else if (it->is_boolean()) {
    out = it->get<bool>() ? "true" : "false";
  } else if (it->is_number_unsigned()) {
    out = std::to_string(it->get<std::uint64_t>());
  } else if (it->is_number_integer()) {
    out = std::to_string(it->get<std::int64_t>());
  } else {
    return fmt::format("key '{}' has unsupported type {}", key, it->type_name());
  }
  return std::nullopt;
}

void parse_jsonl(std::istream& in, const ColumnMapping& columns, ParseResult& result) {
  Recorder recorder(result.report);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.report.rows_read;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      recorder.reject(line_no, "invalid JSON");
      continue;
    }
    if (!obj.is_object()) {
      recorder.reject(line_no, "line is not a JSON object");
      continue;
    }
    RawFields raw;
    std::optional<std::string> reason;
    const std::pair<const std::string*, std::string*> required[] = {
        {&columns.tweet_id, &raw.tweet_id},     {&columns.user_id, &raw.user_id},
        {&columns.timestamp, &raw.timestamp},   {&columns.language, &raw.language},
        {&columns.is_retweet, &raw.is_retweet},
    };
    for (const auto& [key, dest] : required) {
      if ((reason = json_field(obj, *key, true, *dest))) break;
    }
    if (!reason) reason = json_field(obj, columns.retweeted_user_id, false, raw.retweeted_user_id);
    if (!reason) reason = json_field(obj, columns.text, false, raw.text);
    TweetRecord record;
    if (!reason) reason = build_record(std::move(raw), record);
    if (reason) {
      recorder.reject(line_no, std::move(*reason));
      continue;
    }
    result.records.push_back(std::move(record));
  }
}

}  // namespace

const char* to_string(TweetCategory category) {
  switch (category) {
    case TweetCategory::Original: return "original";
    case TweetCategory::Spreading: return "spreading";
    case TweetCategory::Amplifying: return "amplifying";
  }
  return "unknown";
}

InputFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv" || ext == ".CSV") return InputFormat::Csv;
  if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson") return InputFormat::Jsonl;
  throw Error(fmt::format("cannot infer input format from '{}'", path.string()));
}

ColumnMapping ColumnMapping::from_config(const KeyValueConfig& config) {
  ColumnMapping m;
  m.tweet_id = config.get_or("column.tweet_id", m.tweet_id);
  m.user_id = config.get_or("column.user_id", m.user_id);
  m.timestamp = config.get_or("column.timestamp", m.timestamp);
  m.language = config.get_or("column.language", m.language);
  m.is_retweet = config.get_or("column.is_retweet", m.is_retweet);
  m.retweeted_user_id = config.get_or("column.retweeted_user_id", m.retweeted_user_id);
  m.text = config.get_or("column.text", m.text);
  return m;
}

Json ParseReport::to_json() const {
  Json rows = Json::array();
  for (const auto& r : rejections) rows.push_back({{"row", r.row}, {"reason", r.reason}});
  return Json{{"rows_read", rows_read},
              {"accepted", accepted},
              {"rejected", rejected},
              {"rejections", std::move(rows)},
              {"rejections_truncated", rejected > rejections.size()},
              {"warnings", warnings}};
}

ParseResult parse_records(std::istream& in, InputFormat format, const ColumnMapping& columns) {
  if (!in.good()) throw Error("input stream is not readable");
  ParseResult result;
  if (format == InputFormat::Csv) {
    parse_csv(in, columns, result);
  } else {
    parse_jsonl(in, columns, result);
  }
  if (in.bad()) throw Error("I/O error while reading input");
  result.report.accepted = result.records.size();
  return result;
}

ParseResult read_records_file(const std::filesystem::path& path, std::optional<InputFormat> format,
                              const ColumnMapping& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open '{}'", path.string()));
  return parse_records(in, format.value_or(format_from_path(path)), columns);
}

void write_records(std::ostream& out, std::span<const TweetRecord> records, InputFormat format,
                   const ColumnMapping& columns) {
  if (format == InputFormat::Csv) {
    const std::vector<std::string> header{columns.tweet_id,   columns.user_id,
                                          columns.timestamp,  columns.language,
                                          columns.is_retweet, columns.retweeted_user_id,
                                          columns.text};
    write_csv_row(out, header);
    std::vector<std::string> row(7);
    for (const auto& r : records) {
      row = {r.tweet_id,
             r.user_id,
             format_timestamp(r.timestamp),
             r.language,
             r.is_retweet ? "true" : "false",
             r.retweeted_user_id.value_or(""),
             r.text};
      write_csv_row(out, row);
    }
    return;
  }
  for (const auto& r : records) {
    nlohmann::ordered_json obj;
    obj[columns.tweet_id] = r.tweet_id;
    obj[columns.user_id] = r.user_id;
    obj[columns.timestamp] = format_timestamp(r.timestamp);
    obj[columns.language] = r.language;
    obj[columns.is_retweet] = r.is_retweet;
    obj[columns.retweeted_user_id] =
        r.retweeted_user_id ? nlohmann::ordered_json(*r.retweeted_user_id) : nullptr;
    obj[columns.text] = r.text;
    out << obj.dump() << '\n';
  }
}

TweetCategory categorize(const TweetRecord& record, const UserSet& campaign_users) {
  if (!record.is_retweet) return TweetCategory::Original;
  if (record.retweeted_user_id && campaign_users.count(*record.retweeted_user_id)) {
    return TweetCategory::Spreading;
  }
  return TweetCategory::Amplifying;
}

std::array<std::size_t, 3> tally_categories(std::span<const TweetRecord> records,
                                            const UserSet& campaign_users) {
  std::array<std::size_t, 3> tally{};
  for (const auto& r : records) ++tally[static_cast<std::size_t>(categorize(r, campaign_users))];
  return tally;
}

UserSet campaign_users(std::span<const TweetRecord> records) {
  UserSet users;
  for (const auto& r : records) users.insert(r.user_id);
  return users;
}

void CohortSpec::validate() const {
  if (!(active_day_fraction >= 0.0 && active_day_fraction <= 1.0)) {
    throw Error(fmt::format("active_day_fraction {} outside [0, 1]", active_day_fraction));
  }
  if (min_total_tweets < 0) throw Error("min_total_tweets must be >= 0");
}

CohortSpec CohortSpec::from_config(const KeyValueConfig& config, const CohortSpec& defaults) {
  CohortSpec spec = defaults;
  if (config.contains("cohort.start") || config.contains("cohort.end")) {
    spec.window = DateWindow(parse_date(config.get_or("cohort.start", format_date(spec.window.start()))),
                             parse_date(config.get_or("cohort.end", format_date(spec.window.end()))));
  }
  if (config.contains("cohort.volume_start") || config.contains("cohort.volume_end")) {
    const DateWindow base = spec.volume_window.value_or(spec.window);
    spec.volume_window =
        DateWindow(parse_date(config.get_or("cohort.volume_start", format_date(base.start()))),
                   parse_date(config.get_or("cohort.volume_end", format_date(base.end()))));
  }
  if (auto v = config.get_int("cohort.min_total_tweets")) spec.min_total_tweets = *v;
  if (auto v = config.get_double("cohort.active_day_fraction")) spec.active_day_fraction = *v;
  if (auto v = config.get("cohort.language")) {
    spec.language = v->empty() ? std::nullopt : std::optional<std::string>(*v);
  }
  spec.validate();
  return spec;
}

CohortSelection select_cohort(std::span<const TweetRecord> records, const CohortSpec& spec) {
  spec.validate();
  if (records.empty()) throw Error("select_cohort needs at least one record");

  const DateWindow volume_window = spec.volume_window.value_or(spec.window);
  std::map<std::string, std::int64_t> volume;
  std::map<std::string, std::set<std::int64_t>> active_days;
  for (const auto& r : records) {
    if (spec.language && r.language != *spec.language) continue;
    const Day day = day_of(r.timestamp);
    if (volume_window.contains(day)) ++volume[r.user_id];
    if (spec.window.contains(day)) active_days[r.user_id].insert(spec.window.offset(day));
  }

  CohortSelection selection;
  const double n_days = static_cast<double>(spec.window.days());
  for (const auto& [user, total] : volume) {
    if (total < spec.min_total_tweets) continue;
    auto it = active_days.find(user);
    const double active = it == active_days.end() ? 0.0 : static_cast<double>(it->second.size());
    if (active < spec.active_day_fraction * n_days) continue;
    selection.users.push_back(user);
  }
  if (spec.min_total_tweets == 0) {
    // users active in the window but with no volume-window tweets still pass a zero threshold
    for (const auto& [user, days] : active_days) {
      if (volume.count(user)) continue;
      if (static_cast<double>(days.size()) >= spec.active_day_fraction * n_days) {
        selection.users.push_back(user);
      }
    }
    std::sort(selection.users.begin(), selection.users.end());
  }
  if (selection.users.empty()) selection.warnings.push_back("cohort selection is empty");
  return selection;
}

WeightedGraph retweet_network(std::span<const TweetRecord> records, const UserSet& campaign_users) {
  std::set<std::string> members;
  std::map<std::pair<std::string, std::string>, double> counts;
  for (const auto& r : records) {
    if (!campaign_users.count(r.user_id)) continue;
    members.insert(r.user_id);
    if (!r.is_retweet || !r.retweeted_user_id) continue;
    const std::string& target = *r.retweeted_user_id;
    if (!campaign_users.count(target)) continue;
    members.insert(target);
    if (target == r.user_id) continue;
    auto key = r.user_id < target ? std::pair{r.user_id, target} : std::pair{target, r.user_id};
    counts[key] += 1.0;
  }
  WeightedGraph graph(std::vector<std::string>(members.begin(), members.end()));
  for (const auto& [pair, w] : counts) {
    graph.add_weight(*graph.index_of(pair.first), *graph.index_of(pair.second), w);
  }
  return graph;
}

}  // namespace tweetdyn

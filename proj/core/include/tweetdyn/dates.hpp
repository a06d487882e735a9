#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tweetdyn {

/// Base exception for every contract violation raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Day = std::chrono::sys_days;
using Timestamp = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DD[( |T)HH:MM[:SS]][Z|+00:00]`. Timestamps are UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Strict `YYYY-MM-DD` parser; throws Error on anything else.
Day parse_date(std::string_view text);

std::string format_date(Day day);
std::string format_timestamp(Timestamp ts);

/// UTC calendar day containing `ts`.
inline Day day_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

/// Closed interval of calendar days [start, end].
class DateWindow {
 public:
  DateWindow(Day start, Day end);

  static DateWindow parse(std::string_view start, std::string_view end);

  Day start() const { return start_; }
  Day end() const { return end_; }

  /// Number of days, both endpoints included.
  std::int64_t days() const { return (end_ - start_).count() + 1; }
  bool contains(Day d) const { return d >= start_ && d <= end_; }
  /// Day offset relative to start (may be negative or past the end).
  std::int64_t offset(Day d) const { return (d - start_).count(); }
  Day day_at(std::int64_t offset) const { return start_ + std::chrono::days{offset}; }

  bool operator==(const DateWindow&) const = default;

 private:
  Day start_;
  Day end_;
};

}  // namespace tweetdyn

#include "tweetdyn/dates.hpp"

#include <charconv>

#include <fmt/format.h>

namespace tweetdyn {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc{} && ptr == text.data() + pos + width;
}

std::optional<Day> read_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, m) || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Day{ymd};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

  auto date = read_date(text);
  if (!date) return std::nullopt;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return Timestamp{*date};

  if (rest.front() != ' ' && rest.front() != 'T') return std::nullopt;
  rest.remove_prefix(1);
  int hh = 0, mm = 0, ss = 0;
  if (!read_int(rest, 0, 2, hh) || rest.size() < 5 || rest[2] != ':' || !read_int(rest, 3, 2, mm)) {
    return std::nullopt;
  }
  rest.remove_prefix(5);
  if (!rest.empty() && rest.front() == ':') {
    if (!read_int(rest, 1, 2, ss)) return std::nullopt;
    rest.remove_prefix(3);
    // fractional seconds are truncated
    if (!rest.empty() && rest.front() == '.') {
      rest.remove_prefix(1);
      while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') rest.remove_prefix(1);
    }
  }
  if (rest == "Z" || rest == "+00:00" || rest == "+0000") rest = {};
  if (!rest.empty()) return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;

  return Timestamp{*date} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
         std::chrono::seconds{ss};
}

Day parse_date(std::string_view text) {
  auto date = text.size() == 10 ? read_date(text) : std::nullopt;
  if (!date) throw Error(fmt::format("invalid date '{}', expected YYYY-MM-DD", text));
  return *date;
}

std::string format_date(Day day) {
  std::chrono::year_month_day ymd{day};
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()),
                     static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
}

std::string format_timestamp(Timestamp ts) {
  const Day day = day_of(ts);
  const auto secs = (ts - Timestamp{day}).count();
  return fmt::format("{} {:02d}:{:02d}:{:02d}", format_date(day), secs / 3600, (secs / 60) % 60,
                     secs % 60);
}

DateWindow::DateWindow(Day start, Day end) : start_(start), end_(end) {
  if (end_ < start_) {
    throw Error(fmt::format("window end {} precedes start {}", format_date(end_),
                            format_date(start_)));
  }
}

DateWindow DateWindow::parse(std::string_view start, std::string_view end) {
  return DateWindow(parse_date(start), parse_date(end));
}

}  // namespace tweetdyn

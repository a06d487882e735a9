#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tweetdyn/dates.hpp"
#include "tweetdyn/ingest.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

/// Daily tweet counts over a window; values[t] is day `window.start() + t`.
/// Absent `user_id` means an aggregate over all records.
struct CountSeries {
  std::optional<std::string> user_id;
  DateWindow window;
  std::vector<std::int64_t> values;

  std::int64_t total() const;
};

CountSeries daily_counts(std::span<const TweetRecord> records, std::optional<std::string_view> user,
                         const DateWindow& window);

/// One series per requested user, in a single pass over `records`.
std::map<std::string, CountSeries> daily_counts_by_user(std::span<const TweetRecord> records,
                                                        std::span<const std::string> users,
                                                        const DateWindow& window);

/// Running total S(t) = sum of counts on days 0..t.
std::vector<double> accumulate(const CountSeries& series);
std::vector<double> accumulate(std::span<const double> values);

/// First difference with d[0] = s[0]; the inverse of `accumulate`.
std::vector<double> difference(std::span<const double> values);

/// OLS fit S(t) ~ intercept + slope * (t - anchor).
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::int64_t anchor = 0;
  std::int64_t first = 0;  // fitted range, inclusive
  std::int64_t last = 0;
  double se_intercept = 0.0;
  double se_slope = 0.0;
  double ci_multiplier = 5.0;
  double r2 = 0.0;
  double r2_adj = 0.0;
  std::size_t n = 0;

  std::pair<double, double> slope_interval() const {
    return {slope - ci_multiplier * se_slope, slope + ci_multiplier * se_slope};
  }
  std::pair<double, double> intercept_interval() const {
    return {intercept - ci_multiplier * se_intercept, intercept + ci_multiplier * se_intercept};
  }
  Json to_json() const;
};

/// Fits `series[first..last]` (inclusive day offsets) against t - anchor.
/// Needs at least three points.
LinearFit fit_segment(std::span<const double> series, std::int64_t first, std::int64_t last,
                      std::int64_t anchor, double ci_multiplier = 5.0);

struct ChangepointReport {
  bool significant = false;
  double sigma = 5.0;
  std::pair<double, double> interval1;
  std::pair<double, double> interval2;
  /// Distance between the intervals; negative when they overlap.
  double gap = 0.0;
  Json to_json() const;
};

/// True iff the slope intervals slope +- sigma * se of the two fits are disjoint.
ChangepointReport changepoint_significant(const LinearFit& fit1, const LinearFit& fit2,
                                          double sigma = 5.0);

/// Detrended oscillator: value at day t is count[t] minus the mean of the
/// `ma_window` preceding days. The first `ma_window` days have no complete
/// history and are dropped, so `values[i]` is day `ma_window + i` of the input.
struct OscillatorSeries {
  std::optional<std::string> user_id;
  DateWindow window;  // days covered by `values`
  std::vector<double> values;
  int ma_window = 7;
};

OscillatorSeries detrend(const CountSeries& series, int ma_window = 7);

/// `day_offset,value` rows.
void write_series_csv(std::ostream& out, std::span<const double> values);
void write_series_csv(std::ostream& out, const CountSeries& series);
/// Reads a `day_offset,value` CSV; offsets must run 0, 1, 2, ...
std::vector<double> read_series_csv(std::istream& in);

}  // namespace tweetdyn

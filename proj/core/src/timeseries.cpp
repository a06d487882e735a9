#include "tweetdyn/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

#include "tweetdyn/csv.hpp"

namespace tweetdyn {

std::int64_t CountSeries::total() const {
  return std::accumulate(values.begin(), values.end(), std::int64_t{0});
}

CountSeries daily_counts(std::span<const TweetRecord> records, std::optional<std::string_view> user,
                         const DateWindow& window) {
  CountSeries series{user ? std::optional<std::string>(std::string(*user)) : std::nullopt, window,
                     std::vector<std::int64_t>(static_cast<std::size_t>(window.days()), 0)};
  for (const auto& r : records) {
    if (user && r.user_id != *user) continue;
    const Day day = day_of(r.timestamp);
    if (!window.contains(day)) continue;
    ++series.values[static_cast<std::size_t>(window.offset(day))];
  }
  return series;
}

std::map<std::string, CountSeries> daily_counts_by_user(std::span<const TweetRecord> records,
                                                        std::span<const std::string> users,
                                                        const DateWindow& window) {
  std::map<std::string, CountSeries> out;
  std::unordered_map<std::string_view, std::vector<std::int64_t>*> slot;
  for (const auto& u : users) {
    auto [it, inserted] = out.try_emplace(
        u, CountSeries{u, window, std::vector<std::int64_t>(static_cast<std::size_t>(window.days()), 0)});
    slot.emplace(it->first, &it->second.values);
  }
  for (const auto& r : records) {
    auto it = slot.find(r.user_id);
    if (it == slot.end()) continue;
    const Day day = day_of(r.timestamp);
    if (!window.contains(day)) continue;
    ++(*it->second)[static_cast<std::size_t>(window.offset(day))];
  }
  return out;
}

std::vector<double> accumulate(std::span<const double> values) {
  std::vector<double> out(values.size());
  double running = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    running += values[t];
    out[t] = running;
  }
  return out;
}

std::vector<double> accumulate(const CountSeries& series) {
  std::vector<double> out(series.values.size());
  std::int64_t running = 0;
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    running += series.values[t];
    out[t] = static_cast<double>(running);
  }
  return out;
}

std::vector<double> difference(std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    out[t] = t == 0 ? values[0] : values[t] - values[t - 1];
  }
  return out;
}

Json LinearFit::to_json() const {
  const auto [s_lo, s_hi] = slope_interval();
  const auto [i_lo, i_hi] = intercept_interval();
  return Json{{"intercept", round_sig(intercept)},
              {"slope", round_sig(slope)},
              {"anchor", anchor},
              {"first", first},
              {"last", last},
              {"n", n},
              {"se_intercept", round_sig(se_intercept)},
              {"se_slope", round_sig(se_slope)},
              {"ci_multiplier", ci_multiplier},
              {"intercept_interval", {round_sig(i_lo), round_sig(i_hi)}},
              {"slope_interval", {round_sig(s_lo), round_sig(s_hi)}},
              {"r2", round_sig(r2)},
              {"r2_adj", round_sig(r2_adj)}};
}

LinearFit fit_segment(std::span<const double> series, std::int64_t first, std::int64_t last,
                      std::int64_t anchor, double ci_multiplier) {
  if (first < 0 || last < first || static_cast<std::size_t>(last) >= series.size()) {
    throw Error(fmt::format("segment [{}, {}] lies outside series of length {}", first, last,
                            series.size()));
  }
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  if (n < 3) throw Error(fmt::format("segment [{}, {}] has {} points; need at least 3", first, last, n));
  if (!(ci_multiplier >= 0.0)) throw Error("ci_multiplier must be >= 0");

  // Centre x and y before accumulating to keep the normal equations well conditioned.
  double x_mean = 0.0, y_mean = 0.0;
  for (std::int64_t t = first; t <= last; ++t) {
    x_mean += static_cast<double>(t - anchor);
    y_mean += series[static_cast<std::size_t>(t)];
  }
  x_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::int64_t t = first; t <= last; ++t) {
    const double dx = static_cast<double>(t - anchor) - x_mean;
    const double dy = series[static_cast<std::size_t>(t)] - y_mean;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) throw Error("degenerate segment: constant regressor");

  LinearFit fit;
  fit.anchor = anchor;
  fit.first = first;
  fit.last = last;
  fit.n = n;
  fit.ci_multiplier = ci_multiplier;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;

  double rss = 0.0;
  for (std::int64_t t = first; t <= last; ++t) {
    const double r = series[static_cast<std::size_t>(t)] -
                     (fit.intercept + fit.slope * static_cast<double>(t - anchor));
    rss += r * r;
  }
  const double dof = static_cast<double>(n) - 2.0;
  const double sigma2 = rss / dof;
  fit.se_slope = std::sqrt(sigma2 / sxx);
  fit.se_intercept = std::sqrt(sigma2 * (1.0 / static_cast<double>(n) + x_mean * x_mean / sxx));
  fit.r2 = syy > 0.0 ? 1.0 - rss / syy : 1.0;
  fit.r2 = std::clamp(fit.r2, 0.0, 1.0);
  fit.r2_adj = 1.0 - (1.0 - fit.r2) * (static_cast<double>(n) - 1.0) / dof;
  return fit;
}

Json ChangepointReport::to_json() const {
  return Json{{"significant", significant},
              {"sigma", sigma},
              {"slope_interval_1", {round_sig(interval1.first), round_sig(interval1.second)}},
              {"slope_interval_2", {round_sig(interval2.first), round_sig(interval2.second)}},
              {"gap", round_sig(gap)}};
}

ChangepointReport changepoint_significant(const LinearFit& fit1, const LinearFit& fit2, double sigma) {
  if (!(sigma >= 0.0)) throw Error("sigma must be >= 0");
  ChangepointReport report;
  report.sigma = sigma;
  report.interval1 = {fit1.slope - sigma * fit1.se_slope, fit1.slope + sigma * fit1.se_slope};
  report.interval2 = {fit2.slope - sigma * fit2.se_slope, fit2.slope + sigma * fit2.se_slope};
  report.gap = std::max(report.interval1.first, report.interval2.first) -
               std::min(report.interval1.second, report.interval2.second);
  report.significant = report.gap > 0.0;
  return report;
}

OscillatorSeries detrend(const CountSeries& series, int ma_window) {
  if (ma_window < 1) throw Error("moving-average window must be >= 1");
  const std::size_t w = static_cast<std::size_t>(ma_window);
  const std::size_t n = series.values.size();
  if (n <= w) {
    throw Error(fmt::format("series of length {} is too short for a {}-day moving average", n, w));
  }
  OscillatorSeries out{series.user_id,
                       DateWindow(series.window.day_at(ma_window), series.window.end()),
                       std::vector<double>(n - w), ma_window};
  // integer window sums are exact, so shift-equivariance holds bit for bit
  std::int64_t window_sum = 0;
  for (std::size_t t = 0; t < w; ++t) window_sum += series.values[t];
  for (std::size_t t = w; t < n; ++t) {
    out.values[t - w] = static_cast<double>(series.values[t]) -
                        static_cast<double>(window_sum) / static_cast<double>(w);
    window_sum += series.values[t] - series.values[t - w];
  }
  return out;
}

void write_series_csv(std::ostream& out, std::span<const double> values) {
  out << "day_offset,value\n";
  for (std::size_t t = 0; t < values.size(); ++t) out << t << ',' << format_real(values[t]) << '\n';
}

void write_series_csv(std::ostream& out, const CountSeries& series) {
  out << "day_offset,value\n";
  for (std::size_t t = 0; t < series.values.size(); ++t) out << t << ',' << series.values[t] << '\n';
}

std::vector<double> read_series_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row.size() != 2 || row[0] != "day_offset") {
    throw Error("series CSV must start with header 'day_offset,value'");
  }
  std::vector<double> values;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 2) throw Error(fmt::format("series CSV line {}: expected 2 fields", reader.record_line()));
    try {
      const long long offset = std::stoll(row[0]);
      if (offset != static_cast<long long>(values.size())) {
        throw Error(fmt::format("series CSV line {}: expected day_offset {}, found {}",
                                reader.record_line(), values.size(), offset));
      }
      values.push_back(std::stod(row[1]));
    } catch (const std::logic_error&) {
      throw Error(fmt::format("series CSV line {}: not a number", reader.record_line()));
    }
  }
  return values;
}

}  // namespace tweetdyn

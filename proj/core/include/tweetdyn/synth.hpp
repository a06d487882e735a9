#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweetdyn/dates.hpp"
#include "tweetdyn/ingest.hpp"
#include "tweetdyn/json_util.hpp"
#include "tweetdyn/timeseries.hpp"

namespace tweetdyn {

struct FrequencyComponent {
  double omega = 0.0;  // radians per day
  double amplitude_min = 0.0;
  double amplitude_max = 0.0;

  static FrequencyComponent with_period(double days, double amplitude_min, double amplitude_max);
};

/// Baseline mu from `start_day` (offset into the window) until the next segment.
struct DriftSegment {
  std::int64_t start_day = 0;
  double mu = 0.0;
};

/// A group of accounts sharing frequencies:
///   count(t) = round(max(0, mu(t) + sum_j A_j cos(omega_j t + phi_j) + noise))
/// with per-member phases uniform on [0, 2 pi), amplitudes uniform on the
/// component's range and Gaussian noise.
struct GroupSpec {
  std::string group_id;
  std::vector<FrequencyComponent> components;
  std::vector<DriftSegment> drift{{0, 10.0}};
  double noise_sigma = 0.0;
  std::size_t members = 10;

  void validate() const;
  double baseline(std::int64_t t) const;
};

struct SyntheticSeries {
  std::map<std::string, CountSeries> series;  // by opaque user id
  std::map<std::string, std::string> labels;  // user id -> group id

  Json labels_json() const;
};

/// Draws every group in order from one seeded stream. The window must span
/// at least 30 days.
SyntheticSeries generate_series(std::span<const GroupSpec> groups, const DateWindow& window,
                                std::uint64_t seed);
SyntheticSeries generate_series(const GroupSpec& group, const DateWindow& window, std::uint64_t seed);

/// Poisson daily totals at `rate_before` on days [0, t_change) and
/// `rate_after` on [t_change, n_days), starting at `start`.
CountSeries generate_changepoint_aggregate(double rate_before, double rate_after, std::int64_t t_change,
                                           std::int64_t n_days, std::uint64_t seed,
                                           Day start = parse_date("2015-01-01"));

/// (original, spreading, amplifying) shares; must lie on the simplex.
using StrategyMix = std::array<double, 3>;

struct CorpusGroup {
  std::string group_id;
  std::vector<std::string> vocabulary;
  std::vector<double> weights;  // empty means uniform
  std::size_t members = 10;
  double tweets_per_day = 2.0;   // Poisson mean per user-day
  /// When set, each member's daily tweet counts follow this model instead
  /// (its `members` field is ignored).
  std::optional<GroupSpec> activity;
  std::size_t words_per_tweet = 8;
  StrategyMix mix_before{1.0, 0.0, 0.0};
  StrategyMix mix_after{1.0, 0.0, 0.0};
};

struct CorpusSpec {
  std::vector<CorpusGroup> groups;
  std::vector<std::string> noise_vocabulary;
  /// Probability that a token is drawn from the noise vocabulary.
  double noise_weight = 0.0;
  /// Window offset at which groups switch from `mix_before` to `mix_after`.
  std::optional<std::int64_t> changepoint_day;
  /// Accounts outside the campaign that amplifying tweets retweet.
  std::size_t outsiders = 20;
  std::string language = "en";

  void validate() const;
};

struct SyntheticCorpus {
  std::vector<TweetRecord> records;  // sorted by time, then tweet id
  std::map<std::string, std::string> labels;  // user id -> group id
  /// Tokens written into each user's tweets.
  std::map<std::string, std::map<std::string, std::int64_t>> emitted;

  Json labels_json() const;
};

SyntheticCorpus generate_corpus(const CorpusSpec& spec, const DateWindow& window, std::uint64_t seed);

}  // namespace tweetdyn

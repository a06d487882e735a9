#include "tweetdyn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <fmt/format.h>

namespace tweetdyn {
namespace {

using Rng = boost::random::mt19937_64;

std::string fresh_id(Rng& rng, std::string_view prefix, std::set<std::string>& taken) {
  for (;;) {
    std::string id = fmt::format("{}{:012x}", prefix, rng() >> 16);
    if (taken.insert(id).second) return id;
  }
}

void check_mix(const StrategyMix& mix, std::string_view what) {
  double sum = 0.0;
  for (double p : mix) {
    if (!(p >= 0.0)) throw Error(fmt::format("{} has a negative share", what));
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(fmt::format("{} sums to {}, not 1", what, sum));
}

std::int64_t poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  boost::random::poisson_distribution<std::int64_t, double> dist(mean);
  return dist(rng);
}

std::vector<std::int64_t> draw_activity(const GroupSpec& g, std::int64_t n, Rng& rng) {
  boost::random::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::vector<double> amplitude, phase;
  for (const auto& c : g.components) {
    boost::random::uniform_real_distribution<double> amp(c.amplitude_min, c.amplitude_max);
    amplitude.push_back(c.amplitude_min == c.amplitude_max ? c.amplitude_min : amp(rng));
    phase.push_back(phase_dist(rng));
  }
  boost::random::normal_distribution<double> noise(0.0, g.noise_sigma > 0.0 ? g.noise_sigma : 1.0);
  std::vector<std::int64_t> values(static_cast<std::size_t>(n));
  for (std::int64_t t = 0; t < n; ++t) {
    double v = g.baseline(t);
    for (std::size_t j = 0; j < g.components.size(); ++j) {
      v += amplitude[j] * std::cos(g.components[j].omega * static_cast<double>(t) + phase[j]);
    }
    if (g.noise_sigma > 0.0) v += noise(rng);
    values[static_cast<std::size_t>(t)] = v <= 0.0 ? 0 : std::llround(v);
  }
  return values;
}

}  // namespace

FrequencyComponent FrequencyComponent::with_period(double days, double amplitude_min, double amplitude_max) {
  if (!(days > 0.0)) throw Error("period must be positive");
  return {2.0 * std::numbers::pi / days, amplitude_min, amplitude_max};
}

void GroupSpec::validate() const {
  if (drift.empty() || drift.front().start_day != 0) throw Error(fmt::format("group '{}': drift must start at day 0", group_id));
  for (std::size_t i = 0; i < drift.size(); ++i) {
    if (!(drift[i].mu >= 0.0)) throw Error(fmt::format("group '{}': baseline must be >= 0", group_id));
    if (i > 0 && drift[i].start_day <= drift[i - 1].start_day) {
      throw Error(fmt::format("group '{}': drift segments must start on increasing days", group_id));
    }
  }
  for (const auto& c : components) {
    if (!(c.amplitude_min >= 0.0 && c.amplitude_max >= c.amplitude_min)) {
      throw Error(fmt::format("group '{}': amplitude range must satisfy 0 <= min <= max", group_id));
    }
  }
  if (!(noise_sigma >= 0.0)) throw Error(fmt::format("group '{}': noise sigma must be >= 0", group_id));
}

double GroupSpec::baseline(std::int64_t t) const {
  double mu = drift.front().mu;
  for (const auto& seg : drift) {
    if (seg.start_day <= t) mu = seg.mu;
  }
  return mu;
}

Json SyntheticSeries::labels_json() const {
  Json out = Json::object();
  for (const auto& [user, group] : labels) out[user] = group;
  return Json{{"labels", std::move(out)}};
}

SyntheticSeries generate_series(std::span<const GroupSpec> groups, const DateWindow& window,
                                std::uint64_t seed) {
  const std::int64_t n = window.days();
  if (n < 30) throw Error(fmt::format("synthetic series need at least 30 days, got {}", n));
  Rng rng(seed);
  std::set<std::string> taken;
  SyntheticSeries out;
  for (const auto& g : groups) {
    g.validate();
    for (std::size_t m = 0; m < g.members; ++m) {
      const std::string id = fresh_id(rng, "u", taken);
      CountSeries s{id, window, draw_activity(g, n, rng)};
      out.labels.emplace(id, g.group_id);
      out.series.emplace(id, std::move(s));
    }
  }
  return out;
}

SyntheticSeries generate_series(const GroupSpec& group, const DateWindow& window, std::uint64_t seed) {
  return generate_series(std::span<const GroupSpec>(&group, 1), window, seed);
}

CountSeries generate_changepoint_aggregate(double rate_before, double rate_after, std::int64_t t_change,
                                           std::int64_t n_days, std::uint64_t seed, Day start) {
  if (!(rate_before > 0.0 && rate_after > 0.0)) throw Error("rates must be positive");
  if (!(t_change > 0 && t_change < n_days)) {
    throw Error(fmt::format("change day {} must lie strictly inside [0, {})", t_change, n_days));
  }
  Rng rng(seed);
  CountSeries s{std::nullopt, DateWindow(start, start + std::chrono::days(n_days - 1)),
                std::vector<std::int64_t>(static_cast<std::size_t>(n_days))};
  for (std::int64_t t = 0; t < n_days; ++t) {
    s.values[static_cast<std::size_t>(t)] = poisson(rng, t < t_change ? rate_before : rate_after);
  }
  return s;
}

void CorpusSpec::validate() const {
  if (groups.empty()) throw Error("corpus needs at least one group");
  if (!(noise_weight >= 0.0 && noise_weight <= 1.0)) throw Error("noise_weight must lie in [0, 1]");
  if (noise_weight > 0.0 && noise_vocabulary.empty()) throw Error("noise_weight > 0 needs a noise vocabulary");
  for (const auto& g : groups) {
    if (g.vocabulary.empty()) throw Error(fmt::format("group '{}' has an empty vocabulary", g.group_id));
    if (!g.weights.empty() && g.weights.size() != g.vocabulary.size()) {
      throw Error(fmt::format("group '{}': one weight per vocabulary word required", g.group_id));
    }
    if (!(g.tweets_per_day >= 0.0)) throw Error(fmt::format("group '{}': tweets_per_day must be >= 0", g.group_id));
    if (g.activity) g.activity->validate();
    check_mix(g.mix_before, fmt::format("group '{}' mix_before", g.group_id));
    check_mix(g.mix_after, fmt::format("group '{}' mix_after", g.group_id));
  }
}

Json SyntheticCorpus::labels_json() const {
  Json out = Json::object();
  for (const auto& [user, group] : labels) out[user] = group;
  return Json{{"labels", std::move(out)}};
}

SyntheticCorpus generate_corpus(const CorpusSpec& spec, const DateWindow& window, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  std::set<std::string> taken;

  struct Member {
    std::string id;
    std::size_t group;
  };
  std::vector<Member> members;
  for (std::size_t g = 0; g < spec.groups.size(); ++g) {
    for (std::size_t m = 0; m < spec.groups[g].members; ++m) members.push_back({fresh_id(rng, "u", taken), g});
  }
  std::vector<std::string> outsiders;
  for (std::size_t i = 0; i < spec.outsiders; ++i) outsiders.push_back(fresh_id(rng, "x", taken));

  std::vector<boost::random::discrete_distribution<std::size_t, double>> word_dist;
  for (const auto& g : spec.groups) {
    if (g.weights.empty()) {
      word_dist.emplace_back(std::vector<double>(g.vocabulary.size(), 1.0));
    } else {
      word_dist.emplace_back(g.weights);
    }
  }
  boost::random::uniform_01<double> unit;
  boost::random::uniform_int_distribution<std::int64_t> second_of_day(0, 86399);

  SyntheticCorpus out;
  std::uint64_t tweet_counter = 0;
  for (const auto& m : members) out.labels.emplace(m.id, spec.groups[m.group].group_id);
  std::vector<std::vector<std::int64_t>> activity(members.size());
  for (std::size_t who = 0; who < members.size(); ++who) {
    const auto& g = spec.groups[members[who].group];
    if (g.activity) activity[who] = draw_activity(*g.activity, window.days(), rng);
  }

  for (std::int64_t t = 0; t < window.days(); ++t) {
    const bool after = spec.changepoint_day && t >= *spec.changepoint_day;
    for (std::size_t who = 0; who < members.size(); ++who) {
      const auto& m = members[who];
      const auto& g = spec.groups[m.group];
      const std::int64_t tweets = g.activity ? activity[who][static_cast<std::size_t>(t)]
                                             : poisson(rng, g.tweets_per_day);
      const StrategyMix& mix = after ? g.mix_after : g.mix_before;
      boost::random::discrete_distribution<std::size_t, double> category(mix.begin(), mix.end());
      auto& emitted = out.emitted[m.id];
      for (std::int64_t k = 0; k < tweets; ++k) {
        TweetRecord r;
        r.tweet_id = fmt::format("{:016x}", (seed << 32) ^ ++tweet_counter);
        r.user_id = m.id;
        r.timestamp = window.day_at(t) + std::chrono::seconds(second_of_day(rng));
        r.language = spec.language;
        switch (category(rng)) {
          case 0:
            break;
          case 1: {
            r.is_retweet = true;
            if (members.size() < 2) throw Error("spreading tweets need at least two campaign accounts");
            boost::random::uniform_int_distribution<std::size_t> pick(0, members.size() - 2);
            std::size_t target = pick(rng);
            if (target >= who) ++target;
            r.retweeted_user_id = members[target].id;
            break;
          }
          default: {
            if (outsiders.empty()) throw Error("amplifying tweets need outsider accounts");
            boost::random::uniform_int_distribution<std::size_t> pick(0, outsiders.size() - 1);
            r.is_retweet = true;
            r.retweeted_user_id = outsiders[pick(rng)];
            break;
          }
        }
        for (std::size_t w = 0; w < g.words_per_tweet; ++w) {
          const std::string* word;
          if (spec.noise_weight > 0.0 && unit(rng) < spec.noise_weight) {
            boost::random::uniform_int_distribution<std::size_t> pick(0, spec.noise_vocabulary.size() - 1);
            word = &spec.noise_vocabulary[pick(rng)];
          } else {
            word = &g.vocabulary[word_dist[m.group](rng)];
          }
          if (!r.text.empty()) r.text.push_back(' ');
          r.text += *word;
          ++emitted[*word];
        }
        out.records.push_back(std::move(r));
      }
    }
  }
  std::sort(out.records.begin(), out.records.end(), [](const TweetRecord& a, const TweetRecord& b) {
    return std::tie(a.timestamp, a.tweet_id) < std::tie(b.timestamp, b.tweet_id);
  });
  return out;
}

}  // namespace tweetdyn

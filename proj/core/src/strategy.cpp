#include "tweetdyn/strategy.hpp"

#include <algorithm>
#include <unordered_map>

#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

namespace tweetdyn {

StrategyPoint strategy_vector(const CategoryCounts& counts, std::int64_t t) {
  if (counts[0] < 0 || counts[1] < 0 || counts[2] < 0) throw Error("category counts must be >= 0");
  const std::int64_t total = counts[0] + counts[1] + counts[2];
  if (total == 0) throw Error(fmt::format("no tweets on day {}; strategy undefined", t));
  StrategyPoint point{t, {}};
  for (std::size_t j = 0; j < 3; ++j) {
    point.p[j] = static_cast<double>(counts[j]) / static_cast<double>(total);
  }
  return point;
}

char to_char(Symbol s) { return static_cast<char>('A' + static_cast<int>(s)); }

Symbol symbol_from_char(char c) {
  if (c < 'A' || c > 'G') throw Error(fmt::format("'{}' is not a strategy symbol", c));
  return static_cast<Symbol>(c - 'A');
}

void SimplexPartition::validate() const {
  if (!(vertex_threshold > 1.0 / 3.0 && vertex_threshold <= 1.0)) {
    throw Error("vertex_threshold must lie in (1/3, 1]");
  }
  if (!(edge_threshold >= 0.0 && edge_threshold < 1.0 / 3.0)) {
    throw Error("edge_threshold must lie in [0, 1/3)");
  }
}

Symbol symbolize(const StrategyPoint& point, const SimplexPartition& partition) {
  const auto& p = point.p;
  std::size_t hi = 0, lo = 0;
  for (std::size_t j = 1; j < 3; ++j) {
    if (p[j] > p[hi]) hi = j;
    if (p[j] < p[lo]) lo = j;
  }
  if (p[hi] >= partition.vertex_threshold) return static_cast<Symbol>(hi);
  if (p[lo] <= partition.edge_threshold) {
    static constexpr Symbol kOpposite[3] = {Symbol::F, Symbol::D, Symbol::E};
    return kOpposite[lo];
  }
  return Symbol::G;
}

std::vector<CategorySeries> daily_category_counts(std::span<const TweetRecord> records,
                                                  const UserSet& campaign,
                                                  std::span<const std::string> users,
                                                  const DateWindow& window) {
  std::vector<std::string> sorted(users.begin(), users.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<CategorySeries> out;
  out.reserve(sorted.size());
  std::unordered_map<std::string_view, std::size_t> slot;
  for (const auto& u : sorted) {
    out.push_back({u, window, std::vector<CategoryCounts>(static_cast<std::size_t>(window.days()))});
  }
  for (std::size_t i = 0; i < out.size(); ++i) slot.emplace(out[i].user_id, i);

  for (const auto& r : records) {
    auto it = slot.find(r.user_id);
    if (it == slot.end()) continue;
    const Day day = day_of(r.timestamp);
    if (!window.contains(day)) continue;
    auto& cell = out[it->second].days[static_cast<std::size_t>(window.offset(day))];
    ++cell[static_cast<std::size_t>(categorize(r, campaign))];
  }
  return out;
}

std::string symbol_string(const CategorySeries& series, const SimplexPartition& partition) {
  std::string out;
  out.reserve(series.days.size());
  for (std::size_t t = 0; t < series.days.size(); ++t) {
    const auto& c = series.days[t];
    if (c[0] + c[1] + c[2] == 0) {
      out.push_back('-');
    } else {
      out.push_back(to_char(symbolize(strategy_vector(c, static_cast<std::int64_t>(t)), partition)));
    }
  }
  return out;
}

std::int64_t SymbolDistribution::total() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::array<double, kSymbolCount> SymbolDistribution::normalized() const {
  std::array<double, kSymbolCount> out{};
  const std::int64_t n = total();
  if (n == 0) return out;
  for (std::size_t i = 0; i < kSymbolCount; ++i) {
    out[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return out;
}

Json SymbolDistribution::to_json() const {
  Json c = Json::object(), p = Json::object();
  const auto norm = normalized();
  for (std::size_t i = 0; i < kSymbolCount; ++i) {
    const std::string key(1, to_char(static_cast<Symbol>(i)));
    c[key] = counts[i];
    p[key] = round_sig(norm[i]);
  }
  return Json{{"total", total()}, {"counts", std::move(c)}, {"normalized", std::move(p)}};
}

SymbolDistribution symbol_distribution(std::span<const CategorySeries> users, std::int64_t begin,
                                       std::int64_t end, const SimplexPartition& partition) {
  partition.validate();
  if (begin > end) throw Error("symbol_distribution interval has begin > end");
  SymbolDistribution dist;
  for (const auto& series : users) {
    const std::int64_t n = static_cast<std::int64_t>(series.days.size());
    if (begin < 0 || end > n) {
      throw Error(fmt::format("interval [{}, {}) outside the {}-day window of '{}'", begin, end, n,
                              series.user_id));
    }
    for (std::int64_t t = begin; t < end; ++t) {
      const auto& c = series.days[static_cast<std::size_t>(t)];
      if (c[0] + c[1] + c[2] == 0) continue;
      ++dist.counts[static_cast<std::size_t>(symbolize(strategy_vector(c, t), partition))];
    }
  }
  if (dist.total() == 0) throw Error("no active user-days in the requested interval");
  return dist;
}

double ChiSquareResult::p_value() const {
  if (degrees_of_freedom < 1) return 1.0;
  boost::math::chi_squared dist(degrees_of_freedom);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

Json ChiSquareResult::to_json() const {
  std::string guarded;
  for (auto s : guarded_cells) guarded.push_back(to_char(s));
  return Json{{"statistic", round_sig(statistic)},
              {"degrees_of_freedom", degrees_of_freedom},
              {"p_value", round_sig(p_value())},
              {"guarded_cells", guarded},
              {"warnings", warnings}};
}

ChiSquareResult chi_square_shift(const SymbolDistribution& observed,
                                 const std::array<double, kSymbolCount>& reference) {
  double ref_total = 0.0;
  for (double r : reference) {
    if (!(r >= 0.0)) throw Error("reference proportions must be >= 0");
    ref_total += r;
  }
  if (ref_total <= 0.0) throw Error("reference distribution is empty");

  ChiSquareResult result;
  const double n = static_cast<double>(observed.total());
  for (std::size_t i = 0; i < kSymbolCount; ++i) {
    const double o = static_cast<double>(observed.counts[i]);
    double e = n * reference[i] / ref_total;
    if (e == 0.0) {
      if (o == 0.0) continue;
      e = ChiSquareResult::kExpectedFloor;
      result.guarded_cells.push_back(static_cast<Symbol>(i));
      result.warnings.push_back(fmt::format(
          "symbol {} has zero expected count but {} observations; expected floored at {}",
          to_char(static_cast<Symbol>(i)), observed.counts[i], ChiSquareResult::kExpectedFloor));
    }
    result.statistic += (o - e) * (o - e) / e;
  }
  return result;
}

ChiSquareResult chi_square_shift(const SymbolDistribution& observed,
                                 const SymbolDistribution& reference) {
  return chi_square_shift(observed, reference.normalized());
}

double chi_square_critical(int degrees_of_freedom, double confidence) {
  if (degrees_of_freedom < 1) throw Error("degrees of freedom must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw Error("confidence must lie in (0, 1)");
  boost::math::chi_squared dist(degrees_of_freedom);
  return boost::math::quantile(dist, confidence);
}

}  // namespace tweetdyn

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tweetdyn/dates.hpp"
#include "tweetdyn/ingest.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

/// Tweets per category on one day, indexed by TweetCategory
/// (original, spreading, amplifying).
using CategoryCounts = std::array<std::int64_t, 3>;

/// Mixed strategy on the 2-simplex for one active day.
struct StrategyPoint {
  std::int64_t t = 0;
  std::array<double, 3> p{};
};

StrategyPoint strategy_vector(const CategoryCounts& counts, std::int64_t t = 0);

/// Seven-letter alphabet over the simplex.
///
///   A, B, C  vertex regions: original-, spreading-, amplifying-dominant
///   D        edge region opposite spreading   (original / amplifying mix)
///   E        edge region opposite amplifying  (original / spreading mix)
///   F        edge region opposite original    (spreading / amplifying mix)
///   G        centre
enum class Symbol : std::uint8_t { A = 0, B, C, D, E, F, G };
inline constexpr std::size_t kSymbolCount = 7;

char to_char(Symbol s);
Symbol symbol_from_char(char c);

/// Vertex region: largest component >= vertex_threshold. Edge region: smallest
/// component <= edge_threshold. Everything else is the centre. Ties resolve
/// in component order (original, spreading, amplifying).
struct SimplexPartition {
  double vertex_threshold = 2.0 / 3.0;
  double edge_threshold = 1.0 / 6.0;

  void validate() const;
};

Symbol symbolize(const StrategyPoint& point, const SimplexPartition& partition = {});

/// Per-day category tallies for one user.
struct CategorySeries {
  std::string user_id;
  DateWindow window;
  std::vector<CategoryCounts> days;
};

/// One series per user (sorted by id), categorized against `campaign`.
std::vector<CategorySeries> daily_category_counts(std::span<const TweetRecord> records,
                                                  const UserSet& campaign,
                                                  std::span<const std::string> users,
                                                  const DateWindow& window);

/// The user's symbol for every day, '-' on days without tweets.
std::string symbol_string(const CategorySeries& series, const SimplexPartition& partition = {});

struct SymbolDistribution {
  std::array<std::int64_t, kSymbolCount> counts{};

  std::int64_t total() const;
  /// Proportions; all zero when total() == 0.
  std::array<double, kSymbolCount> normalized() const;
  Json to_json() const;
};

/// Pools all active user-days with day offset in [begin, end) and counts symbols.
/// Throws if nothing is active in the interval.
SymbolDistribution symbol_distribution(std::span<const CategorySeries> users, std::int64_t begin,
                                       std::int64_t end, const SimplexPartition& partition = {});

struct ChiSquareResult {
  double statistic = 0.0;
  int degrees_of_freedom = static_cast<int>(kSymbolCount) - 1;
  /// Cells whose expected count was zero while observed was not; their
  /// expected count was floored at `kExpectedFloor`.
  std::vector<Symbol> guarded_cells;
  std::vector<std::string> warnings;

  static constexpr double kExpectedFloor = 0.5;

  double p_value() const;
  Json to_json() const;
};

/// Pearson statistic of `observed` counts against expected counts
/// total(observed) * reference proportion.
ChiSquareResult chi_square_shift(const SymbolDistribution& observed,
                                 const std::array<double, kSymbolCount>& reference);
ChiSquareResult chi_square_shift(const SymbolDistribution& observed,
                                 const SymbolDistribution& reference);

/// Upper critical value of the chi-square distribution, e.g. (6, 0.999) -> 22.458.
double chi_square_critical(int degrees_of_freedom, double confidence);

}  // namespace tweetdyn

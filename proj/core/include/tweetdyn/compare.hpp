#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tweetdyn/json_util.hpp"
#include "tweetdyn/spectral.hpp"

namespace tweetdyn {

/// user -> cluster id. Any integer ids; the cross-tab keeps them as given.
using Partition = std::map<std::string, int>;

struct RowDiversity {
  int support = 0;            // topic clusters with at least one user
  double entropy_bits = 0.0;  // Shannon entropy of the row distribution
  double normalized_entropy = 0.0;  // entropy / log2(number of topic clusters); 0 if a single column
};

struct CrossTab {
  std::vector<int> rows;  // spectral cluster ids, ascending
  std::vector<int> cols;  // topic cluster ids, ascending
  std::vector<std::vector<std::int64_t>> cells;
  std::vector<std::vector<double>> row_shares;
  std::vector<RowDiversity> diversity;
  std::size_t users = 0;  // users present in both partitions
  std::size_t dropped = 0;  // users present in only one

  std::int64_t row_total(std::size_t r) const;
  Json to_json() const;
  void write_csv(std::ostream& out) const;
};

/// Counts users per (spectral, topic) pair over the users both partitions
/// share. Throws if they share none.
CrossTab cross_tab(const Partition& spectral, const Partition& topic);

struct SubclusterSummary {
  std::vector<std::string> users;  // sorted intersection
  std::vector<BandStats> bands;    // empty when `users` is
  std::optional<double> dominant_period;  // of the per-bin median spectrum

  Json to_json() const;
};

/// Intersection of two user sets with the band summary of the members'
/// spectra. Users without a spectrum are an error.
SubclusterSummary intersect_subcluster(std::span<const std::string> a, std::span<const std::string> b,
                                       const std::map<std::string, Spectrum>& spectra);

/// Members of `cluster` in `partition`, sorted.
std::vector<std::string> cluster_members(const Partition& partition, int cluster);

/// Chance-corrected Rand index between two labellings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace tweetdyn

#include "tweetdyn/compare.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace tweetdyn {

std::int64_t CrossTab::row_total(std::size_t r) const {
  std::int64_t sum = 0;
  for (auto c : cells.at(r)) sum += c;
  return sum;
}

Json CrossTab::to_json() const {
  Json out_rows = Json::array();
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Json shares = Json::array();
    for (double s : row_shares[r]) shares.push_back(round_sig(s));
    out_rows.push_back({{"spectral_cluster", rows[r]},
                        {"size", row_total(r)},
                        {"counts", cells[r]},
                        {"shares", std::move(shares)},
                        {"topic_support", diversity[r].support},
                        {"entropy_bits", round_sig(diversity[r].entropy_bits)},
                        {"normalized_entropy", round_sig(diversity[r].normalized_entropy)}});
  }
  return Json{{"users", users}, {"dropped", dropped}, {"topic_clusters", cols}, {"rows", std::move(out_rows)}};
}

void CrossTab::write_csv(std::ostream& out) const {
  out << "spectral_cluster";
  for (int c : cols) out << ",topic_" << c;
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << rows[r];
    for (auto v : cells[r]) out << ',' << v;
    out << '\n';
  }
}

CrossTab cross_tab(const Partition& spectral, const Partition& topic) {
  CrossTab tab;
  std::set<int> row_ids, col_ids;
  for (const auto& [user, s] : spectral) {
    auto it = topic.find(user);
    if (it == topic.end()) continue;
    row_ids.insert(s);
    col_ids.insert(it->second);
    ++tab.users;
  }
  if (tab.users == 0) throw Error("spectral and topic partitions share no users");
  tab.dropped = spectral.size() + topic.size() - 2 * tab.users;
  tab.rows.assign(row_ids.begin(), row_ids.end());
  tab.cols.assign(col_ids.begin(), col_ids.end());
  tab.cells.assign(tab.rows.size(), std::vector<std::int64_t>(tab.cols.size(), 0));
  auto index = [](const std::vector<int>& ids, int id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  for (const auto& [user, s] : spectral) {
    auto it = topic.find(user);
    if (it == topic.end()) continue;
    ++tab.cells[index(tab.rows, s)][index(tab.cols, it->second)];
  }

  const double max_entropy = std::log2(static_cast<double>(tab.cols.size()));
  for (std::size_t r = 0; r < tab.rows.size(); ++r) {
    const double total = static_cast<double>(tab.row_total(r));
    RowDiversity d;
    std::vector<double> shares;
    for (auto c : tab.cells[r]) {
      const double p = static_cast<double>(c) / total;
      shares.push_back(p);
      if (c > 0) {
        ++d.support;
        d.entropy_bits -= p * std::log2(p);
      }
    }
    // -0.0 from a single nonzero cell
    d.entropy_bits = std::max(d.entropy_bits, 0.0);
    d.normalized_entropy = max_entropy > 0.0 ? d.entropy_bits / max_entropy : 0.0;
    tab.row_shares.push_back(std::move(shares));
    tab.diversity.push_back(d);
  }
  return tab;
}

Json SubclusterSummary::to_json() const {
  Json median = Json::array();
  for (const auto& b : bands) median.push_back(round_sig(b.median));
  Json out{{"users", users}, {"median_magnitude", std::move(median)}};
  out["dominant_period"] = dominant_period ? Json(round_sig(*dominant_period)) : Json(nullptr);
  return out;
}

SubclusterSummary intersect_subcluster(std::span<const std::string> a, std::span<const std::string> b,
                                       const std::map<std::string, Spectrum>& spectra) {
  std::vector<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());

  SubclusterSummary out;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(out.users));
  if (out.users.empty()) return out;

  std::vector<Spectrum> members;
  for (const auto& u : out.users) {
    auto it = spectra.find(u);
    if (it == spectra.end()) throw Error(fmt::format("no spectrum for user '{}'", u));
    members.push_back(it->second);
  }
  out.bands = band_summary(members);
  std::vector<double> median(out.bands.size());
  for (std::size_t k = 0; k < median.size(); ++k) median[k] = out.bands[k].median;
  if (std::any_of(median.begin() + 1, median.end(), [](double v) { return v > 0.0; })) {
    out.dominant_period = dominant_period(median, members.front().n_samples);
  }
  return out;
}

std::vector<std::string> cluster_members(const Partition& partition, int cluster) {
  std::vector<std::string> out;
  for (const auto& [user, c] : partition) {
    if (c == cluster) out.push_back(user);
  }
  return out;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("labellings differ in length");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ra, rb;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ra[a[i]] += 1.0;
    rb[b[i]] += 1.0;
  }
  auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : joint) index += pairs(c);
  for (const auto& [key, c] : ra) sum_a += pairs(c);
  for (const auto& [key, c] : rb) sum_b += pairs(c);
  const double expected = sum_a * sum_b / pairs(static_cast<double>(n));
  const double max_index = 0.5 * (sum_a + sum_b);
  // both labellings trivial (all one cluster, or all singletons)
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace tweetdyn

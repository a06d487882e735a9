#include "tweetdyn/community.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "tweetdyn/dates.hpp"

namespace tweetdyn {

std::vector<int> canonical_labels(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = remap.try_emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

double modularity(const WeightedGraph& graph, std::span<const int> labels) {
  if (labels.size() != graph.vertex_count()) {
    throw Error(fmt::format("labelling covers {} vertices; graph has {}", labels.size(),
                            graph.vertex_count()));
  }
  const double total = graph.total_weight();
  if (total <= 0.0) return 0.0;
  std::map<int, double> inside, strength;
  for (std::size_t u = 0; u < graph.vertex_count(); ++u) strength[labels[u]] += graph.strength(u);
  for (const auto& e : graph.edges()) {
    if (labels[e.u] == labels[e.v]) inside[labels[e.u]] += e.weight;
  }
  double q = 0.0;
  for (const auto& [c, s] : strength) {
    const double a = s / (2.0 * total);
    q += inside[c] / total - a * a;
  }
  return q;
}

std::vector<std::vector<std::size_t>> CommunityResult::members() const {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(count));
  for (std::size_t v = 0; v < labels.size(); ++v) out[static_cast<std::size_t>(labels[v])].push_back(v);
  return out;
}

Json CommunityResult::to_json(const WeightedGraph& graph) const {
  Json groups = Json::array();
  for (const auto& m : members()) {
    Json ids = Json::array();
    for (auto v : m) ids.push_back(graph.vertex(v));
    groups.push_back(std::move(ids));
  }
  return Json{{"count", count}, {"modularity", round_sig(modularity)}, {"communities", std::move(groups)}};
}

namespace {

// CNM merging starting from the communities in `label` (values are vertex
// indices naming each community's lowest vertex). Appends Q after every merge.
void greedy_merge(const WeightedGraph& graph, std::vector<int>& label, std::vector<double>& trace) {
  const std::size_t n = graph.vertex_count();
  const double two_m = 2.0 * graph.total_weight();

  // e[i][j]: fraction of edge ends joining communities i and j (each direction)
  // a[i]: fraction of edge ends attached to community i
  std::vector<std::map<std::size_t, double>> e(n);
  std::vector<double> a(n, 0.0);
  double q = 0.0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto cu = static_cast<std::size_t>(label[u]);
    a[cu] += graph.strength(u) / two_m;
    for (const auto& [v, w] : graph.neighbors(u)) {
      const auto cv = static_cast<std::size_t>(label[v]);
      if (cu != cv) {
        e[cu][cv] += w / two_m;
      } else {
        q += w / two_m;
      }
    }
  }
  for (double ai : a) q -= ai * ai;

  using Key = std::tuple<double, std::size_t, std::size_t>;  // (-gain, i, j), i < j
  std::set<Key> queue;
  auto gain = [&](std::size_t i, std::size_t j) { return 2.0 * (e[i].at(j) - a[i] * a[j]); };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [j, value] : e[i]) {
      if (i < j) queue.emplace(-gain(i, j), i, j);
    }
  }
  if (trace.empty()) trace.push_back(q);

  while (!queue.empty()) {
    const auto [neg_gain, i, j] = *queue.begin();
    if (-neg_gain <= 0.0) break;
    q += -neg_gain;

    // merge j into i (i < j keeps the lowest vertex as the community index)
    for (const auto& [k, value] : e[i]) {
      queue.erase({-gain(std::min(i, k), std::max(i, k)), std::min(i, k), std::max(i, k)});
    }
    for (const auto& [k, value] : e[j]) {
      queue.erase({-gain(std::min(j, k), std::max(j, k)), std::min(j, k), std::max(j, k)});
    }
    for (const auto& [k, value] : e[j]) {
      if (k == i) continue;
      e[i][k] += value;
      e[k].erase(j);
      e[k][i] = e[i][k];
    }
    e[i].erase(j);
    e[j].clear();
    a[i] += a[j];
    a[j] = 0.0;
    for (auto& l : label) {
      if (l == static_cast<int>(j)) l = static_cast<int>(i);
    }
    for (const auto& [k, value] : e[i]) {
      const std::size_t lo = std::min(i, k), hi = std::max(i, k);
      queue.emplace(-gain(lo, hi), lo, hi);
    }
    trace.push_back(q);
  }
}

// Single-vertex moves: each vertex in index order joins the neighbouring
// community (or a fresh singleton) with the largest modularity gain. Returns
// true if any vertex moved.
bool refine_by_moves(const WeightedGraph& graph, std::vector<int>& label) {
  const std::size_t n = graph.vertex_count();
  const double m = graph.total_weight();
  std::vector<double> tot(n, 0.0);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    tot[static_cast<std::size_t>(label[v])] += graph.strength(v);
    ++size[static_cast<std::size_t>(label[v])];
  }
  bool moved_any = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t v = 0; v < n; ++v) {
      const auto home = static_cast<std::size_t>(label[v]);
      const double kv = graph.strength(v);
      std::map<std::size_t, double> links;
      for (const auto& [u, w] : graph.neighbors(v)) links[static_cast<std::size_t>(label[u])] += w;
      tot[home] -= kv;
      --size[home];
      // gain of inserting v into community c, up to a common factor 1/m
      auto score = [&](std::size_t c) {
        auto it = links.find(c);
        return (it == links.end() ? 0.0 : it->second) - tot[c] * kv / (2.0 * m);
      };
      std::size_t best = home;
      double best_score = size[home] == 0 ? 0.0 : score(home);
      const double eps = 1e-12 * (1.0 + kv);
      for (const auto& [c, w] : links) {
        if (c != home && score(c) > best_score + eps) {
          best = c;
          best_score = score(c);
        }
      }
      if (size[home] > 0 && 0.0 > best_score + eps) {
        // an empty slot: the smallest index not naming a community
        for (std::size_t c = 0; c < n; ++c) {
          if (size[c] == 0) {
            best = c;
            break;
          }
        }
      }
      tot[best] += kv;
      ++size[best];
      if (best != home) {
        label[v] = static_cast<int>(best);
        moved = true;
        moved_any = true;
      }
    }
  }
  return moved_any;
}

// Kernighan-Lin style pass: up to 128 vertices are moved once each, each time
// taking the best available move even if it lowers Q, and the best partition
// seen along the way is kept. Returns true if Q went up.
bool refine_by_sweep(const WeightedGraph& graph, std::vector<int>& label) {
  const std::size_t n = graph.vertex_count();
  const double m = graph.total_weight();
  std::vector<double> tot(n, 0.0);
  std::vector<std::size_t> size(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    tot[static_cast<std::size_t>(label[v])] += graph.strength(v);
    ++size[static_cast<std::size_t>(label[v])];
  }
  // links[v][c]: weight from v to community c
  std::vector<std::map<std::size_t, double>> links(n);
  auto relink = [&](std::size_t v) {
    links[v].clear();
    for (const auto& [u, w] : graph.neighbors(v)) links[v][static_cast<std::size_t>(label[u])] += w;
  };
  for (std::size_t v = 0; v < n; ++v) relink(v);

  const double start_q = modularity(graph, label);
  double q = start_q, best_q = start_q;
  std::vector<int> best_label = label;
  std::vector<bool> locked(n, false);

  const std::size_t max_steps = std::min<std::size_t>(n, 128);
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::size_t empty = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (size[c] == 0) {
        empty = c;
        break;
      }
    }
    double best_delta = -std::numeric_limits<double>::infinity();
    std::size_t best_v = n, best_c = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (locked[v]) continue;
      const auto home = static_cast<std::size_t>(label[v]);
      const double kv = graph.strength(v);
      auto it = links[v].find(home);
      const double own = it == links[v].end() ? 0.0 : it->second;
      const double leave = -own / m + (tot[home] - kv) * kv / (2.0 * m * m);
      auto consider = [&](std::size_t c, double k_in) {
        const double delta = leave + k_in / m - tot[c] * kv / (2.0 * m * m);
        if (delta > best_delta + 1e-15) {
          best_delta = delta;
          best_v = v;
          best_c = c;
        }
      };
      for (const auto& [c, w] : links[v]) {
        if (c != home) consider(c, w);
      }
      if (size[home] > 1 && empty < n) consider(empty, 0.0);
    }
    if (best_v == n) break;
    const auto home = static_cast<std::size_t>(label[best_v]);
    const double kv = graph.strength(best_v);
    tot[home] -= kv;
    --size[home];
    tot[best_c] += kv;
    ++size[best_c];
    label[best_v] = static_cast<int>(best_c);
    locked[best_v] = true;
    for (const auto& [u, w] : graph.neighbors(best_v)) relink(u);
    q += best_delta;
    if (q > best_q + 1e-12) {
      best_q = q;
      best_label = label;
    }
  }
  label = best_label;
  return best_q > start_q + 1e-12;
}

// Renames every community by its lowest vertex, the form greedy_merge expects.
void name_by_lowest_vertex(std::vector<int>& label) {
  std::map<int, int> lowest;
  for (std::size_t v = 0; v < label.size(); ++v) lowest.try_emplace(label[v], static_cast<int>(v));
  for (auto& l : label) l = lowest.at(l);
}

}  // namespace

CommunityResult modularity_communities(const WeightedGraph& graph) {
  const std::size_t n = graph.vertex_count();
  CommunityResult result;
  std::vector<int> label(n);
  for (std::size_t v = 0; v < n; ++v) label[v] = static_cast<int>(v);

  if (graph.total_weight() <= 0.0) {
    result.labels = label;
    result.count = static_cast<int>(n);
    result.trace.push_back(0.0);
    return result;
  }

  greedy_merge(graph, label, result.trace);
  for (int round = 0; round < 100; ++round) {
    if (!refine_by_moves(graph, label) && !refine_by_sweep(graph, label)) break;
    name_by_lowest_vertex(label);
    result.trace.push_back(modularity(graph, label));
    greedy_merge(graph, label, result.trace);
  }

  result.labels = canonical_labels(label);
  int count = 0;
  for (int l : result.labels) count = std::max(count, l + 1);
  result.count = count;
  result.modularity = modularity(graph, result.labels);
  return result;
}

}  // namespace tweetdyn

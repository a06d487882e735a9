#include "tweetdyn/graph.hpp"

#include <cmath>

#include <fmt/format.h>

#include "tweetdyn/csv.hpp"
#include "tweetdyn/dates.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

WeightedGraph::WeightedGraph(std::vector<std::string> vertices) {
  for (auto& id : vertices) add_vertex(id);
}

std::size_t WeightedGraph::add_vertex(std::string_view id) {
  std::string key(id);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  const std::size_t idx = ids_.size();
  ids_.push_back(key);
  index_.emplace(std::move(key), idx);
  adj_.emplace_back();
  communities_.reset();
  return idx;
}

std::optional<std::size_t> WeightedGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void WeightedGraph::check_pair(std::size_t u, std::size_t v) const {
  if (u >= ids_.size() || v >= ids_.size()) throw Error("edge endpoint out of range");
  if (u == v) throw Error(fmt::format("self-loop on vertex '{}' is not allowed", ids_[u]));
}

void WeightedGraph::add_weight(std::size_t u, std::size_t v, double weight) {
  check_pair(u, v);
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw Error("edge weight must be finite and >= 0");
  if (weight == 0.0) return;
  auto [it, inserted] = adj_[u].try_emplace(v, 0.0);
  it->second += weight;
  adj_[v][u] = it->second;
  if (inserted) ++edge_count_;
}

void WeightedGraph::set_weight(std::size_t u, std::size_t v, double weight) {
  check_pair(u, v);
  if (!(weight >= 0.0) || !std::isfinite(weight)) throw Error("edge weight must be finite and >= 0");
  const bool existed = adj_[u].count(v) != 0;
  if (weight == 0.0) {
    if (existed) {
      adj_[u].erase(v);
      adj_[v].erase(u);
      --edge_count_;
    }
    return;
  }
  adj_[u][v] = weight;
  adj_[v][u] = weight;
  if (!existed) ++edge_count_;
}

double WeightedGraph::weight(std::size_t u, std::size_t v) const {
  if (u >= ids_.size() || v >= ids_.size()) throw Error("vertex index out of range");
  auto it = adj_[u].find(v);
  return it == adj_[u].end() ? 0.0 : it->second;
}

double WeightedGraph::strength(std::size_t u) const {
  double s = 0.0;
  for (const auto& [v, w] : adj_.at(u)) s += w;
  return s;
}

double WeightedGraph::total_weight() const {
  double total = 0.0;
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (auto it = adj_[u].upper_bound(u); it != adj_[u].end(); ++it) total += it->second;
  }
  return total;
}

std::vector<WeightedGraph::Edge> WeightedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < adj_.size(); ++u) {
    for (auto it = adj_[u].upper_bound(u); it != adj_[u].end(); ++it) {
      out.push_back({u, it->first, it->second});
    }
  }
  return out;
}

void WeightedGraph::set_communities(std::vector<int> labels) {
  if (labels.size() != ids_.size()) {
    throw Error(fmt::format("community labelling covers {} of {} vertices", labels.size(),
                            ids_.size()));
  }
  communities_ = std::move(labels);
}

void WeightedGraph::write_edge_list_csv(std::ostream& out) const {
  out << "source,target,weight\n";
  for (const auto& e : edges()) {
    out << csv_escape(ids_[e.u]) << ',' << csv_escape(ids_[e.v]) << ',' << format_real(e.weight)
        << '\n';
  }
}

}  // namespace tweetdyn

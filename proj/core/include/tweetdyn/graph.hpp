#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tweetdyn {

/// Undirected graph with nonnegative edge weights over string-identified
/// vertices. Shared by the retweet network and the user-similarity graph.
///
/// Weights are symmetric by construction, self-loops are rejected, and an
/// optional community labelling must cover every vertex.
class WeightedGraph {
 public:
  struct Edge {
    std::size_t u;
    std::size_t v;
    double weight;
  };

  WeightedGraph() = default;
  explicit WeightedGraph(std::vector<std::string> vertices);

  /// Returns the index of `id`, inserting it if new.
  std::size_t add_vertex(std::string_view id);
  std::optional<std::size_t> index_of(std::string_view id) const;

  /// Accumulates `weight` onto edge {u, v}.
  void add_weight(std::size_t u, std::size_t v, double weight);
  /// Overwrites edge {u, v}; a zero weight removes the edge.
  void set_weight(std::size_t u, std::size_t v, double weight);
  double weight(std::size_t u, std::size_t v) const;

  std::size_t vertex_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& vertices() const { return ids_; }
  const std::string& vertex(std::size_t i) const { return ids_.at(i); }

  /// Neighbours of `u` keyed by vertex index (ascending).
  const std::map<std::size_t, double>& neighbors(std::size_t u) const { return adj_.at(u); }
  /// Sum of incident edge weights.
  double strength(std::size_t u) const;
  /// Sum of all edge weights, each edge counted once.
  double total_weight() const;
  /// Edges with u < v in lexicographic (u, v) order.
  std::vector<Edge> edges() const;

  void set_communities(std::vector<int> labels);
  const std::optional<std::vector<int>>& communities() const { return communities_; }

  void write_edge_list_csv(std::ostream& out) const;

 private:
  void check_pair(std::size_t u, std::size_t v) const;

  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::map<std::size_t, double>> adj_;
  std::size_t edge_count_ = 0;
  std::optional<std::vector<int>> communities_;
};

}  // namespace tweetdyn

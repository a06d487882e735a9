#pragma once

#include <span>
#include <vector>

#include "tweetdyn/graph.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

struct CommunityResult {
  /// Community per vertex, numbered 0.. in order of each community's lowest
  /// vertex index.
  std::vector<int> labels;
  int count = 0;
  /// Recomputed from `labels`, not accumulated.
  double modularity = 0.0;
  /// Q before any merge, then after each accepted merge and each refinement
  /// pass that moved a vertex.
  std::vector<double> trace;

  std::vector<std::vector<std::size_t>> members() const;
  Json to_json(const WeightedGraph& graph) const;
};

/// Weighted Newman modularity of a labelling. Zero for an edgeless graph.
double modularity(const WeightedGraph& graph, std::span<const int> labels);

/// Greedy agglomerative maximization (Clauset-Newman-Moore). At each step the
/// merge with the largest gain is applied; equal gains go to the pair with the
/// smallest community indices, where a community is indexed by its lowest
/// vertex. Once no merge has positive gain, the partition is refined by
/// single-vertex moves (improving moves first, then a Kernighan-Lin style
/// pass that keeps the best intermediate partition) and merging resumes,
/// until nothing improves Q.
CommunityResult modularity_communities(const WeightedGraph& graph);

/// Renumbers arbitrary labels to 0.. by first appearance.
std::vector<int> canonical_labels(std::span<const int> labels);

}  // namespace tweetdyn

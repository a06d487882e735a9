#include <random>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "tweetdyn/community.hpp"

using namespace tweetdyn;

namespace {

WeightedGraph build(int n, const std::vector<oracle::Edge>& edges) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
  WeightedGraph g(ids);
  for (const auto& e : edges) g.add_weight(static_cast<std::size_t>(e.u), static_cast<std::size_t>(e.v), e.w);
  return g;
}

}  // namespace

TEST(Modularity, AgreesWithTextbookDefinition) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::bernoulli_distribution keep(0.4);
  std::uniform_int_distribution<int> lab(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<oracle::Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (keep(rng)) edges.push_back({i, j, w(rng)});
      }
    }
    std::vector<int> labels(n);
    for (auto& l : labels) l = lab(rng);
    EXPECT_NEAR(modularity(build(n, edges), labels), oracle::modularity(n, edges, labels), 1e-12);
  }
}

TEST(Communities, TwoTriangles) {
  const std::vector<oracle::Edge> edges{{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}};
  const auto r = modularity_communities(build(6, edges));
  EXPECT_EQ(r.count, 2);
  EXPECT_NEAR(r.modularity, 0.5, 1e-12);
  EXPECT_EQ(r.labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
  EXPECT_NEAR(oracle::best_modularity(6, edges), 0.5, 1e-12);
}

TEST(Communities, CompleteGraphStaysWhole) {
  std::vector<oracle::Edge> edges;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) edges.push_back({i, j, 1});
  }
  const auto r = modularity_communities(build(4, edges));
  EXPECT_NEAR(oracle::best_modularity(4, edges), 0.0, 1e-12);
  EXPECT_EQ(r.count, 1);
  EXPECT_NEAR(r.modularity, 0.0, 1e-12);
}

TEST(Communities, EdgelessGraphIsSingletons) {
  const auto r = modularity_communities(build(3, {}));
  EXPECT_EQ(r.count, 3);
  EXPECT_EQ(r.modularity, 0.0);
}

TEST(Communities, TraceIsIncreasingAndEndsAtResult) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution keep(0.3);
  std::vector<oracle::Edge> edges;
  for (int i = 0; i < 20; ++i) {
    for (int j = i + 1; j < 20; ++j) {
      if (keep(rng)) edges.push_back({i, j, 1});
    }
  }
  const auto r = modularity_communities(build(20, edges));
  for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_GT(r.trace[i], r.trace[i - 1] - 1e-12);
  EXPECT_NEAR(r.trace.back(), r.modularity, 1e-9);
}

TEST(Communities, LabelsAreCanonical) {
  EXPECT_EQ(canonical_labels(std::vector<int>{5, 5, 2, 9, 2}), (std::vector<int>{0, 0, 1, 2, 1}));
}

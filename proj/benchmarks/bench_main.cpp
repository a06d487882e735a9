#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "tweetdyn/community.hpp"
#include "tweetdyn/spectral.hpp"
#include "tweetdyn/synth.hpp"
#include "tweetdyn/topic.hpp"

using namespace tweetdyn;

namespace {

void BM_Dft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> values(n);
  for (std::size_t t = 0; t < n; ++t) values[t] = 12.0 + 5.0 * std::cos(2.0 * std::numbers::pi * t / 7.0);
  for (auto _ : state) benchmark::DoNotOptimize(dft(values));
}
BENCHMARK(BM_Dft)->Arg(244)->Arg(1096);

void BM_KMedoids(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 1.0);
  Eigen::MatrixXd points(n, 3);
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) {
    ids.push_back(std::to_string(i));
    for (Eigen::Index d = 0; d < 3; ++d) points(i, d) = noise(rng) + 6.0 * static_cast<double>(i % 4 == d);
  }
  for (auto _ : state) benchmark::DoNotOptimize(kmedoids(ids, points));
}
BENCHMARK(BM_KMedoids)->Arg(100)->Arg(400);

WeightedGraph planted_graph(std::size_t n, std::size_t edges, std::size_t block) {
  std::mt19937_64 rng(1);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  WeightedGraph g(ids);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  for (std::size_t e = 0; e < edges; ++e) {
    const std::size_t u = pick(rng);
    std::size_t v = rng() % 4 ? (u / block) * block + rng() % block : pick(rng);
    if (v >= n) v = n - 1;
    if (u != v) g.add_weight(u, v, 1.0);
  }
  return g;
}

void BM_Modularity(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const WeightedGraph g = planted_graph(n, n * 12, 100);
  for (auto _ : state) benchmark::DoNotOptimize(modularity_communities(g));
}
BENCHMARK(BM_Modularity)->Arg(500)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_TopicPipeline(benchmark::State& state) {
  CorpusSpec spec;
  const std::vector<std::vector<std::string>> vocab{
      {"ballot", "senate", "governor", "campaign", "debate", "poll"},
      {"goal", "striker", "league", "match", "keeper", "derby"},
      {"rain", "storm", "forecast", "humid", "breeze", "frost"}};
  for (std::size_t g = 0; g < vocab.size(); ++g) {
    CorpusGroup group;
    group.group_id = "g" + std::to_string(g);
    group.vocabulary = vocab[g];
    group.members = static_cast<std::size_t>(state.range(0));
    spec.groups.push_back(group);
  }
  const DateWindow window(Day{std::chrono::year{2016} / 3 / 1}, Day{std::chrono::year{2016} / 5 / 31});
  const SyntheticCorpus corpus = generate_corpus(spec, window, 11);
  std::vector<std::string> users;
  for (const auto& [user, group] : corpus.labels) users.push_back(user);
  for (auto _ : state) benchmark::DoNotOptimize(run_topic_pipeline(corpus.records, users, window));
}
BENCHMARK(BM_TopicPipeline)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

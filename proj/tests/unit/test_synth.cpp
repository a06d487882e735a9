#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "tweetdyn/spectral.hpp"
#include "tweetdyn/strategy.hpp"
#include "tweetdyn/synth.hpp"

using namespace tweetdyn;

namespace {
const DateWindow kWindow = DateWindow::parse("2016-03-09", "2016-11-07");
}

TEST(Series, NoiselessCosineIsExact) {
  GroupSpec g;
  g.drift = {{0, 20}};
  g.members = 3;
  g.components = {FrequencyComponent{2.0 * std::numbers::pi * 61.0 / 244.0, 5.0, 5.0}};
  const auto s = generate_series(g, kWindow, 1);
  for (const auto& [u, series] : s.series) {
    const auto& v = series.values;
    EXPECT_EQ(v.size(), 244u);
    const auto spec = dft(std::vector<double>(v.begin(), v.end()));
    const auto m = spec.magnitudes();
    EXPECT_EQ(std::max_element(m.begin() + 1, m.end()) - m.begin(), 61);
    for (auto x : v) {
      EXPECT_GE(x, 15);
      EXPECT_LE(x, 25);
    }
  }
}

TEST(Series, NoiseMeanMatchesBaseline) {
  GroupSpec g;
  g.drift = {{0, 30}};
  g.noise_sigma = 4.0;
  g.members = 5;
  const auto s = generate_series(g, kWindow, 2);
  for (const auto& [u, series] : s.series) {
    const double mean = static_cast<double>(series.total()) / 244.0;
    EXPECT_NEAR(mean, 30.0, 4.0 * 4.0 / std::sqrt(244.0));
  }
}

TEST(Series, DeterministicPerSeedAndLabelled) {
  GroupSpec a, b;
  a.group_id = "group_one";
  b.group_id = "group_two";
  a.noise_sigma = b.noise_sigma = 2;
  const std::vector<GroupSpec> groups{a, b};
  const auto s1 = generate_series(groups, kWindow, 5), s2 = generate_series(groups, kWindow, 5);
  EXPECT_EQ(s1.labels, s2.labels);
  for (const auto& [u, s] : s1.series) EXPECT_EQ(s.values, s2.series.at(u).values);
  EXPECT_EQ(s1.labels.size(), 20u);
  for (const auto& [u, g] : s1.labels) EXPECT_EQ(u.find(g), std::string::npos);
  EXPECT_THROW(generate_series(a, DateWindow::parse("2016-01-01", "2016-01-10"), 1), Error);
}

TEST(Series, DriftSegmentsChangeBaseline) {
  GroupSpec g;
  g.drift = {{0, 5}, {100, 50}};
  g.members = 1;
  const auto s = generate_series(g, kWindow, 1);
  const auto& v = s.series.begin()->second.values;
  EXPECT_EQ(v[99], 5);
  EXPECT_EQ(v[100], 50);
  g.drift = {{10, 5}};
  EXPECT_THROW(g.validate(), Error);
}

TEST(Corpus, SingleVocabularyWithoutNoise) {
  CorpusSpec spec;
  CorpusGroup g;
  g.group_id = "g";
  g.vocabulary = {"alpha", "beta"};
  g.members = 4;
  spec.groups = {g};
  const auto c = generate_corpus(spec, DateWindow::parse("2016-01-01", "2016-01-31"), 9);
  ASSERT_FALSE(c.records.empty());
  for (const auto& r : c.records) {
    EXPECT_FALSE(r.is_retweet);
    std::istringstream words(r.text);
    std::string w;
    while (words >> w) EXPECT_TRUE(w == "alpha" || w == "beta") << w;
  }
}

TEST(Corpus, RetweetTargetsFollowStrategy) {
  CorpusSpec spec;
  CorpusGroup g;
  g.group_id = "g";
  g.vocabulary = {"x"};
  g.members = 5;
  g.mix_before = {0.0, 1.0, 0.0};
  g.mix_after = {0.0, 0.0, 1.0};
  spec.groups = {g};
  spec.changepoint_day = 10;
  const auto window = DateWindow::parse("2016-01-01", "2016-01-20");
  const auto c = generate_corpus(spec, window, 4);
  for (const auto& r : c.records) {
    ASSERT_TRUE(r.is_retweet);
    const bool inside = c.labels.contains(*r.retweeted_user_id);
    EXPECT_EQ(inside, window.offset(day_of(r.timestamp)) < 10);
    EXPECT_NE(*r.retweeted_user_id, r.user_id);
  }
}

TEST(Corpus, InvalidSpecsRejected) {
  CorpusSpec spec;
  EXPECT_THROW(spec.validate(), Error);
  CorpusGroup g;
  g.group_id = "g";
  g.vocabulary = {"x"};
  g.mix_before = {0.5, 0.6, 0.0};
  spec.groups = {g};
  EXPECT_THROW(spec.validate(), Error);
}

TEST(Aggregate, SecondSegmentTooShort) {
  const auto s = generate_changepoint_aggregate(10, 20, 98, 100, 1);
  const auto acc = [&] {
    std::vector<double> v;
    double run = 0;
    for (auto x : s.values) v.push_back(run += static_cast<double>(x));
    return v;
  }();
  EXPECT_THROW(fit_segment(acc, 98, 99, 98), Error);
}

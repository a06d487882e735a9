#include <sstream>

#include <gtest/gtest.h>

#include "tweetdyn/ingest.hpp"
#include "tweetdyn/synth.hpp"

using namespace tweetdyn;

namespace {

const char* kHeader = "tweetid,userid,tweet_time,tweet_language,is_retweet,retweet_userid,tweet_text\n";

ParseResult parse_csv_text(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return parse_records(in, InputFormat::Csv);
}

TweetRecord make(std::string id, std::string user, std::string when, std::optional<std::string> rt = {}) {
  TweetRecord r;
  r.tweet_id = std::move(id);
  r.user_id = std::move(user);
  r.timestamp = *parse_timestamp(when);
  r.language = "en";
  r.is_retweet = rt.has_value();
  r.retweeted_user_id = std::move(rt);
  return r;
}

}  // namespace

TEST(Parse, MalformedTimestampIsRejectedAndCounted) {
  const auto result = parse_csv_text(
      "1,a,2016-01-01 10:00,en,false,,hello\n"
      "2,a,2016-13-45 10:00,en,false,,bad\n"
      "3,b,2016-01-02 11:30:15,en,true,a,RT hello\n");
  EXPECT_EQ(result.records.size(), 2u);
  EXPECT_EQ(result.report.rejected, 1u);
  EXPECT_EQ(result.report.rows_read, 3u);
  ASSERT_EQ(result.report.rejections.size(), 1u);
  EXPECT_EQ(result.report.rejections[0].row, 2u);
}

TEST(Parse, HeaderOnlyGivesNoRecords) {
  const auto result = parse_csv_text("");
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.report.rejected, 0u);
}

TEST(Parse, RetweetFieldsMustAgree) {
  const auto result = parse_csv_text(
      "1,a,2016-01-01,en,true,,x\n"
      "2,a,2016-01-01,en,false,b,x\n"
      "3,a,2016-01-01,en,maybe,,x\n");
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(result.report.rejected, 3u);
}

TEST(Parse, MissingRequiredColumnThrows) {
  std::istringstream in("tweetid,userid\n1,a\n");
  EXPECT_THROW(parse_records(in, InputFormat::Csv), Error);
}

TEST(Parse, MissingTextColumnWarns) {
  std::istringstream in("tweetid,userid,tweet_time,tweet_language,is_retweet,retweet_userid\n1,a,2016-01-01,en,false,\n");
  const auto result = parse_records(in, InputFormat::Csv);
  EXPECT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.report.warnings.size(), 1u);
}

TEST(Parse, QuotedFieldsWithCommasAndNewlines) {
  const auto result = parse_csv_text("1,a,2016-01-01,en,false,,\"hello, \"\"world\"\"\nagain\"\n");
  ASSERT_EQ(result.records.size(), 1u);
  EXPECT_EQ(result.records[0].text, "hello, \"world\"\nagain");
}

TEST(Parse, JsonlRoundTripOfSyntheticCorpus) {
  CorpusSpec spec;
  CorpusGroup g;
  g.group_id = "g";
  g.vocabulary = {"alpha", "beta", "gamma"};
  g.members = 25;
  g.tweets_per_day = 4;
  g.mix_before = {0.5, 0.3, 0.2};
  g.mix_after = g.mix_before;
  spec.groups = {g};
  const auto corpus = generate_corpus(spec, DateWindow::parse("2016-01-01", "2016-05-01"), 7);
  ASSERT_GE(corpus.records.size(), 10000u);
  const std::vector<TweetRecord> sample(corpus.records.begin(), corpus.records.begin() + 10000);

  for (auto format : {InputFormat::Jsonl, InputFormat::Csv}) {
    std::stringstream buf;
    write_records(buf, sample, format);
    const auto back = parse_records(buf, format);
    EXPECT_EQ(back.report.rejected, 0u);
    ASSERT_EQ(back.records.size(), sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) ASSERT_EQ(back.records[i], sample[i]) << "row " << i;
  }
}

TEST(Categorize, ThreeStrategies) {
  const UserSet campaign{"a", "b"};
  EXPECT_EQ(categorize(make("1", "a", "2016-01-01"), campaign), TweetCategory::Original);
  EXPECT_EQ(categorize(make("2", "a", "2016-01-01", "b"), campaign), TweetCategory::Spreading);
  EXPECT_EQ(categorize(make("3", "a", "2016-01-01", "z"), campaign), TweetCategory::Amplifying);
}

TEST(Categorize, TallySumsToRecordCount) {
  const std::vector<TweetRecord> records = {make("1", "a", "2016-01-01"), make("2", "a", "2016-01-01", "b"),
                                            make("3", "b", "2016-01-02", "z"), make("4", "b", "2016-01-02", "y")};
  const auto tally = tally_categories(records, campaign_users(records));
  EXPECT_EQ(tally[0], 1u);
  EXPECT_EQ(tally[1], 1u);
  EXPECT_EQ(tally[2], 2u);
}

TEST(Cohort, VolumeThresholdExcludesLightUser) {
  const std::vector<TweetRecord> records = {make("1", "a", "2016-01-01"), make("2", "b", "2016-01-01"),
                                            make("3", "b", "2016-01-02")};
  CohortSpec spec{DateWindow::parse("2016-01-01", "2016-01-02")};
  spec.min_total_tweets = 2;
  const auto sel = select_cohort(records, spec);
  EXPECT_EQ(sel.users, std::vector<std::string>{"b"});
}

TEST(Cohort, ActiveDayFractionKeepsDailyUsers) {
  const DateWindow window = DateWindow::parse("2016-01-01", "2016-04-09");  // 100 days
  std::vector<TweetRecord> records;
  int id = 0;
  for (int u = 0; u < 10; ++u) {
    const bool daily = u < 5;
    for (std::int64_t t = 0; t < window.days(); ++t) {
      if (!daily && t % 10 != 0) continue;
      for (int k = 0; k < 3; ++k) {
        TweetRecord r = make(std::to_string(++id), "u" + std::to_string(u), "2016-01-01");
        r.timestamp = window.day_at(t) + std::chrono::hours(k);
        records.push_back(r);
      }
    }
  }
  CohortSpec spec{window};
  spec.active_day_fraction = 0.6;
  spec.min_total_tweets = 1;
  const auto sel = select_cohort(records, spec);
  EXPECT_EQ(sel.users, (std::vector<std::string>{"u0", "u1", "u2", "u3", "u4"}));
}

TEST(Cohort, VolumeWindowDiffersFromActivityWindow) {
  std::vector<TweetRecord> records = {make("1", "a", "2015-06-01"), make("2", "a", "2015-06-02"),
                                      make("3", "a", "2016-01-01"), make("4", "b", "2016-01-01")};
  CohortSpec spec{DateWindow::parse("2016-01-01", "2016-01-01")};
  spec.volume_window = DateWindow::parse("2015-01-01", "2016-12-31");
  spec.min_total_tweets = 3;
  spec.active_day_fraction = 1.0;
  EXPECT_EQ(select_cohort(records, spec).users, std::vector<std::string>{"a"});
}

TEST(Cohort, LanguageFilterAppliesBeforeCounting) {
  auto r1 = make("1", "a", "2016-01-01");
  auto r2 = make("2", "a", "2016-01-01");
  r2.language = "ru";
  CohortSpec spec{DateWindow::parse("2016-01-01", "2016-01-01")};
  spec.min_total_tweets = 2;
  spec.language = "en";
  EXPECT_TRUE(select_cohort(std::vector<TweetRecord>{r1, r2}, spec).users.empty());
}

TEST(RetweetNetwork, RepeatedRetweetsAccumulate) {
  const std::vector<TweetRecord> records = {make("1", "a", "2016-01-01", "b"), make("2", "a", "2016-01-02", "b"),
                                            make("3", "b", "2016-01-02")};
  const auto g = retweet_network(records, campaign_users(records));
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_DOUBLE_EQ(g.weight(*g.index_of("a"), *g.index_of("b")), 2.0);
}

TEST(RetweetNetwork, NoInternalRetweetsNoEdges) {
  const std::vector<TweetRecord> records = {make("1", "a", "2016-01-01", "z"), make("2", "b", "2016-01-02"),
                                            make("3", "b", "2016-01-02", "b")};
  const auto g = retweet_network(records, campaign_users(records));
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.vertex_count(), 2u);
}

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tweetdyn/porter.hpp"

#ifndef TWEETDYN_TEST_DATA
#error "TWEETDYN_TEST_DATA must point at tests/data"
#endif

TEST(Porter, ClassicCases) {
  EXPECT_EQ(tweetdyn::porter_stem("caresses"), "caress");
  EXPECT_EQ(tweetdyn::porter_stem("ponies"), "poni");
  EXPECT_EQ(tweetdyn::porter_stem("ending"), "end");
  EXPECT_EQ(tweetdyn::porter_stem("ended"), "end");
  EXPECT_EQ(tweetdyn::porter_stem("relational"), "relat");
  EXPECT_EQ(tweetdyn::porter_stem("a"), "a");
  EXPECT_EQ(tweetdyn::porter_stem(""), "");
}

// Reference pairs produced by an independent implementation of the original
// algorithm.
TEST(Porter, ReferenceVectors) {
  std::ifstream in(std::string(TWEETDYN_TEST_DATA) + "/porter_vectors.txt");
  ASSERT_TRUE(in) << "missing porter_vectors.txt";
  std::string line;
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string word, stem;
    fields >> word >> stem;
    EXPECT_EQ(tweetdyn::porter_stem(word), stem) << word;
    ++checked;
  }
  EXPECT_GT(checked, 1000u);
}

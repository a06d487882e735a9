#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "tweetdyn/community.hpp"
#include "tweetdyn/dates.hpp"
#include "tweetdyn/graph.hpp"
#include "tweetdyn/ingest.hpp"
#include "tweetdyn/json_util.hpp"

namespace tweetdyn {

struct TokenizerOptions {
  bool strip_urls = true;
  bool strip_mentions = true;
  /// Keep the body of #hashtags as an ordinary token; false drops them.
  bool keep_hashtags = true;
};

/// Lowercases ASCII and splits on anything that is not [a-z0-9] or a
/// non-ASCII byte, so non-English words survive as single tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

struct Document {
  std::string user_id;
  std::string text;  // the user's tweets in time order, newline separated
  std::vector<std::string> tokens;
};

struct DocumentSet {
  std::vector<Document> documents;  // sorted by user id
  std::vector<std::string> warnings;
};

/// One document per user in `users`, pooling their tweets inside `window`.
/// Users without any tokens keep an empty document and get a warning.
DocumentSet build_documents(std::span<const TweetRecord> records, std::span<const std::string> users,
                            const DateWindow& window, const TokenizerOptions& options = {});

using TermCounts = std::map<std::string, std::int64_t>;
using StopwordSet = std::set<std::string>;

/// Common English words, unstemmed.
std::span<const std::string_view> default_stopwords();
/// Stems of `words`; stopwords are matched by stem.
StopwordSet stem_stopwords(std::span<const std::string_view> words);
StopwordSet stem_stopwords(std::span<const std::string> words);

/// Porter-stems every token and counts the stems not in `stopword_stems`.
TermCounts stem_and_filter(const Document& doc, const StopwordSet& stopword_stems);

struct TermUserMatrix {
  std::vector<std::string> terms;  // sorted
  std::vector<std::string> users;
  Eigen::SparseMatrix<double> counts;      // terms x users, integer valued
  Eigen::SparseMatrix<double> normalized;  // columns scaled to unit norm
  std::vector<std::size_t> zero_columns;   // users with no surviving term

  /// Number of users with a nonzero count per term.
  std::vector<std::size_t> document_frequency() const;
  /// `term,user_id,count` rows.
  void write_triplets_csv(std::ostream& out) const;
};

/// Builds the matrix over the union of terms in `per_user`.
TermUserMatrix build_term_user_matrix(std::span<const std::string> users,
                                      std::span<const TermCounts> per_user);

/// Terms used by strictly more than p * n_users users.
StopwordSet dynamic_stopwords(const TermUserMatrix& matrix, double p = 0.5);

struct GammaFit {
  double k_shape = 0.0;
  double theta_scale = 0.0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance, divisor n - 1
  /// Fewer than two values or zero variance; no distribution was fitted.
  bool degenerate = false;

  double quantile(double q) const;
};

/// Method-of-moments fit: k = mean^2 / var, theta = var / mean.
GammaFit fit_gamma(std::span<const std::int64_t> values);

struct KeywordSelection {
  GammaFit fit;
  double cutoff = 0.0;  // q-quantile, or the mean when the fit is degenerate
  std::set<std::string> keywords;
};

/// Keeps the user's words whose count is >= the q-quantile of a Gamma fitted
/// to the user's word counts. A degenerate fit keeps counts >= the mean.
KeywordSelection gamma_keywords(const TermCounts& counts, double q = 0.9);

struct SimilarityOptions {
  std::size_t k = 10;
  /// Count the zeroed diagonal among the row entries when picking the k-th
  /// largest value.
  bool bound_includes_diagonal = false;
};

struct SimilarityGraph {
  WeightedGraph graph;           // vertices in matrix user order
  Eigen::MatrixXd similarity;    // cosine similarities, zero diagonal
  std::vector<double> bounds;    // per-user k-th largest similarity
  std::vector<std::string> warnings;
};

/// Cosine kNN graph: edge (i, j) survives when its similarity is positive and
/// at least min(bound_i, bound_j).
SimilarityGraph similarity_graph(const TermUserMatrix& matrix, const SimilarityOptions& options = {});

struct RankedTerm {
  std::string term;
  std::int64_t count = 0;
};

/// Per community (index = label), terms ranked by pooled count, ties by term.
std::vector<std::vector<RankedTerm>> top_terms(std::span<const int> labels,
                                               std::span<const TermCounts> counts, std::size_t m);

struct TopicConfig {
  TokenizerOptions tokenizer;
  /// Unstemmed stopwords; empty means `default_stopwords()`.
  std::vector<std::string> stopwords;
  double dynamic_p = 0.5;
  double gamma_q = 0.9;
  SimilarityOptions similarity;
  std::size_t top_m = 25;
};

struct TopicResult {
  DocumentSet documents;
  std::vector<TermCounts> stem_counts;  // per user, after static stopwords
  StopwordSet dynamic_stopwords;
  std::vector<KeywordSelection> keyword_selections;  // per user
  std::set<std::string> keywords;
  TermUserMatrix matrix;
  SimilarityGraph similarity;
  CommunityResult communities;
  std::vector<std::vector<RankedTerm>> top_terms;
  std::vector<std::string> warnings;

  const std::vector<std::string>& users() const { return matrix.users; }
  Json to_json() const;
};

/// documents -> stems -> dynamic stopwords -> Gamma keywords -> normalized
/// term-user matrix -> cosine kNN graph -> modularity communities -> top terms.
TopicResult run_topic_pipeline(const DocumentSet& documents, const TopicConfig& config = {});
TopicResult run_topic_pipeline(std::span<const TweetRecord> records, std::span<const std::string> users,
                               const DateWindow& window, const TopicConfig& config = {});

void write_top_terms_csv(std::ostream& out, std::span<const RankedTerm> terms);

}  // namespace tweetdyn

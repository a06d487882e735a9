#include "tweetdyn/topic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include <boost/math/distributions/gamma.hpp>
#include <fmt/format.h>

#include "tweetdyn/csv.hpp"
#include "tweetdyn/porter.hpp"

namespace tweetdyn {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - pos < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char c = text[pos + i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

constexpr std::string_view kStopwords[] = {
    "a",       "about",   "above",   "after",    "again",   "against", "all",     "also",
    "am",      "an",      "and",     "any",      "are",     "as",      "at",      "be",
    "because", "been",    "before",  "being",    "below",   "between", "both",    "but",
    "by",      "can",     "could",   "did",      "do",      "does",    "doing",   "don",
    "down",    "during",  "each",    "even",     "ever",    "every",   "few",     "for",
    "from",    "further", "get",     "go",       "going",   "got",     "had",     "has",
    "have",    "having",  "he",      "her",      "here",    "hers",    "herself", "him",
    "himself", "his",     "how",     "i",        "if",      "in",      "into",    "is",
    "it",      "its",     "itself",  "just",     "know",    "like",    "ll",      "make",
    "many",    "may",     "me",      "might",    "more",    "most",    "much",    "must",
    "my",      "myself",  "new",     "no",       "nor",     "not",     "now",     "of",
    "off",     "on",      "once",    "one",      "only",    "or",      "other",   "our",
    "ours",    "ourselves", "out",   "over",     "own",     "people",  "re",      "rt",
    "s",       "said",    "same",    "say",      "says",    "see",     "she",     "should",
    "since",   "so",      "some",    "still",    "such",    "t",       "take",    "than",
    "that",    "the",     "their",   "theirs",   "them",    "themselves", "then", "there",
    "these",   "they",    "thing",   "think",    "this",    "those",   "through", "time",
    "to",      "too",     "two",     "under",    "until",   "up",      "us",      "use",
    "ve",      "very",    "via",     "want",     "was",     "way",     "we",      "well",
    "were",    "what",    "when",    "where",    "which",   "while",   "who",     "whom",
    "why",     "will",    "with",    "would",    "year",    "yet",     "you",     "your",
    "yours",   "yourself", "yourselves", "amp",  "d",       "m",       "o",       "y",
    "let",     "back",    "day",     "really",   "right",   "good",    "first",   "made",
    "need",    "look"};

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    const bool at_boundary = current.empty();
    if (at_boundary && options.strip_urls &&
        (starts_with_ci(text, i, "http://") || starts_with_ci(text, i, "https://") ||
         starts_with_ci(text, i, "www."))) {
      while (i < n && !is_space(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    if (c == '@' && options.strip_mentions && i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      flush();
      ++i;
      while (i < n && (is_word_byte(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      continue;
    }
    if (c == '#' && !options.keep_hashtags && i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      flush();
      ++i;
      while (i < n && (is_word_byte(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      continue;
    }
    if (is_word_byte(c)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c));
    } else {
      flush();
    }
    ++i;
  }
  flush();
  return tokens;
}

DocumentSet build_documents(std::span<const TweetRecord> records, std::span<const std::string> users,
                            const DateWindow& window, const TokenizerOptions& options) {
  std::vector<std::string> sorted(users.begin(), users.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::unordered_map<std::string_view, std::vector<const TweetRecord*>> by_user;
  for (const auto& u : sorted) by_user[u];
  for (const auto& r : records) {
    auto it = by_user.find(r.user_id);
    if (it == by_user.end() || !window.contains(day_of(r.timestamp))) continue;
    it->second.push_back(&r);
  }

  DocumentSet out;
  out.documents.reserve(sorted.size());
  for (const auto& u : sorted) {
    auto& tweets = by_user[u];
    std::sort(tweets.begin(), tweets.end(), [](const TweetRecord* a, const TweetRecord* b) {
      return std::tie(a->timestamp, a->tweet_id) < std::tie(b->timestamp, b->tweet_id);
    });
    Document doc{u, {}, {}};
    for (const auto* t : tweets) {
      if (!doc.text.empty()) doc.text.push_back('\n');
      doc.text += t->text;
    }
    doc.tokens = tokenize(doc.text, options);
    if (doc.tokens.empty()) {
      out.warnings.push_back(fmt::format("user '{}' has no tokens in {}..{}", u, format_date(window.start()),
                                         format_date(window.end())));
    }
    out.documents.push_back(std::move(doc));
  }
  return out;
}

std::span<const std::string_view> default_stopwords() { return kStopwords; }

StopwordSet stem_stopwords(std::span<const std::string_view> words) {
  StopwordSet out;
  for (auto w : words) {
    for (auto& token : tokenize(w)) {
      auto stem = porter_stem(token);
      if (!stem.empty()) out.insert(std::move(stem));
    }
  }
  return out;
}

StopwordSet stem_stopwords(std::span<const std::string> words) {
  std::vector<std::string_view> views(words.begin(), words.end());
  return stem_stopwords(std::span<const std::string_view>(views));
}

TermCounts stem_and_filter(const Document& doc, const StopwordSet& stopword_stems) {
  TermCounts counts;
  for (const auto& token : doc.tokens) {
    auto stem = porter_stem(token);
    if (stem.empty() || stopword_stems.contains(stem)) continue;
    ++counts[stem];
  }
  return counts;
}

std::vector<std::size_t> TermUserMatrix::document_frequency() const {
  std::vector<std::size_t> df(terms.size(), 0);
  for (Eigen::Index col = 0; col < counts.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(counts, col); it; ++it) {
      if (it.value() > 0.0) ++df[static_cast<std::size_t>(it.row())];
    }
  }
  return df;
}

void TermUserMatrix::write_triplets_csv(std::ostream& out) const {
  out << "term,user_id,count\n";
  for (Eigen::Index col = 0; col < counts.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(counts, col); it; ++it) {
      out << csv_escape(terms[static_cast<std::size_t>(it.row())]) << ','
          << csv_escape(users[static_cast<std::size_t>(col)]) << ','
          << static_cast<std::int64_t>(it.value()) << '\n';
    }
  }
}

TermUserMatrix build_term_user_matrix(std::span<const std::string> users,
                                      std::span<const TermCounts> per_user) {
  if (users.size() != per_user.size()) throw Error("one term-count map per user required");
  TermUserMatrix m;
  m.users.assign(users.begin(), users.end());
  std::set<std::string> vocab;
  for (const auto& counts : per_user) {
    for (const auto& [term, c] : counts) {
      if (c < 0) throw Error(fmt::format("negative count for term '{}'", term));
      if (c > 0) vocab.insert(term);
    }
  }
  m.terms.assign(vocab.begin(), vocab.end());
  std::unordered_map<std::string_view, Eigen::Index> row;
  for (std::size_t i = 0; i < m.terms.size(); ++i) row.emplace(m.terms[i], static_cast<Eigen::Index>(i));

  const auto n_terms = static_cast<Eigen::Index>(m.terms.size());
  const auto n_users = static_cast<Eigen::Index>(users.size());
  std::vector<Eigen::Triplet<double>> raw, unit;
  for (std::size_t j = 0; j < per_user.size(); ++j) {
    double norm2 = 0.0;
    for (const auto& [term, c] : per_user[j]) {
      if (c == 0) continue;
      raw.emplace_back(row.at(term), static_cast<Eigen::Index>(j), static_cast<double>(c));
      norm2 += static_cast<double>(c) * static_cast<double>(c);
    }
    if (norm2 == 0.0) {
      m.zero_columns.push_back(j);
      continue;
    }
    const double norm = std::sqrt(norm2);
    for (const auto& [term, c] : per_user[j]) {
      if (c != 0) unit.emplace_back(row.at(term), static_cast<Eigen::Index>(j), static_cast<double>(c) / norm);
    }
  }
  m.counts.resize(n_terms, n_users);
  m.counts.setFromTriplets(raw.begin(), raw.end());
  m.normalized.resize(n_terms, n_users);
  m.normalized.setFromTriplets(unit.begin(), unit.end());
  return m;
}

StopwordSet dynamic_stopwords(const TermUserMatrix& matrix, double p) {
  if (!(p > 0.0 && p <= 1.0)) throw Error(fmt::format("dynamic stopword fraction {} outside (0, 1]", p));
  const auto df = matrix.document_frequency();
  const double limit = p * static_cast<double>(matrix.users.size());
  StopwordSet out;
  for (std::size_t i = 0; i < df.size(); ++i) {
    if (static_cast<double>(df[i]) > limit) out.insert(matrix.terms[i]);
  }
  return out;
}

double GammaFit::quantile(double q) const {
  if (degenerate) throw Error("quantile of a degenerate Gamma fit");
  if (!(q > 0.0 && q < 1.0)) throw Error(fmt::format("Gamma quantile level {} outside (0, 1)", q));
  boost::math::gamma_distribution<double> dist(k_shape, theta_scale);
  return boost::math::quantile(dist, q);
}

GammaFit fit_gamma(std::span<const std::int64_t> values) {
  GammaFit fit;
  const std::size_t n = values.size();
  if (n == 0) {
    fit.degenerate = true;
    return fit;
  }
  // exact integer moments: var = (n sum x^2 - (sum x)^2) / (n (n - 1))
  long double sum = 0, sum_sq = 0;
  for (auto v : values) {
    if (v < 0) throw Error("Gamma fit needs nonnegative counts");
    sum += static_cast<long double>(v);
    sum_sq += static_cast<long double>(v) * static_cast<long double>(v);
  }
  const long double ln = static_cast<long double>(n);
  fit.mean = static_cast<double>(sum / ln);
  if (n < 2) {
    fit.degenerate = true;
    return fit;
  }
  fit.variance = static_cast<double>((ln * sum_sq - sum * sum) / (ln * (ln - 1)));
  if (!(fit.variance > 0.0) || !(fit.mean > 0.0)) {
    fit.variance = std::max(fit.variance, 0.0);
    fit.degenerate = true;
    return fit;
  }
  fit.k_shape = fit.mean * fit.mean / fit.variance;
  fit.theta_scale = fit.variance / fit.mean;
  return fit;
}

KeywordSelection gamma_keywords(const TermCounts& counts, double q) {
  KeywordSelection out;
  std::vector<std::int64_t> values;
  for (const auto& [term, c] : counts) {
    if (c > 0) values.push_back(c);
  }
  if (values.empty()) {
    out.fit.degenerate = true;
    return out;
  }
  out.fit = fit_gamma(values);
  out.cutoff = out.fit.degenerate ? out.fit.mean : out.fit.quantile(q);
  for (const auto& [term, c] : counts) {
    if (c > 0 && static_cast<double>(c) >= out.cutoff) out.keywords.insert(term);
  }
  return out;
}

SimilarityGraph similarity_graph(const TermUserMatrix& matrix, const SimilarityOptions& options) {
  const std::size_t n = matrix.users.size();
  if (n < 2) throw Error(fmt::format("similarity graph needs at least 2 users, got {}", n));
  if (options.k < 1) throw Error("similarity k must be >= 1");

  SimilarityGraph out;
  out.graph = WeightedGraph(matrix.users);
  const Eigen::MatrixXd gram = Eigen::MatrixXd(matrix.normalized.transpose() * matrix.normalized);
  out.similarity = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    for (Eigen::Index j = i + 1; j < static_cast<Eigen::Index>(n); ++j) {
      const double s = std::clamp(gram(i, j), 0.0, 1.0);
      out.similarity(i, j) = s;
      out.similarity(j, i) = s;
    }
  }
  for (auto j : matrix.zero_columns) {
    out.warnings.push_back(fmt::format("user '{}' has no keyword terms; isolated vertex", matrix.users[j]));
  }

  const std::size_t kk = std::min(options.k, options.bound_includes_diagonal ? n : n - 1);
  out.bounds.resize(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i || options.bound_includes_diagonal) {
        row.push_back(out.similarity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk - 1), row.end(),
                     std::greater<>());
    out.bounds[i] = row[kk - 1];
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = out.similarity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (s > 0.0 && s >= std::min(out.bounds[i], out.bounds[j])) out.graph.set_weight(i, j, s);
    }
  }
  return out;
}

std::vector<std::vector<RankedTerm>> top_terms(std::span<const int> labels,
                                               std::span<const TermCounts> counts, std::size_t m) {
  if (labels.size() != counts.size()) throw Error("one label per term-count map required");
  int communities = 0;
  for (int l : labels) {
    if (l < 0) throw Error("community labels must be >= 0");
    communities = std::max(communities, l + 1);
  }
  std::vector<TermCounts> pooled(static_cast<std::size_t>(communities));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& target = pooled[static_cast<std::size_t>(labels[i])];
    for (const auto& [term, c] : counts[i]) target[term] += c;
  }
  std::vector<std::vector<RankedTerm>> out(pooled.size());
  for (std::size_t c = 0; c < pooled.size(); ++c) {
    for (const auto& [term, count] : pooled[c]) {
      if (count > 0) out[c].push_back({term, count});
    }
    std::stable_sort(out[c].begin(), out[c].end(),
                     [](const RankedTerm& a, const RankedTerm& b) { return a.count > b.count; });
    if (out[c].size() > m) out[c].resize(m);
  }
  return out;
}

Json TopicResult::to_json() const {
  Json groups = Json::array();
  const auto members = communities.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    Json ids = Json::array();
    for (auto v : members[c]) ids.push_back(matrix.users[v]);
    Json terms = Json::array();
    for (const auto& t : top_terms[c]) terms.push_back({{"term", t.term}, {"count", t.count}});
    groups.push_back({{"community", c}, {"users", std::move(ids)}, {"top_terms", std::move(terms)}});
  }
  return Json{{"users", matrix.users.size()},
              {"dynamic_stopwords", dynamic_stopwords},
              {"keywords", keywords.size()},
              {"edges", similarity.graph.edge_count()},
              {"modularity", round_sig(communities.modularity)},
              {"communities", std::move(groups)},
              {"warnings", warnings}};
}

TopicResult run_topic_pipeline(const DocumentSet& documents, const TopicConfig& config) {
  TopicResult out;
  out.documents = documents;
  out.warnings = documents.warnings;

  const StopwordSet stop = config.stopwords.empty() ? stem_stopwords(default_stopwords())
                                                    : stem_stopwords(std::span<const std::string>(config.stopwords));
  std::vector<std::string> users;
  for (const auto& doc : documents.documents) {
    users.push_back(doc.user_id);
    out.stem_counts.push_back(stem_and_filter(doc, stop));
  }

  const auto binary = build_term_user_matrix(users, out.stem_counts);
  out.dynamic_stopwords = dynamic_stopwords(binary, config.dynamic_p);

  std::vector<TermCounts> filtered = out.stem_counts;
  for (auto& counts : filtered) {
    std::erase_if(counts, [&](const auto& kv) { return out.dynamic_stopwords.contains(kv.first); });
  }
  for (const auto& counts : filtered) {
    out.keyword_selections.push_back(gamma_keywords(counts, config.gamma_q));
    out.keywords.insert(out.keyword_selections.back().keywords.begin(),
                        out.keyword_selections.back().keywords.end());
  }
  for (auto& counts : filtered) {
    std::erase_if(counts, [&](const auto& kv) { return !out.keywords.contains(kv.first); });
  }

  out.matrix = build_term_user_matrix(users, filtered);
  out.similarity = similarity_graph(out.matrix, config.similarity);
  out.warnings.insert(out.warnings.end(), out.similarity.warnings.begin(), out.similarity.warnings.end());
  if (out.similarity.graph.edge_count() == 0) out.warnings.push_back("similarity graph has no edges");
  out.communities = modularity_communities(out.similarity.graph);
  out.similarity.graph.set_communities(out.communities.labels);
  out.top_terms = top_terms(out.communities.labels, out.stem_counts, config.top_m);
  return out;
}

TopicResult run_topic_pipeline(std::span<const TweetRecord> records, std::span<const std::string> users,
                               const DateWindow& window, const TopicConfig& config) {
  return run_topic_pipeline(build_documents(records, users, window, config.tokenizer), config);
}

void write_top_terms_csv(std::ostream& out, std::span<const RankedTerm> terms) {
  out << "rank,term,count\n";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    out << i + 1 << ',' << csv_escape(terms[i].term) << ',' << terms[i].count << '\n';
  }
}

}  // namespace tweetdyn

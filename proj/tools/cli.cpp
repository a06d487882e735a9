#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tweetdyn/community.hpp"
#include "tweetdyn/compare.hpp"
#include "tweetdyn/csv.hpp"
#include "tweetdyn/json_util.hpp"
#include "tweetdyn/synth.hpp"
#include "tweetdyn/timeseries.hpp"

#ifndef TWEETDYN_VERSION
#define TWEETDYN_VERSION "0.0.0"
#endif

namespace tweetdyn::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"input", ""},
    {"format", "auto"},
    {"column.tweet_id", "tweetid"},
    {"column.user_id", "userid"},
    {"column.timestamp", "tweet_time"},
    {"column.language", "tweet_language"},
    {"column.is_retweet", "is_retweet"},
    {"column.retweeted_user_id", "retweet_userid"},
    {"column.text", "tweet_text"},
    {"pre.start", "2016-03-09"},
    {"pre.end", "2016-11-07"},
    {"post.start", "2016-11-29"},
    {"post.end", "2017-07-30"},
    {"cohort.volume_start", "2015-01-01"},
    {"cohort.volume_end", "2017-12-31"},
    {"cohort.min_total_tweets", "1093"},
    {"cohort.active_day_fraction", "0.6"},
    {"cohort.language", ""},
    {"spectral.ma_window", "7"},
    {"spectral.denoise_q", "0.33"},
    {"spectral.pca_dims", "3"},
    {"spectral.normalize_rows", "false"},
    {"spectral.k", "4"},
    {"spectral.restarts", "10"},
    {"spectral.fourier_terms", "6"},
    {"topic.dynamic_p", "0.5"},
    {"topic.gamma_q", "0.9"},
    {"topic.knn_k", "10"},
    {"topic.bound_includes_diagonal", "false"},
    {"topic.top_m", "25"},
    {"topic.strip_urls", "true"},
    {"topic.strip_mentions", "true"},
    {"topic.keep_hashtags", "true"},
    {"topic.stopwords", ""},
    {"strategy.vertex_threshold", "0.66666666666666663"},
    {"strategy.edge_threshold", "0.16666666666666666"},
    {"changepoint.origin", "2015-01-01"},
    {"changepoint.first", "200"},
    {"changepoint.change", "616"},
    {"changepoint.last", "859"},
    {"changepoint.sigma", "5"},
    {"changepoint.language", "en"},
    {"synth.start", "2016-03-01"},
    {"synth.end", "2017-08-06"},
    {"synth.users_per_group", "10"},
    {"synth.noise_weight", "0.1"},
    {"seed", "20190601"},
};

template <typename T>
T require(const std::optional<T>& v, const std::string& key) {
  if (!v) throw Error(fmt::format("config key '{}' has an invalid value", key));
  return *v;
}

// ---------------------------------------------------------------------------
// artifacts are buffered and only land in the output directory once the whole
// command has succeeded

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

  std::ostringstream& text(const std::string& name) { return files_[name]; }
  void json(const std::string& name, const Json& doc) { files_[name] << doc.dump(2) << '\n'; }
  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, content] : files_) out.push_back(name);
    return out;
  }
  const fs::path& dir() const { return dir_; }

  void commit() {
    fs::create_directories(dir_);
    std::vector<fs::path> staged;
    try {
      for (const auto& [name, content] : files_) {
        const fs::path tmp = dir_ / (name + ".partial");
        std::ofstream f(tmp, std::ios::binary);
        f << content.str();
        f.close();
        if (!f) throw Error(fmt::format("cannot write {}", tmp.string()));
        staged.push_back(tmp);
      }
    } catch (...) {
      for (const auto& p : staged) fs::remove(p);
      throw;
    }
    for (const auto& [name, content] : files_) fs::rename(dir_ / (name + ".partial"), dir_ / name);
  }

 private:
  fs::path dir_;
  std::map<std::string, std::ostringstream> files_;
};

struct Context {
  RunConfig config;
  std::vector<std::string> windows;
  std::optional<fs::path> series;  // changepoint: daily totals instead of records
  std::string synth_kind = "corpus";
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, fnv1a
  ParseReport report;
};

std::string file_digest(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << f.rdbuf();
  return hex64(fnv1a64(buf.str()));
}

std::vector<TweetRecord> load_records(Context& ctx) {
  const auto path = ctx.config.input();
  if (!path) throw Error("no input given; pass --input or set 'input' in the config");
  auto parsed = read_records_file(*path, ctx.config.format(), ctx.config.columns());
  ctx.inputs.emplace_back(path->string(), file_digest(*path));
  *ctx.out << fmt::format("read {} rows: {} accepted, {} rejected\n", parsed.report.rows_read,
                          parsed.report.accepted, parsed.report.rejected);
  for (const auto& w : parsed.report.warnings) *ctx.err << "warning: " << w << '\n';
  ctx.report = parsed.report;
  if (parsed.records.empty()) throw Error(fmt::format("{} contains no valid records", path->string()));
  return std::move(parsed.records);
}

Json window_json(const DateWindow& w) {
  return Json{{"start", format_date(w.start())}, {"end", format_date(w.end())}, {"days", w.days()}};
}

Json strings_json(const std::vector<std::string>& v) { return Json(v); }

CohortSelection cohort_for(Context& ctx, std::span<const TweetRecord> records, const std::string& w) {
  auto sel = select_cohort(records, ctx.config.cohort(w));
  for (const auto& warning : sel.warnings) *ctx.err << "warning: " << warning << '\n';
  *ctx.out << fmt::format("{} window: {} users in cohort\n", w, sel.users.size());
  return sel;
}

// ---------------------------------------------------------------------------

void cmd_ingest(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto campaign = campaign_users(records);
  const auto tally = tally_categories(records, campaign);
  std::map<std::string, std::size_t> languages;
  Day first = day_of(records.front().timestamp), last = first;
  for (const auto& r : records) {
    ++languages[r.language];
    first = std::min(first, day_of(r.timestamp));
    last = std::max(last, day_of(r.timestamp));
  }
  const auto network = retweet_network(records, campaign);
  const auto communities = modularity_communities(network);

  art.json("ingest_report.json",
           Json{{"parse", ctx.report.to_json()},
                {"tweets", records.size()},
                {"users", campaign.size()},
                {"first_day", format_date(first)},
                {"last_day", format_date(last)},
                {"categories",
                 {{"original", tally[0]}, {"spreading", tally[1]}, {"amplifying", tally[2]}}},
                {"languages", languages},
                {"retweet_network",
                 {{"vertices", network.vertex_count()},
                  {"edges", network.edge_count()},
                  {"total_weight", round_sig(network.total_weight())},
                  {"communities", communities.count},
                  {"modularity", round_sig(communities.modularity)}}}});
  network.write_edge_list_csv(art.text("retweet_edges.csv"));
  art.json("retweet_communities.json", communities.to_json(network));
  *ctx.out << fmt::format("{} tweets from {} accounts; retweet network has {} communities (Q = {:.4f})\n",
                          records.size(), campaign.size(), communities.count, communities.modularity);
}

void cmd_counts(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto campaign = campaign_users(records);
  Day first = day_of(records.front().timestamp), last = first;
  for (const auto& r : records) {
    first = std::min(first, day_of(r.timestamp));
    last = std::max(last, day_of(r.timestamp));
  }
  const DateWindow window(first, last);
  std::vector<std::array<std::int64_t, 3>> by_category(static_cast<std::size_t>(window.days()));
  for (const auto& r : records) {
    ++by_category[static_cast<std::size_t>(window.offset(day_of(r.timestamp)))]
                  [static_cast<std::size_t>(categorize(r, campaign))];
  }
  auto& csv = art.text("daily_volume.csv");
  csv << "date,day_offset,total,original,spreading,amplifying,cumulative\n";
  std::int64_t cumulative = 0;
  for (std::int64_t t = 0; t < window.days(); ++t) {
    const auto& c = by_category[static_cast<std::size_t>(t)];
    const std::int64_t total = c[0] + c[1] + c[2];
    cumulative += total;
    csv << format_date(window.day_at(t)) << ',' << t << ',' << total << ',' << c[0] << ',' << c[1] << ','
        << c[2] << ',' << cumulative << '\n';
  }
  art.json("counts_summary.json", Json{{"window", window_json(window)}, {"tweets", cumulative}});
}

void cmd_changepoint(Context& ctx, Artifacts& art) {
  const auto cp = ctx.config.changepoint();
  std::vector<std::int64_t> daily;
  if (ctx.series) {
    std::ifstream f(*ctx.series);
    if (!f) throw Error(fmt::format("cannot open {}", ctx.series->string()));
    ctx.inputs.emplace_back(ctx.series->string(), file_digest(*ctx.series));
    for (double v : read_series_csv(f)) {
      if (v < 0.0 || v != std::floor(v)) throw Error("daily totals must be nonnegative integers");
      daily.push_back(static_cast<std::int64_t>(v));
    }
  } else {
    auto records = load_records(ctx);
    if (cp.language) {
      std::erase_if(records, [&](const TweetRecord& r) { return r.language != *cp.language; });
    }
    const DateWindow window(cp.origin, cp.origin + std::chrono::days(cp.last));
    daily = daily_counts(records, std::nullopt, window).values;
  }
  if (static_cast<std::int64_t>(daily.size()) <= cp.last) {
    throw Error(fmt::format("series has {} days; the last segment ends at day {}", daily.size(), cp.last));
  }
  CountSeries series{std::nullopt, DateWindow(cp.origin, cp.origin + std::chrono::days(daily.size() - 1)), daily};
  const auto cumulative = accumulate(series);
  const auto before = fit_segment(cumulative, cp.first, cp.change, cp.first, cp.sigma);
  const auto after = fit_segment(cumulative, cp.change, cp.last, cp.change, cp.sigma);
  const auto verdict = changepoint_significant(before, after, cp.sigma);

  art.json("changepoint.json", Json{{"origin", format_date(cp.origin)},
                                    {"language", cp.language && !ctx.series ? Json(*cp.language) : Json(nullptr)},
                                    {"tweets", series.total()},
                                    {"change_day", cp.change},
                                    {"change_date", format_date(cp.origin + std::chrono::days(cp.change))},
                                    {"model_before", before.to_json()},
                                    {"model_after", after.to_json()},
                                    {"verdict", verdict.to_json()}});
  auto& csv = art.text("accumulation_fit.csv");
  csv << "day_offset,date,daily,cumulative,fit_before,fit_after\n";
  for (std::int64_t t = 0; t <= cp.last; ++t) {
    const auto i = static_cast<std::size_t>(t);
    csv << t << ',' << format_date(series.window.day_at(t)) << ',' << daily[i] << ',' << format_real(cumulative[i])
        << ',';
    if (t >= cp.first && t <= cp.change) {
      csv << format_real(before.intercept + before.slope * static_cast<double>(t - cp.first));
    }
    csv << ',';
    if (t >= cp.change) csv << format_real(after.intercept + after.slope * static_cast<double>(t - cp.change));
    csv << '\n';
  }
  *ctx.out << fmt::format("slopes {:.2f} -> {:.2f} tweets/day; change {}significant at {} sigma\n",
                          before.slope, after.slope, verdict.significant ? "" : "not ", cp.sigma);
}

Json partition_json(const SimplexPartition& p) {
  return Json{{"vertex_threshold", round_sig(p.vertex_threshold)}, {"edge_threshold", round_sig(p.edge_threshold)}};
}

void cmd_strategy(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto campaign = campaign_users(records);
  const auto partition = ctx.config.partition();
  Json windows = Json::object();
  std::map<std::string, SymbolDistribution> dists;
  for (const auto& w : ctx.windows) {
    const auto window = ctx.config.window(w);
    const auto cohort = cohort_for(ctx, records, w);
    const auto series = daily_category_counts(records, campaign, cohort.users, window);
    auto& symbols = art.text(fmt::format("symbols_{}.csv", w));
    auto& points = art.text(fmt::format("strategy_points_{}.csv", w));
    symbols << "user_id,symbols\n";
    points << "user_id,day_offset,original,spreading,amplifying,symbol\n";
    for (const auto& s : series) {
      symbols << csv_escape(s.user_id) << ',' << symbol_string(s, partition) << '\n';
      for (std::size_t t = 0; t < s.days.size(); ++t) {
        const auto& c = s.days[t];
        if (c[0] + c[1] + c[2] == 0) continue;
        const auto p = strategy_vector(c, static_cast<std::int64_t>(t));
        points << csv_escape(s.user_id) << ',' << t << ',' << format_real(p.p[0]) << ',' << format_real(p.p[1])
               << ',' << format_real(p.p[2]) << ',' << to_char(symbolize(p, partition)) << '\n';
      }
    }
    Json entry{{"window", window_json(window)}, {"cohort_size", cohort.users.size()}};
    if (!cohort.users.empty()) {
      dists[w] = symbol_distribution(series, 0, window.days(), partition);
      entry["distribution"] = dists[w].to_json();
    }
    windows[w] = std::move(entry);
  }
  Json doc{{"partition", partition_json(partition)}, {"windows", std::move(windows)}};
  if (dists.contains("pre") && dists.contains("post")) {
    const auto chi = chi_square_shift(dists["post"], dists["pre"]);
    const double critical = chi_square_critical(chi.degrees_of_freedom, 0.999);
    doc["shift"] = chi.to_json();
    doc["shift"]["critical_0_999"] = round_sig(critical);
    doc["shift"]["exceeds_critical"] = chi.statistic > critical;
    *ctx.out << fmt::format("strategy shift chi2 = {:.3f} (critical {:.3f})\n", chi.statistic, critical);
  }
  art.json("strategy.json", doc);
}

std::map<std::string, CountSeries> cohort_series(Context& ctx, std::span<const TweetRecord> records,
                                                 const std::string& w, CohortSelection& cohort) {
  cohort = cohort_for(ctx, records, w);
  return daily_counts_by_user(records, cohort.users, ctx.config.window(w));
}

Json cohort_json(const RunConfig& config, const std::string& w, const CohortSelection& cohort) {
  const auto spec = config.cohort(w);
  return Json{{"window", window_json(spec.window)},
              {"volume_window", window_json(spec.volume_window.value_or(spec.window))},
              {"min_total_tweets", spec.min_total_tweets},
              {"active_day_fraction", round_sig(spec.active_day_fraction)},
              {"users", cohort.users},
              {"warnings", cohort.warnings}};
}

void cmd_spectra(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto spectral = ctx.config.spectral();
  for (const auto& w : ctx.windows) {
    CohortSelection cohort;
    const auto series = cohort_series(ctx, records, w, cohort);
    art.json(fmt::format("cohort_{}.json", w), cohort_json(ctx.config, w, cohort));
    auto& osc = art.text(fmt::format("oscillators_{}.csv", w));
    osc << "user_id,day_offset,value\n";
    std::vector<Spectrum> spectra;
    for (const auto& [user, s] : series) {
      const auto o = detrend(s, spectral.ma_window);
      for (std::size_t t = 0; t < o.values.size(); ++t) {
        osc << csv_escape(user) << ',' << t << ',' << format_real(o.values[t]) << '\n';
      }
      spectra.push_back(dft(o.values, user));
    }
    write_spectra_csv(art.text(fmt::format("spectra_{}.csv", w)), spectra);
  }
}

void cmd_cluster_spectral(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto campaign = campaign_users(records);
  const auto config = ctx.config.spectral();
  const auto partition = ctx.config.partition();
  for (const auto& w : ctx.windows) {
    CohortSelection cohort;
    const auto series = cohort_series(ctx, records, w, cohort);
    const auto result = cluster_spectra(series, config);

    Json fits = Json::object();
    for (std::size_t i = 0; i < result.users.size(); ++i) fits[result.users[i]] = result.fits[i].to_json();
    Json eigen = Json::array();
    double eigen_total = result.embedding.eigenvalues.sum();
    Json explained = Json::array();
    for (Eigen::Index i = 0; i < result.embedding.eigenvalues.size(); ++i) {
      eigen.push_back(round_sig(result.embedding.eigenvalues(i)));
      if (static_cast<std::size_t>(i) < result.embedding.dims()) {
        explained.push_back(round_sig(eigen_total > 0.0 ? result.embedding.eigenvalues(i) / eigen_total : 0.0));
      }
    }
    Json trace = Json::array();
    for (double v : result.clusters.objective_trace) trace.push_back(round_sig(v));

    // strategy mix of each spectral cluster
    const auto category = daily_category_counts(records, campaign, result.users, ctx.config.window(w));
    Json strategies = Json::object();
    for (std::size_t c = 1; c <= result.clusters.medoids.size(); ++c) {
      std::vector<CategorySeries> members;
      for (const auto& s : category) {
        if (result.clusters.labels.at(s.user_id) == static_cast<int>(c)) members.push_back(s);
      }
      try {
        strategies[std::to_string(c)] = symbol_distribution(members, 0, ctx.config.window(w).days(), partition).to_json();
      } catch (const Error&) {
        strategies[std::to_string(c)] = nullptr;
      }
    }

    art.json(fmt::format("clusters_spectral_{}.json", w),
             Json{{"window", window_json(ctx.config.window(w))},
                  {"users", result.users},
                  {"clustering", result.clusters.to_json()},
                  {"objective_trace", std::move(trace)},
                  {"embedding",
                   {{"dims", result.embedding.dims()},
                    {"eigenvalues", std::move(eigen)},
                    {"explained_variance", std::move(explained)},
                    {"warnings", result.embedding.warnings}}},
                  {"fourier_fits", std::move(fits)},
                  {"strategies", std::move(strategies)}});

    auto& emb = art.text(fmt::format("embedding_{}.csv", w));
    emb << "user_id,cluster";
    for (std::size_t d = 0; d < result.embedding.dims(); ++d) emb << ",pc" << d + 1;
    emb << '\n';
    for (std::size_t i = 0; i < result.users.size(); ++i) {
      emb << csv_escape(result.users[i]) << ',' << result.clusters.labels.at(result.users[i]);
      for (std::size_t d = 0; d < result.embedding.dims(); ++d) {
        emb << ',' << format_real(result.embedding.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)));
      }
      emb << '\n';
    }

    auto& bands = art.text(fmt::format("bands_{}.csv", w));
    bands << "cluster,bin,period_days,min,q1,median,q3,max\n";
    const std::size_t n_samples = result.denoised.empty() ? 0 : result.denoised.front().n_samples;
    for (const auto& [c, stats] : result.bands) {
      for (std::size_t k = 0; k < stats.size(); ++k) {
        bands << c << ',' << k << ',';
        if (k > 0) bands << format_real(static_cast<double>(n_samples) / static_cast<double>(k));
        bands << ',' << format_real(stats[k].min) << ',' << format_real(stats[k].q1) << ','
              << format_real(stats[k].median) << ',' << format_real(stats[k].q3) << ',' << format_real(stats[k].max)
              << '\n';
      }
    }
    write_spectra_csv(art.text(fmt::format("spectra_denoised_{}.csv", w)), result.denoised);
    *ctx.out << fmt::format("{} window: {} spectral clusters, objective {:.4f}\n", w, result.clusters.medoids.size(),
                            result.clusters.objective);
  }
}

void cmd_cluster_topic(Context& ctx, Artifacts& art) {
  const auto records = load_records(ctx);
  const auto config = ctx.config.topic();
  for (const auto& w : ctx.windows) {
    const auto cohort = cohort_for(ctx, records, w);
    const auto result = run_topic_pipeline(records, cohort.users, ctx.config.window(w), config);
    for (const auto& warning : result.warnings) *ctx.err << "warning: " << warning << '\n';
    Json doc = result.to_json();
    doc["window"] = window_json(ctx.config.window(w));
    art.json(fmt::format("topics_{}.json", w), doc);
    result.matrix.write_triplets_csv(art.text(fmt::format("term_user_{}.csv", w)));
    result.similarity.graph.write_edge_list_csv(art.text(fmt::format("similarity_edges_{}.csv", w)));
    auto& terms = art.text(fmt::format("top_terms_{}.csv", w));
    terms << "community,rank,term,count\n";
    for (std::size_t c = 0; c < result.top_terms.size(); ++c) {
      for (std::size_t r = 0; r < result.top_terms[c].size(); ++r) {
        terms << c << ',' << r + 1 << ',' << csv_escape(result.top_terms[c][r].term) << ','
              << result.top_terms[c][r].count << '\n';
      }
    }
    *ctx.out << fmt::format("{} window: {} topic communities (Q = {:.4f})\n", w, result.communities.count,
                            result.communities.modularity);
  }
}

Json read_artifact(const fs::path& dir, const std::string& name) {
  const auto path = dir / name;
  if (!fs::exists(path)) throw Error(fmt::format("{} not found; run the producing subcommand first", path.string()));
  return read_json_file(path);
}

void cmd_compare(Context& ctx, Artifacts& art) {
  for (const auto& w : ctx.windows) {
    const auto spectral_doc = read_artifact(art.dir(), fmt::format("clusters_spectral_{}.json", w));
    const auto topic_doc = read_artifact(art.dir(), fmt::format("topics_{}.json", w));
    Partition spectral, topic;
    for (const auto& [user, label] : spectral_doc.at("clustering").at("labels").items()) {
      spectral[user] = label.get<int>();
    }
    for (const auto& community : topic_doc.at("communities")) {
      for (const auto& user : community.at("users")) topic[user.get<std::string>()] = community.at("community").get<int>();
    }
    const auto spectra_path = art.dir() / fmt::format("spectra_denoised_{}.csv", w);
    std::ifstream f(spectra_path);
    if (!f) throw Error(fmt::format("cannot open {}", spectra_path.string()));
    std::map<std::string, Spectrum> spectra;
    for (auto& s : read_spectra_csv(f)) spectra.emplace(s.user_id, std::move(s));

    const auto tab = cross_tab(spectral, topic);
    tab.write_csv(art.text(fmt::format("crosstab_{}.csv", w)));
    Json subclusters = Json::array();
    auto& bands = art.text(fmt::format("subcluster_bands_{}.csv", w));
    bands << "spectral_cluster,topic_cluster,bin,median\n";
    for (std::size_t r = 0; r < tab.rows.size(); ++r) {
      for (std::size_t c = 0; c < tab.cols.size(); ++c) {
        if (tab.cells[r][c] == 0) continue;
        const auto a = cluster_members(spectral, tab.rows[r]);
        const auto b = cluster_members(topic, tab.cols[c]);
        const auto summary = intersect_subcluster(a, b, spectra);
        Json entry = summary.to_json();
        entry["spectral_cluster"] = tab.rows[r];
        entry["topic_cluster"] = tab.cols[c];
        subclusters.push_back(std::move(entry));
        for (std::size_t k = 0; k < summary.bands.size(); ++k) {
          bands << tab.rows[r] << ',' << tab.cols[c] << ',' << k << ',' << format_real(summary.bands[k].median) << '\n';
        }
      }
    }
    art.json(fmt::format("compare_{}.json", w),
             Json{{"cross_tab", tab.to_json()}, {"subclusters", std::move(subclusters)}});
    *ctx.out << fmt::format("{} window: {} users in both clusterings\n", w, tab.users);
  }
}

std::vector<std::string> zipf_vocabulary(std::initializer_list<const char*> words) {
  return {words.begin(), words.end()};
}

std::vector<double> zipf_weights(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / static_cast<double>(r + 1);
  return w;
}

void cmd_synth(Context& ctx, Artifacts& art) {
  const auto seed = ctx.config.seed();
  const auto& s = ctx.config.settings();
  const auto users = static_cast<std::size_t>(require(s.get_int("synth.users_per_group"), "synth.users_per_group"));

  auto family = [&](const std::string& id, std::vector<double> periods) {
    GroupSpec g;
    g.group_id = id;
    g.drift = {{0, 12.0}};
    g.noise_sigma = periods.empty() ? 3.0 : 1.5;
    g.members = users;
    for (double p : periods) g.components.push_back(FrequencyComponent::with_period(p, 4.0, 6.0));
    return g;
  };
  const std::vector<GroupSpec> families = {family("noise", {}), family("period_4", {4.0}),
                                           family("period_7_4", {7.0, 4.0}), family("period_7_2.5", {7.0, 2.5})};

  if (ctx.synth_kind == "changepoint") {
    const auto cp = ctx.config.changepoint();
    const auto series = generate_changepoint_aggregate(1973.81, 3647.54, cp.change, cp.last + 1, seed, cp.origin);
    write_series_csv(art.text("synth_aggregate.csv"), series);
    art.json("synth_truth.json", Json{{"rate_before", 1973.81}, {"rate_after", 3647.54}, {"change_day", cp.change},
                                      {"days", cp.last + 1}, {"origin", format_date(cp.origin)}});
    return;
  }
  if (ctx.synth_kind == "series") {
    const auto generated = generate_series(families, ctx.config.window("pre"), seed);
    auto& csv = art.text("synth_series.csv");
    csv << "user_id,day_offset,count\n";
    for (const auto& [user, series] : generated.series) {
      for (std::size_t t = 0; t < series.values.size(); ++t) csv << user << ',' << t << ',' << series.values[t] << '\n';
    }
    art.json("synth_labels.json", generated.labels_json());
    return;
  }
  if (ctx.synth_kind != "corpus") throw Error(fmt::format("unknown synth kind '{}'", ctx.synth_kind));

  const DateWindow window(parse_date(s.get_or("synth.start", "")), parse_date(s.get_or("synth.end", "")));
  CorpusSpec spec;
  const std::vector<std::vector<std::string>> vocabularies = {
      zipf_vocabulary({"election", "ballot", "candidate", "debate", "senate", "primary", "poll", "campaign"}),
      zipf_vocabulary({"football", "stadium", "coach", "league", "season", "playoff", "quarterback", "touchdown"}),
      zipf_vocabulary({"weather", "storm", "rain", "flood", "forecast", "snow", "hurricane", "thunder"}),
      zipf_vocabulary({"music", "concert", "album", "guitar", "singer", "festival", "lyrics", "band"})};
  for (std::size_t g = 0; g < families.size(); ++g) {
    CorpusGroup group;
    group.group_id = families[g].group_id;
    group.vocabulary = vocabularies[g];
    group.weights = zipf_weights(vocabularies[g].size());
    group.members = users;
    group.activity = families[g];
    group.words_per_tweet = 6;
    group.mix_before = {0.7, 0.2, 0.1};
    group.mix_after = g % 2 == 0 ? StrategyMix{0.2, 0.1, 0.7} : StrategyMix{0.7, 0.2, 0.1};
    spec.groups.push_back(std::move(group));
  }
  spec.noise_vocabulary = {"news", "today", "world", "video", "photo", "watch", "breaking", "live"};
  spec.noise_weight = require(s.get_double("synth.noise_weight"), "synth.noise_weight");
  const Day election = parse_date("2016-11-09");
  if (window.contains(election)) spec.changepoint_day = window.offset(election);
  const auto corpus = generate_corpus(spec, window, seed);
  write_records(art.text("synth_records.csv"), corpus.records, InputFormat::Csv);
  Json labels = corpus.labels_json();
  labels["window"] = window_json(window);
  labels["seed"] = seed;
  art.json("synth_labels.json", labels);
  *ctx.out << fmt::format("generated {} tweets from {} accounts\n", corpus.records.size(), corpus.labels.size());
}

void cmd_report(Context& ctx, Artifacts& art) {
  const fs::path dir = art.dir();
  std::vector<std::string> sections = {"ingest_report", "counts_summary", "changepoint", "strategy"};
  for (const char* w : {"pre", "post"}) {
    for (const char* stem : {"cohort", "clusters_spectral", "topics", "compare"}) {
      sections.push_back(fmt::format("{}_{}", stem, w));
    }
  }
  Json merged = Json::object();
  for (const auto& name : sections) {
    const auto path = dir / (name + ".json");
    if (fs::exists(path)) merged[name] = read_json_file(path);
  }
  if (merged.empty()) throw Error(fmt::format("no analysis artifacts found in {}", dir.string()));

  const std::vector<std::pair<std::string, std::vector<std::string>>> plots = {
      {"daily_volume", {"daily_volume.csv"}},
      {"accumulation_fit", {"accumulation_fit.csv"}},
      {"strategy_points", {"strategy_points_pre.csv", "strategy_points_post.csv"}},
      {"strategy_symbols", {"symbols_pre.csv", "symbols_post.csv"}},
      {"oscillators", {"oscillators_pre.csv", "oscillators_post.csv"}},
      {"spectra", {"spectra_pre.csv", "spectra_post.csv"}},
      {"embedding", {"embedding_pre.csv", "embedding_post.csv"}},
      {"cluster_bands", {"bands_pre.csv", "bands_post.csv"}},
      {"top_terms", {"top_terms_pre.csv", "top_terms_post.csv"}},
      {"cross_tab", {"crosstab_pre.csv", "crosstab_post.csv"}},
      {"subcluster_bands", {"subcluster_bands_pre.csv", "subcluster_bands_post.csv"}},
      {"retweet_network", {"retweet_edges.csv"}}};
  Json plot_data = Json::object();
  for (const auto& [key, files] : plots) {
    Json present = Json::array();
    for (const auto& f : files) {
      if (fs::exists(dir / f)) present.push_back(f);
    }
    if (!present.empty()) plot_data[key] = std::move(present);
  }
  art.json("report.json", Json{{"version", TWEETDYN_VERSION}, {"sections", std::move(merged)}, {"plot_data", std::move(plot_data)}});
  *ctx.out << fmt::format("report written to {}\n", (dir / "report.json").string());
}

void write_manifest(const Context& ctx, Artifacts& art, const std::string& command) {
  Json inputs = Json::array();
  for (const auto& [path, digest] : ctx.inputs) inputs.push_back({{"path", path}, {"fnv1a64", digest}});
  Json config = Json::object();
  for (const auto& [k, v] : ctx.config.settings().entries()) config[k] = v;
  art.json(command + ".manifest.json", Json{{"tool", "tweetdyn"},
                                            {"version", TWEETDYN_VERSION},
                                            {"command", command},
                                            {"windows", ctx.windows},
                                            {"config_hash", ctx.config.hash()},
                                            {"seeds", {{"seed", ctx.config.seed()}}},
                                            {"inputs", std::move(inputs)},
                                            {"artifacts", art.names()},
                                            {"config", std::move(config)}});
}

}  // namespace

// ---------------------------------------------------------------------------

RunConfig::RunConfig() {
  for (const auto& [k, v] : kDefaults) settings_.set(k, v);
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!settings_.contains(key)) throw Error(fmt::format("unknown config key '{}'", key));
  settings_.set(key, value);
}

void RunConfig::apply(const KeyValueConfig& overrides) {
  for (const auto& [k, v] : overrides.entries()) set(k, v);
}

std::string RunConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : settings_.entries()) canonical += k + "=" + v + "\n";
  return hex64(fnv1a64(canonical));
}

std::optional<fs::path> RunConfig::input() const {
  auto v = settings_.get_or("input", "");
  if (v.empty()) return std::nullopt;
  return fs::path(v);
}

std::optional<InputFormat> RunConfig::format() const {
  const auto v = settings_.get_or("format", "auto");
  if (v == "auto") return std::nullopt;
  if (v == "csv") return InputFormat::Csv;
  if (v == "jsonl") return InputFormat::Jsonl;
  throw Error(fmt::format("format must be auto, csv or jsonl, not '{}'", v));
}

ColumnMapping RunConfig::columns() const { return ColumnMapping::from_config(settings_); }

DateWindow RunConfig::window(const std::string& name) const {
  if (name != "pre" && name != "post") throw Error(fmt::format("unknown window '{}'", name));
  return DateWindow(parse_date(settings_.get_or(name + ".start", "")), parse_date(settings_.get_or(name + ".end", "")));
}

CohortSpec RunConfig::cohort(const std::string& window_name) const {
  CohortSpec base{window(window_name)};
  auto spec = CohortSpec::from_config(settings_, base);
  const auto language = settings_.get_or("cohort.language", "");
  spec.language = language.empty() ? std::nullopt : std::optional<std::string>(language);
  spec.validate();
  return spec;
}

SpectralConfig RunConfig::spectral() const {
  SpectralConfig c;
  c.ma_window = static_cast<int>(require(settings_.get_int("spectral.ma_window"), "spectral.ma_window"));
  c.denoise_q = require(settings_.get_double("spectral.denoise_q"), "spectral.denoise_q");
  c.pca.dims = static_cast<std::size_t>(require(settings_.get_int("spectral.pca_dims"), "spectral.pca_dims"));
  c.pca.normalize_rows = require(settings_.get_bool("spectral.normalize_rows"), "spectral.normalize_rows");
  c.kmedoids.k = static_cast<std::size_t>(require(settings_.get_int("spectral.k"), "spectral.k"));
  c.kmedoids.restarts = static_cast<std::size_t>(require(settings_.get_int("spectral.restarts"), "spectral.restarts"));
  c.kmedoids.seed = seed();
  c.fourier_terms =
      static_cast<std::size_t>(require(settings_.get_int("spectral.fourier_terms"), "spectral.fourier_terms"));
  return c;
}

TopicConfig RunConfig::topic() const {
  TopicConfig c;
  c.dynamic_p = require(settings_.get_double("topic.dynamic_p"), "topic.dynamic_p");
  c.gamma_q = require(settings_.get_double("topic.gamma_q"), "topic.gamma_q");
  c.similarity.k = static_cast<std::size_t>(require(settings_.get_int("topic.knn_k"), "topic.knn_k"));
  c.similarity.bound_includes_diagonal =
      require(settings_.get_bool("topic.bound_includes_diagonal"), "topic.bound_includes_diagonal");
  c.top_m = static_cast<std::size_t>(require(settings_.get_int("topic.top_m"), "topic.top_m"));
  c.tokenizer.strip_urls = require(settings_.get_bool("topic.strip_urls"), "topic.strip_urls");
  c.tokenizer.strip_mentions = require(settings_.get_bool("topic.strip_mentions"), "topic.strip_mentions");
  c.tokenizer.keep_hashtags = require(settings_.get_bool("topic.keep_hashtags"), "topic.keep_hashtags");
  const auto stopwords = settings_.get_or("topic.stopwords", "");
  if (!stopwords.empty()) {
    std::ifstream f(stopwords);
    if (!f) throw Error(fmt::format("cannot open stopword list {}", stopwords));
    std::string word;
    while (f >> word) c.stopwords.push_back(word);
  }
  return c;
}

SimplexPartition RunConfig::partition() const {
  SimplexPartition p{require(settings_.get_double("strategy.vertex_threshold"), "strategy.vertex_threshold"),
                     require(settings_.get_double("strategy.edge_threshold"), "strategy.edge_threshold")};
  p.validate();
  return p;
}

std::uint64_t RunConfig::seed() const {
  const auto v = require(settings_.get_int("seed"), "seed");
  if (v < 0) throw Error("seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

RunConfig::Changepoint RunConfig::changepoint() const {
  Changepoint c;
  c.origin = parse_date(settings_.get_or("changepoint.origin", ""));
  c.first = require(settings_.get_int("changepoint.first"), "changepoint.first");
  c.change = require(settings_.get_int("changepoint.change"), "changepoint.change");
  c.last = require(settings_.get_int("changepoint.last"), "changepoint.last");
  c.sigma = require(settings_.get_double("changepoint.sigma"), "changepoint.sigma");
  const auto language = settings_.get_or("changepoint.language", "");
  if (!language.empty()) c.language = language;
  if (!(c.first >= 0 && c.first < c.change && c.change < c.last)) {
    throw Error("changepoint segments need 0 <= first < change < last");
  }
  if (!(c.sigma > 0.0)) throw Error("changepoint.sigma must be positive");
  return c;
}

void RunConfig::validate() const {
  format();
  columns();
  for (const char* w : {"pre", "post"}) cohort(w);
  const auto s = spectral();
  if (s.ma_window < 1) throw Error("spectral.ma_window must be >= 1");
  if (!(s.denoise_q >= 0.0 && s.denoise_q < 1.0)) throw Error("spectral.denoise_q must lie in [0, 1)");
  if (s.pca.dims < 1) throw Error("spectral.pca_dims must be >= 1");
  if (s.kmedoids.k < 1) throw Error("spectral.k must be >= 1");
  if (s.kmedoids.restarts < 1) throw Error("spectral.restarts must be >= 1");
  if (s.fourier_terms < 1 || s.fourier_terms > 6) throw Error("spectral.fourier_terms must lie in [1, 6]");
  const auto t = topic();
  if (!(t.dynamic_p > 0.0 && t.dynamic_p <= 1.0)) throw Error("topic.dynamic_p must lie in (0, 1]");
  if (!(t.gamma_q > 0.0 && t.gamma_q < 1.0)) throw Error("topic.gamma_q must lie in (0, 1)");
  if (t.similarity.k < 1) throw Error("topic.knn_k must be >= 1");
  partition();
  seed();
  changepoint();
  DateWindow(parse_date(settings_.get_or("synth.start", "")), parse_date(settings_.get_or("synth.end", "")));
  if (require(settings_.get_int("synth.users_per_group"), "synth.users_per_group") < 1) {
    throw Error("synth.users_per_group must be >= 1");
  }
  const double noise = require(settings_.get_double("synth.noise_weight"), "synth.noise_weight");
  if (!(noise >= 0.0 && noise <= 1.0)) throw Error("synth.noise_weight must lie in [0, 1]");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Campaign tweet dynamics: volume change points, strategy shifts, spectral and topic clusters"};
  app.name(args.empty() ? "tweetdyn" : fs::path(args.front()).filename().string());
  app.set_version_flag("--version", TWEETDYN_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir, input, format, window = "both", series, kind = "corpus";
  std::vector<std::string> overrides;
  std::optional<std::int64_t> seed;

  using Handler = void (*)(Context&, Artifacts&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"ingest", "Parse the input, tally tweet categories and cluster the retweet network", cmd_ingest},
      {"counts", "Daily tweet volume by category", cmd_counts},
      {"changepoint", "Two-segment fit of cumulative volume and slope-interval test", cmd_changepoint},
      {"strategy", "Strategy symbols per cohort and the pre/post chi-square shift", cmd_strategy},
      {"spectra", "Detrended oscillators and their spectra per cohort", cmd_spectra},
      {"cluster-spectral", "PCA + k-medoids clustering of de-noised spectra", cmd_cluster_spectral},
      {"cluster-topic", "Keyword similarity graph and modularity communities", cmd_cluster_topic},
      {"compare", "Cross-tabulate spectral and topic clusters (reads earlier artifacts)", cmd_compare},
      {"synth", "Write a synthetic corpus, series panel or aggregate", cmd_synth},
      {"report", "Merge the artifacts in the output directory into report.json", cmd_report},
  };
  std::map<CLI::App*, std::pair<std::string, Handler>> lookup;
  for (const auto& [name, help, handler] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", config_path, "key = value settings file");
    sub->add_option("-o,--out", out_dir, std::string("Output directory (default: $") + kOutputEnv + " or ./tweetdyn-out)");
    sub->add_option("--set", overrides, "Override a setting, key=value (repeatable)");
    sub->add_option("--seed", seed, "Random seed");
    if (name != "synth" && name != "report" && name != "compare") {
      sub->add_option("-i,--input", input, "Tweet records (.csv or .jsonl)");
      sub->add_option("--format", format, "auto, csv or jsonl");
    }
    if (name == "strategy" || name == "spectra" || name == "cluster-spectral" || name == "cluster-topic" ||
        name == "compare") {
      sub->add_option("-w,--window", window, "pre, post or both")->check(CLI::IsMember({"pre", "post", "both"}));
    }
    if (name == "changepoint") sub->add_option("--series", series, "Daily totals CSV (day_offset,value) instead of records");
    if (name == "synth") sub->add_option("--kind", kind, "corpus, series or changepoint")->check(CLI::IsMember({"corpus", "series", "changepoint"}));
    lookup[sub] = {name, handler};
  }

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const auto* chosen = app.get_subcommands().front();
  const auto& [command, handler] = lookup.at(const_cast<CLI::App*>(chosen));
  try {
    Context ctx;
    ctx.out = &out;
    ctx.err = &err;
    if (!config_path.empty()) ctx.config.apply(KeyValueConfig::load(config_path));
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(fmt::format("--set expects key=value, got '{}'", kv));
      ctx.config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!input.empty()) ctx.config.set("input", input);
    if (!format.empty()) ctx.config.set("format", format);
    if (seed) ctx.config.set("seed", std::to_string(*seed));
    ctx.config.validate();
    ctx.windows = window == "both" ? std::vector<std::string>{"pre", "post"} : std::vector<std::string>{window};
    if (!series.empty()) ctx.series = fs::path(series);
    ctx.synth_kind = kind;

    fs::path dir = "tweetdyn-out";
    if (const char* env = std::getenv(kOutputEnv); env && *env) dir = env;
    if (!out_dir.empty()) dir = out_dir;

    Artifacts art(dir);
    handler(ctx, art);
    write_manifest(ctx, art, command);
    art.commit();
    return 0;
  } catch (const std::exception& e) {
    err << "tweetdyn " << command << ": error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tweetdyn::cli

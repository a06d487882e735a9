#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "tweetdyn/compare.hpp"
#include "tweetdyn/spectral.hpp"
#include "tweetdyn/synth.hpp"

using namespace tweetdyn;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> cosine(std::size_t n, double bin, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    x[t] = amplitude * std::cos(2.0 * kPi * bin * static_cast<double>(t) / static_cast<double>(n) + phase);
  }
  return x;
}

std::size_t argmax_bin(const Spectrum& s) {
  const auto m = s.magnitudes();
  return static_cast<std::size_t>(std::max_element(m.begin() + 1, m.end()) - m.begin());
}

Spectrum from_magnitudes(std::vector<double> m, std::size_t n) {
  Spectrum s;
  s.n_samples = n;
  for (double v : m) s.bins.emplace_back(v, 0.0);
  return s;
}

}  // namespace

TEST(Dft, MatchesDirectSummation) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise;
  for (std::size_t n : {2u, 3u, 7u, 16u, 237u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = noise(rng);
    const auto s = dft(x);
    const auto ref = oracle::full_dft(x);
    ASSERT_EQ(s.bins.size(), n / 2 + 1);
    for (std::size_t k = 0; k < s.bins.size(); ++k) EXPECT_LT(std::abs(s.bins[k] - ref[k]), 1e-9 * n);
  }
}

TEST(Dft, PureCosinePeaksAtPlantedBin) {
  const auto s = dft(cosine(237, 61));
  EXPECT_EQ(argmax_bin(s), 61u);
  EXPECT_NEAR(std::abs(s.bins[61]), 237.0 / 2.0, 1e-9);
}

TEST(Dft, ZeroSeriesZeroSpectrum) {
  for (double m : dft(std::vector<double>(50, 0.0)).magnitudes()) EXPECT_EQ(m, 0.0);
}

TEST(Dft, ParsevalFromHalfSpectrum) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (std::size_t n : {236u, 237u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = noise(rng);
    const auto sq = dft(x).squared_magnitudes();
    double energy = 0.0, spectral = 0.0;
    for (double v : x) energy += v * v;
    for (std::size_t k = 0; k < sq.size(); ++k) {
      const bool self_paired = k == 0 || (n % 2 == 0 && k == n / 2);
      spectral += (self_paired ? 1.0 : 2.0) * sq[k];
    }
    EXPECT_NEAR(spectral / static_cast<double>(n), energy, 1e-9 * energy);
  }
}

TEST(Dft, InverseRecoversSeries) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> noise;
  for (std::size_t n : {10u, 11u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = noise(rng);
    const auto back = inverse_dft(dft(x));
    for (std::size_t t = 0; t < n; ++t) EXPECT_NEAR(back[t], x[t], 1e-12);
  }
}

TEST(Quantile, LowerEmpiricalDefinition) {
  const std::vector<double> v{3, 1, 2};
  EXPECT_EQ(lower_quantile(v, 0.34), 2.0);
  EXPECT_EQ(lower_quantile(v, 0.33), 1.0);
  EXPECT_EQ(lower_quantile(v, 1.0), 3.0);
  EXPECT_TRUE(std::isinf(lower_quantile(v, 0.0)));
}

TEST(Denoise, ZeroQuantileIsIdentity) {
  const auto s = dft(cosine(40, 3));
  EXPECT_EQ(denoise(s, 0.0).bins, s.bins);
}

TEST(Denoise, SmallestOfThreeDropped) {
  const auto d = denoise(from_magnitudes({1, 2, 3}, 4), 0.34);
  EXPECT_EQ(d.magnitudes(), (std::vector<double>{0, 2, 3}));
}

TEST(Denoise, PlantedTonesSurvive) {
  const std::size_t n = 237;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise;
    auto x = cosine(n, 34, 4.0);
    const auto b = cosine(n, 59, 3.0, 1.0), c = cosine(n, 95, 3.0, 2.0);
    for (std::size_t t = 0; t < n; ++t) x[t] += b[t] + c[t] + noise(rng);
    const auto d = denoise(dft(x), 0.33);
    for (std::size_t k : {34u, 59u, 95u}) EXPECT_GT(std::abs(d.bins[k]), 0.0) << "seed " << seed << " bin " << k;
  }
}

TEST(Pca, PlanarDataHasTwoNonzeroEigenvalues) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise;
  Eigen::VectorXd u(5), v(5);
  u << 1, 2, 0, -1, 3;
  v << 0, 1, 1, 4, -2;
  Eigen::MatrixXd data(40, 5);
  for (int i = 0; i < 40; ++i) data.row(i) = (noise(rng) * u + noise(rng) * v).transpose();
  const auto e = pca_embed(data, {.dims = 3});
  EXPECT_EQ(e.eigenvalues.size(), 5);
  for (int i = 2; i < 5; ++i) EXPECT_NEAR(e.eigenvalues(i), 0.0, 1e-9 * e.eigenvalues(0));
  EXPECT_EQ(e.dims(), 2u);
  EXPECT_FALSE(e.warnings.empty());
}

TEST(Pca, DuplicateRowsEmbedIdentically) {
  Eigen::MatrixXd data(6, 4);
  data << 1, 2, 3, 4, 1, 2, 3, 4, 0, 1, 0, 1, 5, 3, 2, 2, 7, 0, 1, 3, 2, 2, 9, 1;
  const auto e = pca_embed(data, {.dims = 3});
  EXPECT_LT((e.points.row(0) - e.points.row(1)).norm(), 1e-12);
}

TEST(Pca, ComponentsOrthonormalAndVarianceMatches) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise;
  Eigen::MatrixXd data(30, 6);
  for (int i = 0; i < 30; ++i) {
    for (int j = 0; j < 6; ++j) data(i, j) = noise(rng) * (j + 1);
  }
  const auto e = pca_embed(data, {.dims = 3});
  EXPECT_LT((e.components.transpose() * e.components - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-10);
  for (int d = 0; d < 3; ++d) {
    const double var = e.points.col(d).squaredNorm() / 29.0;
    EXPECT_NEAR(var, e.eigenvalues(d), 1e-9 * e.eigenvalues(0));
  }
  for (int i = 1; i < e.eigenvalues.size(); ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
}

TEST(Pca, FourGroupSpectraSeparate) {
  std::vector<GroupSpec> groups(4);
  const std::vector<std::vector<double>> periods = {{}, {4.0}, {7.0, 4.0}, {7.0, 2.5}};
  for (std::size_t g = 0; g < 4; ++g) {
    groups[g].group_id = std::to_string(g);
    groups[g].drift = {{0, 12.0}};
    groups[g].noise_sigma = g == 0 ? 3.0 : 1.5;
    for (double p : periods[g]) groups[g].components.push_back(FrequencyComponent::with_period(p, 4.0, 6.0));
  }
  const auto synth = generate_series(groups, DateWindow::parse("2016-03-09", "2016-11-07"), 17);
  std::vector<Spectrum> denoised;
  std::vector<std::string> label;
  for (const auto& [user, s] : synth.series) {
    denoised.push_back(denoise(dft(detrend(s, 7)), 0.33));
    label.push_back(synth.labels.at(user));
  }
  const auto e = pca_embed(magnitude_matrix(denoised), {.dims = 3});
  Eigen::RowVectorXd grand = e.points.colwise().mean();
  double between = 0.0, within = 0.0;
  for (std::size_t g = 0; g < 4; ++g) {
    Eigen::RowVectorXd centre = Eigen::RowVectorXd::Zero(3);
    int n = 0;
    for (std::size_t i = 0; i < label.size(); ++i) {
      if (label[i] == std::to_string(g)) {
        centre += e.points.row(static_cast<Eigen::Index>(i));
        ++n;
      }
    }
    centre /= n;
    between += n * (centre - grand).squaredNorm();
    for (std::size_t i = 0; i < label.size(); ++i) {
      if (label[i] == std::to_string(g)) within += (e.points.row(static_cast<Eigen::Index>(i)) - centre).squaredNorm();
    }
  }
  EXPECT_GT(between / within, 10.0);
}

TEST(KMedoids, SingleClusterPicksMinimumSumPoint) {
  Eigen::MatrixXd pts(5, 1);
  pts << 0, 1, 2, 10, 11;
  const std::vector<std::string> ids{"a", "b", "c", "d", "e"};
  const auto c = kmedoids(ids, pts, {.k = 1});
  EXPECT_EQ(c.medoids, std::vector<std::string>{"c"});
  EXPECT_DOUBLE_EQ(c.objective, 2 + 1 + 0 + 8 + 9);
}

TEST(KMedoids, FourBlobsRecovered) {
  Eigen::MatrixXd pts(8, 2);
  pts << 0, 0, 0.1, 0, 10, 0, 10, 0.1, 0, 10, 0.1, 10, 10, 10, 10.1, 10;
  const std::vector<std::string> ids{"p0", "p1", "p2", "p3", "p4", "p5", "p6", "p7"};
  const auto c = kmedoids(ids, pts, {.k = 4});
  for (int i = 0; i < 8; i += 2) EXPECT_EQ(c.labels.at(ids[i]), c.labels.at(ids[i + 1]));
  std::set<int> distinct;
  for (const auto& [id, l] : c.labels) distinct.insert(l);
  EXPECT_EQ(distinct.size(), 4u);
}

TEST(KMedoids, MatchesExhaustiveSearch) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 3 + trial % 5;
    const std::size_t k = 1 + trial % std::min<std::size_t>(n - 1, 3);
    std::vector<std::vector<double>> raw(n, std::vector<double>(2));
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(n), 2);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
      for (int d = 0; d < 2; ++d) pts(static_cast<Eigen::Index>(i), d) = raw[i][d] = u(rng);
      ids.push_back("q" + std::to_string(i));
    }
    EXPECT_NEAR(kmedoids(ids, pts, {.k = k}).objective, oracle::best_kmedoids(raw, k), 1e-9) << "trial " << trial;
  }
}

TEST(KMedoids, InvariantToInputOrder) {
  Eigen::MatrixXd pts(6, 1);
  pts << 0, 5, 1, 6, 2, 20;
  std::vector<std::string> ids{"a", "b", "c", "d", "e", "f"};
  const auto c1 = kmedoids(ids, pts, {.k = 3});
  Eigen::MatrixXd rev = pts.colwise().reverse();
  std::vector<std::string> rids(ids.rbegin(), ids.rend());
  const auto c2 = kmedoids(rids, rev, {.k = 3});
  EXPECT_EQ(c1.labels, c2.labels);
  EXPECT_EQ(c1.medoids, c2.medoids);
}

TEST(KMedoids, RejectsImpossibleRequests) {
  Eigen::MatrixXd pts(3, 1);
  pts << 1, 1, 1;
  const std::vector<std::string> ids{"a", "b", "c"};
  EXPECT_THROW(kmedoids(ids, pts, {.k = 2}), Error);
  EXPECT_THROW(kmedoids(std::vector<std::string>{"a", "a", "c"}, pts, {.k = 1}), Error);
}

TEST(Fourier, SingleCosine) {
  const std::size_t n = 237;
  const auto x = cosine(n, 61, 3.0, 0.7);
  const auto fit = fit_fourier(x, denoise(dft(x), 0.33), 6);
  ASSERT_EQ(fit.terms.size(), 1u);
  EXPECT_NEAR(fit.terms[0].amplitude, 3.0, 1e-9);
  EXPECT_NEAR(fit.terms[0].frequency, 2.0 * kPi * 61 / n, 1e-12);
  EXPECT_NEAR(fit.terms[0].phase, 0.7, 1e-9);
  EXPECT_NEAR(fit.residual_sigma, 0.0, 1e-9);
  EXPECT_NEAR(fit.evaluate(5.0), x[5], 1e-9);
}

TEST(Fourier, ZeroSeries) {
  const std::vector<double> x(50, 0.0);
  const auto fit = fit_fourier(x, dft(x), 6);
  EXPECT_TRUE(fit.terms.empty());
  EXPECT_EQ(fit.residual_sigma, 0.0);
}

TEST(Fourier, ResidualReflectsNoise) {
  const std::size_t n = 237;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise;
    auto x = cosine(n, 34, 5.0);
    const auto b = cosine(n, 59, 4.0, 1.0), c = cosine(n, 95, 4.0, 2.0);
    for (std::size_t t = 0; t < n; ++t) x[t] += b[t] + c[t] + noise(rng);
    const auto fit = fit_fourier(x, denoise(dft(x), 0.33), 3);
    ASSERT_EQ(fit.terms.size(), 3u);
    EXPECT_GE(fit.residual_sigma, 0.8);
    EXPECT_LE(fit.residual_sigma, 1.3);
  }
}

TEST(Bands, OneAndTwoMembers) {
  const auto a = from_magnitudes({1, 2, 3}, 4), b = from_magnitudes({3, 2, 5}, 4);
  const std::vector<Spectrum> one{a}, two{a, b};
  for (const auto& s : band_summary(one)) EXPECT_TRUE(s.min == s.q1 && s.q1 == s.median && s.median == s.q3 && s.q3 == s.max);
  const auto bands = band_summary(two);
  EXPECT_DOUBLE_EQ(bands[0].median, 2.0);
  EXPECT_DOUBLE_EQ(bands[2].median, 4.0);
  EXPECT_DOUBLE_EQ(bands[2].q1, 3.5);
}

TEST(Bands, WeeklyClusterPeaksNearSeventhBin) {
  GroupSpec g;
  g.drift = {{0, 12}};
  g.noise_sigma = 1.0;
  g.components = {FrequencyComponent::with_period(7.0, 4.0, 6.0)};
  const auto synth = generate_series(g, DateWindow::parse("2016-03-09", "2016-11-07"), 8);
  std::vector<Spectrum> spectra;
  for (const auto& [u, s] : synth.series) spectra.push_back(dft(detrend(s, 7)));
  const auto bands = band_summary(spectra);
  std::size_t best = 1;
  for (std::size_t k = 1; k < bands.size(); ++k) {
    if (bands[k].median > bands[best].median) best = k;
  }
  EXPECT_EQ(best, static_cast<std::size_t>(std::lround(237.0 / 7.0)));
}

TEST(Period, FromPeakBin) {
  std::vector<double> m(123, 0.0);
  m[61] = 1.0;
  EXPECT_DOUBLE_EQ(dominant_period(m, 244), 4.0);
  m[61] = 0.0;
  m[35] = 1.0;
  EXPECT_NEAR(dominant_period(m, 244), 7.0, 0.05);
  EXPECT_DOUBLE_EQ(dominant_period(dft(cosine(240, 80))), 3.0);
  EXPECT_THROW(dominant_period(std::vector<double>(10, 0.0), 18), Error);
}

TEST(SpectraCsv, RoundTripKeepsMagnitudes) {
  const std::vector<Spectrum> s{dft(cosine(20, 3), "a"), dft(cosine(20, 5), "b")};
  std::stringstream buf;
  write_spectra_csv(buf, s);
  const auto back = read_spectra_csv(buf);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].user_id, s[i].user_id);
    const auto m0 = s[i].magnitudes(), m1 = back[i].magnitudes();
    for (std::size_t k = 0; k < m0.size(); ++k) EXPECT_NEAR(m0[k], m1[k], 1e-9 * (1 + m0[k]));
  }
}

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tweetdyn/json_util.hpp"
#include "tweetdyn/timeseries.hpp"

namespace tweetdyn {

/// Half spectrum of a real series: bins k = 0 .. floor(N/2) of the
/// unnormalized forward DFT X_k = sum_t x_t exp(-2 pi i k t / N).
struct Spectrum {
  std::string user_id;
  std::size_t n_samples = 0;
  std::vector<std::complex<double>> bins;

  std::vector<double> magnitudes() const;
  std::vector<double> squared_magnitudes() const;
};

Spectrum dft(std::span<const double> values, std::string user_id = {});
Spectrum dft(const OscillatorSeries& series);

/// Rebuilds the real series from its half spectrum.
std::vector<double> inverse_dft(const Spectrum& spectrum);

/// Empirical inverse CDF: the smallest v with F(v) >= q, i.e. the
/// ceil(q * n)-th smallest value. Returns -infinity for q == 0.
double lower_quantile(std::span<const double> values, double q);

/// Zeroes every bin whose squared magnitude is strictly below the q-quantile
/// of all squared magnitudes. Bins tied with the quantile survive.
Spectrum denoise(const Spectrum& spectrum, double q = 0.33);

/// Rows = users, columns = magnitude bins. All spectra must share n_samples.
Eigen::MatrixXd magnitude_matrix(std::span<const Spectrum> spectra);

struct PcaOptions {
  std::size_t dims = 3;
  /// Scale each row to unit Euclidean norm before centering.
  bool normalize_rows = false;
};

struct Embedding {
  Eigen::MatrixXd points;       // rows x dims
  Eigen::VectorXd eigenvalues;  // all covariance eigenvalues, descending, >= 0
  Eigen::MatrixXd components;   // features x dims, orthonormal columns
  Eigen::RowVectorXd mean;      // column means removed before projection
  std::vector<std::string> warnings;

  std::size_t dims() const { return static_cast<std::size_t>(points.cols()); }
};

/// Covariance (divisor n - 1) eigendecomposition of the column-centred data,
/// projected onto the leading `dims` axes. When the data have rank below
/// `dims`, only the nonzero axes are kept and a warning is recorded.
Embedding pca_embed(const Eigen::MatrixXd& data, const PcaOptions& options = {});

struct KMedoidsOptions {
  std::size_t k = 4;
  std::size_t restarts = 10;
  std::uint64_t seed = 20190601;
  std::size_t max_swaps = 10000;
};

struct ClusterAssignment {
  std::map<std::string, int> labels;  // user -> cluster 1..k
  std::vector<std::string> medoids;   // medoids[c - 1] is the medoid of cluster c
  double objective = 0.0;             // sum of distances to the assigned medoid
  /// Objective after the initial assignment and after every accepted swap of
  /// the winning restart.
  std::vector<double> objective_trace;

  std::vector<std::string> members(int cluster) const;
  Json to_json() const;
};

/// PAM k-medoids (BUILD + SWAP) with Euclidean distance. Restart 0 starts
/// from BUILD, further restarts from seeded random medoids; the lowest
/// objective wins. Points are processed in id order so the result does not
/// depend on input order. Clusters are numbered by their first member in id
/// order.
ClusterAssignment kmedoids(std::span<const std::string> ids, const Eigen::MatrixXd& points,
                           const KMedoidsOptions& options = {});

struct FourierTerm {
  std::size_t bin = 0;
  double amplitude = 0.0;  // tweets
  double frequency = 0.0;  // radians per day
  double phase = 0.0;      // radians
};

/// xi(t) ~ sum_j A_j cos(omega_j t + phi_j).
struct FourierModel {
  std::vector<FourierTerm> terms;
  double residual_sigma = 0.0;

  double evaluate(double t) const;
  Json to_json() const;
};

/// Reads the `max_terms` largest surviving bins of `denoised` directly off
/// the DFT grid. Bins below 1e-9 of the peak magnitude count as zero; fewer
/// nonzero bins than requested means fewer terms.
FourierModel fit_fourier(std::span<const double> values, const Spectrum& denoised,
                         std::size_t max_terms = 6);

struct BandStats {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Five-number summary of magnitudes per bin across the members (quartiles
/// by linear interpolation between order statistics).
std::vector<BandStats> band_summary(std::span<const Spectrum> members);
void write_band_summary_csv(std::ostream& out, std::span<const BandStats> bands);

/// n_samples / k for the largest-magnitude bin k >= 1.
double dominant_period(const Spectrum& spectrum);
double dominant_period(std::span<const double> magnitudes, std::size_t n_samples);

struct SpectralConfig {
  int ma_window = 7;
  double denoise_q = 0.33;
  PcaOptions pca;
  KMedoidsOptions kmedoids;
  std::size_t fourier_terms = 6;
};

struct SpectralClustering {
  std::vector<std::string> users;        // sorted
  std::vector<OscillatorSeries> oscillators;
  std::vector<Spectrum> spectra;         // raw DFT per user
  std::vector<Spectrum> denoised;        // de-noised DFT per user
  std::vector<FourierModel> fits;
  Embedding embedding;
  ClusterAssignment clusters;
  std::map<int, std::vector<BandStats>> bands;  // per cluster, de-noised magnitudes
};

/// detrend -> DFT -> de-noise -> PCA -> k-medoids, plus Fourier fits and
/// per-cluster band summaries.
SpectralClustering cluster_spectra(const std::map<std::string, CountSeries>& series,
                                   const SpectralConfig& config = {});

/// `user_id,n_samples,bin,magnitude` rows.
void write_spectra_csv(std::ostream& out, std::span<const Spectrum> spectra);
/// Parses `write_spectra_csv` output. Phase is not stored, so bins come back
/// as nonnegative reals.
std::vector<Spectrum> read_spectra_csv(std::istream& in);

}  // namespace tweetdyn

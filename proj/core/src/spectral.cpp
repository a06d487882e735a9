#include "tweetdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <set>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <fmt/format.h>

#include "tweetdyn/csv.hpp"

namespace tweetdyn {

std::vector<double> Spectrum::magnitudes() const {
  std::vector<double> out(bins.size());
  std::transform(bins.begin(), bins.end(), out.begin(), [](auto c) { return std::abs(c); });
  return out;
}

std::vector<double> Spectrum::squared_magnitudes() const {
  std::vector<double> out(bins.size());
  std::transform(bins.begin(), bins.end(), out.begin(), [](auto c) { return std::norm(c); });
  return out;
}

Spectrum dft(std::span<const double> values, std::string user_id) {
  const std::size_t n = values.size();
  if (n < 2) throw Error("DFT needs at least two samples");
  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
    cos_table[m] = std::cos(angle);
    sin_table[m] = std::sin(angle);
  }
  Spectrum out{std::move(user_id), n, std::vector<std::complex<double>>(n / 2 + 1)};
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    std::size_t idx = 0;  // (k * t) mod n
    for (std::size_t t = 0; t < n; ++t) {
      re += values[t] * cos_table[idx];
      im -= values[t] * sin_table[idx];
      idx += k;
      if (idx >= n) idx -= n;
    }
    out.bins[k] = {re, im};
  }
  return out;
}

Spectrum dft(const OscillatorSeries& series) {
  return dft(series.values, series.user_id.value_or(""));
}

std::vector<double> inverse_dft(const Spectrum& spectrum) {
  const std::size_t n = spectrum.n_samples;
  if (spectrum.bins.size() != n / 2 + 1) throw Error("spectrum bin count does not match n_samples");
  std::vector<double> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = spectrum.bins[0].real();
    std::size_t idx = 0;
    for (std::size_t k = 1; k <= n / 2; ++k) {
      idx += t;
      if (idx >= n) idx %= n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(n);
      const double term = spectrum.bins[k].real() * std::cos(angle) - spectrum.bins[k].imag() * std::sin(angle);
      const bool nyquist = n % 2 == 0 && k == n / 2;
      acc += nyquist ? term : 2.0 * term;
    }
    out[t] = acc / static_cast<double>(n);
  }
  return out;
}

double lower_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw Error("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw Error(fmt::format("quantile level {} outside [0, 1]", q));
  if (q == 0.0) return -std::numeric_limits<double>::infinity();
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  // rank = ceil(q n), guarded against q n landing a hair above an integer
  auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Spectrum denoise(const Spectrum& spectrum, double q) {
  if (!(q >= 0.0 && q < 1.0)) throw Error(fmt::format("de-noising quantile {} outside [0, 1)", q));
  Spectrum out = spectrum;
  if (q == 0.0 || out.bins.empty()) return out;
  const auto sq = spectrum.squared_magnitudes();
  const double threshold = lower_quantile(sq, q);
  for (std::size_t k = 0; k < sq.size(); ++k) {
    if (sq[k] < threshold) out.bins[k] = 0.0;
  }
  return out;
}

Eigen::MatrixXd magnitude_matrix(std::span<const Spectrum> spectra) {
  if (spectra.empty()) return {};
  const std::size_t n_samples = spectra.front().n_samples;
  const std::size_t cols = spectra.front().bins.size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(spectra.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < spectra.size(); ++i) {
    if (spectra[i].n_samples != n_samples || spectra[i].bins.size() != cols) {
      throw Error(fmt::format("spectrum '{}' has {} samples; expected {}", spectra[i].user_id,
                              spectra[i].n_samples, n_samples));
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = std::abs(spectra[i].bins[k]);
    }
  }
  return m;
}

Embedding pca_embed(const Eigen::MatrixXd& data, const PcaOptions& options) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (options.dims == 0) throw Error("PCA needs dims >= 1");
  if (n < static_cast<Eigen::Index>(options.dims) + 1) {
    throw Error(fmt::format("PCA to {} dims needs at least {} rows, got {}", options.dims,
                            options.dims + 1, n));
  }
  if (d == 0) throw Error("PCA input has no columns");

  Eigen::MatrixXd x = data;
  if (options.normalize_rows) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double norm = x.row(i).norm();
      if (norm > 0.0) x.row(i) /= norm;
    }
  }

  Embedding out;
  out.mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - out.mean;
  const Eigen::MatrixXd cov = (centered.adjoint() * centered) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw Error("covariance eigendecomposition failed");

  // Eigen returns ascending order
  out.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();

  const double top = out.eigenvalues.size() ? out.eigenvalues(0) : 0.0;
  const double tol = top * 1e-10 * static_cast<double>(std::max(n, d));
  Eigen::Index rank = 0;
  while (rank < out.eigenvalues.size() && out.eigenvalues(rank) > tol) ++rank;
  for (Eigen::Index i = rank; i < out.eigenvalues.size(); ++i) out.eigenvalues(i) = 0.0;

  Eigen::Index dims = static_cast<Eigen::Index>(options.dims);
  if (rank < dims) {
    out.warnings.push_back(
        fmt::format("data rank {} is below the requested {} dimensions; embedding uses {}", rank,
                    dims, rank));
    dims = rank;
  }
  out.components = vectors.leftCols(dims);
  // fix each axis' sign so its largest-magnitude loading is positive
  for (Eigen::Index c = 0; c < dims; ++c) {
    Eigen::Index arg = 0;
    out.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.components(arg, c) < 0.0) out.components.col(c) *= -1.0;
  }
  out.points = centered * out.components;
  return out;
}

namespace {

using DistanceMatrix = std::vector<std::vector<double>>;

struct PamState {
  std::vector<std::size_t> medoids;  // sorted point indices
  std::vector<std::size_t> owner;    // position in `medoids` for each point
  double objective = 0.0;
  std::vector<double> trace;
};

double assign(const DistanceMatrix& dist, PamState& state) {
  const std::size_t n = dist.size();
  std::sort(state.medoids.begin(), state.medoids.end());
  state.owner.assign(n, 0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < state.medoids.size(); ++m) {
      if (state.medoids[m] == i) {
        best = m;
        best_d = 0.0;
        break;
      }
      if (dist[i][state.medoids[m]] < best_d) {
        best_d = dist[i][state.medoids[m]];
        best = m;
      }
    }
    state.owner[i] = best;
    total += best_d;
  }
  state.objective = total;
  return total;
}

double objective_with(const DistanceMatrix& dist, const std::vector<std::size_t>& medoids) {
  double total = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (auto m : medoids) best = std::min(best, dist[i][m]);
    total += best;
  }
  return total;
}

std::vector<std::size_t> pam_build(const DistanceMatrix& dist, std::size_t k) {
  const std::size_t n = dist.size();
  std::vector<std::size_t> medoids;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  std::size_t first = 0;
  double first_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double cost = std::accumulate(dist[i].begin(), dist[i].end(), 0.0);
    if (cost < first_cost) {
      first_cost = cost;
      first = i;
    }
  }
  medoids.push_back(first);
  for (std::size_t j = 0; j < n; ++j) nearest[j] = dist[j][first];

  while (medoids.size() < k) {
    std::size_t best = n;
    double best_gain = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] == 0.0) continue;  // already a medoid or a duplicate of one
      double gain = 0.0;
      for (std::size_t j = 0; j < n; ++j) gain += std::max(0.0, nearest[j] - dist[i][j]);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    medoids.push_back(best);
    for (std::size_t j = 0; j < n; ++j) nearest[j] = std::min(nearest[j], dist[j][best]);
  }
  return medoids;
}

void pam_swap(const DistanceMatrix& dist, PamState& state, std::size_t max_swaps) {
  const std::size_t n = dist.size();
  assign(dist, state);
  state.trace.push_back(state.objective);
  for (std::size_t iter = 0; iter < max_swaps; ++iter) {
    double best_obj = state.objective;
    std::size_t best_m = 0, best_h = n;
    std::vector<std::size_t> trial = state.medoids;
    for (std::size_t m = 0; m < state.medoids.size(); ++m) {
      for (std::size_t h = 0; h < n; ++h) {
        if (std::find(state.medoids.begin(), state.medoids.end(), h) != state.medoids.end()) continue;
        trial[m] = h;
        const double obj = objective_with(dist, trial);
        if (obj < best_obj - 1e-12 * (1.0 + std::abs(best_obj))) {
          best_obj = obj;
          best_m = m;
          best_h = h;
        }
      }
      trial[m] = state.medoids[m];
    }
    if (best_h == n) break;
    state.medoids[best_m] = best_h;
    assign(dist, state);
    state.trace.push_back(state.objective);
  }
}

}  // namespace

std::vector<std::string> ClusterAssignment::members(int cluster) const {
  std::vector<std::string> out;
  for (const auto& [user, label] : labels) {
    if (label == cluster) out.push_back(user);
  }
  return out;
}

Json ClusterAssignment::to_json() const {
  Json clusters = Json::array();
  for (std::size_t c = 0; c < medoids.size(); ++c) {
    clusters.push_back({{"cluster", c + 1},
                        {"medoid", medoids[c]},
                        {"members", members(static_cast<int>(c + 1))}});
  }
  Json label_obj = Json::object();
  for (const auto& [user, label] : labels) label_obj[user] = label;
  return Json{{"k", medoids.size()},
              {"objective", round_sig(objective)},
              {"clusters", std::move(clusters)},
              {"labels", std::move(label_obj)}};
}

ClusterAssignment kmedoids(std::span<const std::string> ids, const Eigen::MatrixXd& points,
                           const KMedoidsOptions& options) {
  const std::size_t n = ids.size();
  if (static_cast<std::size_t>(points.rows()) != n) throw Error("kmedoids: ids and points differ in size");
  if (options.k == 0) throw Error("kmedoids: k must be >= 1");
  if (n < options.k) throw Error(fmt::format("kmedoids: {} points for k = {}", n, options.k));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ids[a] < ids[b]; });
  for (std::size_t i = 1; i < n; ++i) {
    if (ids[order[i]] == ids[order[i - 1]]) throw Error(fmt::format("duplicate id '{}'", ids[order[i]]));
  }

  DistanceMatrix dist(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double d = (points.row(static_cast<Eigen::Index>(order[a])) -
                        points.row(static_cast<Eigen::Index>(order[b])))
                           .norm();
      dist[a][b] = dist[b][a] = d;
    }
  }

  // one representative per distinct coordinate
  std::vector<std::size_t> distinct;
  for (std::size_t a = 0; a < n; ++a) {
    bool dup = false;
    for (auto r : distinct) {
      if (dist[a][r] == 0.0 &&
          points.row(static_cast<Eigen::Index>(order[a])) == points.row(static_cast<Eigen::Index>(order[r]))) {
        dup = true;
        break;
      }
    }
    if (!dup) distinct.push_back(a);
  }
  if (distinct.size() < options.k) {
    throw Error(fmt::format("kmedoids: k = {} exceeds the {} distinct points", options.k, distinct.size()));
  }

  boost::random::mt19937_64 rng(options.seed);
  PamState best;
  bool have_best = false;
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  for (std::size_t r = 0; r < restarts; ++r) {
    PamState state;
    if (r == 0) {
      state.medoids = pam_build(dist, options.k);
    } else {
      std::vector<std::size_t> pool = distinct;
      for (std::size_t i = 0; i < options.k; ++i) {
        boost::random::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      state.medoids.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(options.k));
    }
    pam_swap(dist, state, options.max_swaps);
    if (!have_best || state.objective < best.objective - 1e-12 * (1.0 + std::abs(best.objective))) {
      best = std::move(state);
      have_best = true;
    }
  }

  ClusterAssignment out;
  out.objective = best.objective;
  out.objective_trace = best.trace;
  std::vector<int> label_of_medoid(best.medoids.size(), 0);
  int next = 1;
  out.medoids.resize(best.medoids.size());
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t m = best.owner[a];
    if (label_of_medoid[m] == 0) {
      label_of_medoid[m] = next++;
      out.medoids[static_cast<std::size_t>(label_of_medoid[m] - 1)] = ids[order[best.medoids[m]]];
    }
    out.labels[ids[order[a]]] = label_of_medoid[m];
  }
  return out;
}

double FourierModel::evaluate(double t) const {
  double acc = 0.0;
  for (const auto& term : terms) acc += term.amplitude * std::cos(term.frequency * t + term.phase);
  return acc;
}

Json FourierModel::to_json() const {
  Json arr = Json::array();
  for (const auto& term : terms) {
    arr.push_back({{"bin", term.bin},
                   {"amplitude", round_sig(term.amplitude)},
                   {"frequency", round_sig(term.frequency)},
                   {"phase", round_sig(term.phase)}});
  }
  return Json{{"terms", std::move(arr)}, {"residual_sigma", round_sig(residual_sigma)}};
}

FourierModel fit_fourier(std::span<const double> values, const Spectrum& denoised,
                         std::size_t max_terms) {
  if (max_terms < 1) throw Error("fit_fourier needs at least one term");
  const std::size_t n = denoised.n_samples;
  if (values.size() != n) {
    throw Error(fmt::format("series has {} samples but the spectrum was built from {}", values.size(), n));
  }
  // bins at rounding-noise level relative to the peak carry no signal
  double peak = 0.0;
  for (const auto& b : denoised.bins) peak = std::max(peak, std::abs(b));
  const double floor = peak * 1e-9;
  std::vector<std::size_t> candidates;
  for (std::size_t k = 0; k < denoised.bins.size(); ++k) {
    if (std::abs(denoised.bins[k]) > floor) candidates.push_back(k);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](auto a, auto b) {
    return std::abs(denoised.bins[a]) > std::abs(denoised.bins[b]);
  });
  if (candidates.size() > max_terms) candidates.resize(max_terms);

  FourierModel model;
  const double dn = static_cast<double>(n);
  for (auto k : candidates) {
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    const double mag = std::abs(denoised.bins[k]);
    model.terms.push_back({k, (unpaired ? 1.0 : 2.0) * mag / dn,
                           2.0 * std::numbers::pi * static_cast<double>(k) / dn,
                           std::arg(denoised.bins[k])});
  }

  if (n > 1) {
    std::vector<double> residual(n);
    for (std::size_t t = 0; t < n; ++t) residual[t] = values[t] - model.evaluate(static_cast<double>(t));
    const double mean = std::accumulate(residual.begin(), residual.end(), 0.0) / dn;
    double ss = 0.0;
    for (double r : residual) ss += (r - mean) * (r - mean);
    model.residual_sigma = std::sqrt(ss / (dn - 1.0));
  }
  return model;
}

namespace {

double interpolated_quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

std::vector<BandStats> band_summary(std::span<const Spectrum> members) {
  if (members.empty()) throw Error("band summary of an empty cluster");
  const std::size_t bins = members.front().bins.size();
  for (const auto& m : members) {
    if (m.bins.size() != bins) throw Error("band summary members have different bin counts");
  }
  std::vector<BandStats> out(bins);
  std::vector<double> column(members.size());
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t i = 0; i < members.size(); ++i) column[i] = std::abs(members[i].bins[k]);
    std::sort(column.begin(), column.end());
    out[k] = {column.front(), interpolated_quantile(column, 0.25), interpolated_quantile(column, 0.5),
              interpolated_quantile(column, 0.75), column.back()};
  }
  return out;
}

void write_band_summary_csv(std::ostream& out, std::span<const BandStats> bands) {
  out << "bin,min,q1,median,q3,max\n";
  for (std::size_t k = 0; k < bands.size(); ++k) {
    const auto& b = bands[k];
    out << k << ',' << format_real(b.min) << ',' << format_real(b.q1) << ',' << format_real(b.median)
        << ',' << format_real(b.q3) << ',' << format_real(b.max) << '\n';
  }
}

double dominant_period(std::span<const double> magnitudes, std::size_t n_samples) {
  std::size_t best = 0;
  double best_mag = 0.0;
  for (std::size_t k = 1; k < magnitudes.size(); ++k) {
    if (magnitudes[k] > best_mag) {
      best_mag = magnitudes[k];
      best = k;
    }
  }
  if (best == 0) throw Error("dominant period of an all-zero spectrum");
  return static_cast<double>(n_samples) / static_cast<double>(best);
}

double dominant_period(const Spectrum& spectrum) {
  return dominant_period(spectrum.magnitudes(), spectrum.n_samples);
}

SpectralClustering cluster_spectra(const std::map<std::string, CountSeries>& series,
                                   const SpectralConfig& config) {
  SpectralClustering out;
  for (const auto& [user, s] : series) {
    out.users.push_back(user);
    out.oscillators.push_back(detrend(s, config.ma_window));
    out.oscillators.back().user_id = user;
    out.spectra.push_back(dft(out.oscillators.back()));
    out.denoised.push_back(denoise(out.spectra.back(), config.denoise_q));
    out.fits.push_back(fit_fourier(out.oscillators.back().values, out.denoised.back(),
                                   config.fourier_terms));
  }
  out.embedding = pca_embed(magnitude_matrix(out.denoised), config.pca);
  out.clusters = kmedoids(out.users, out.embedding.points, config.kmedoids);
  for (std::size_t c = 1; c <= out.clusters.medoids.size(); ++c) {
    std::vector<Spectrum> members;
    for (std::size_t i = 0; i < out.users.size(); ++i) {
      if (out.clusters.labels.at(out.users[i]) == static_cast<int>(c)) members.push_back(out.denoised[i]);
    }
    out.bands[static_cast<int>(c)] = band_summary(members);
  }
  return out;
}

void write_spectra_csv(std::ostream& out, std::span<const Spectrum> spectra) {
  out << "user_id,n_samples,bin,magnitude\n";
  for (const auto& s : spectra) {
    const std::string user = csv_escape(s.user_id);
    for (std::size_t k = 0; k < s.bins.size(); ++k) {
      out << user << ',' << s.n_samples << ',' << k << ',' << format_real(std::abs(s.bins[k])) << '\n';
    }
  }
}

std::vector<Spectrum> read_spectra_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row) || row.size() != 4 || row[0] != "user_id") {
    throw Error("spectra CSV must start with header 'user_id,n_samples,bin,magnitude'");
  }
  std::vector<Spectrum> out;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 4) throw Error(fmt::format("spectra CSV line {}: expected 4 fields", reader.record_line()));
    std::size_t n = 0, bin = 0;
    double mag = 0.0;
    try {
      n = std::stoul(row[1]);
      bin = std::stoul(row[2]);
      mag = std::stod(row[3]);
    } catch (const std::logic_error&) {
      throw Error(fmt::format("spectra CSV line {}: not a number", reader.record_line()));
    }
    if (out.empty() || out.back().user_id != row[0]) out.push_back({row[0], n, {}});
    auto& s = out.back();
    if (s.n_samples != n || bin != s.bins.size()) {
      throw Error(fmt::format("spectra CSV line {}: bins of '{}' are not contiguous", reader.record_line(), row[0]));
    }
    s.bins.emplace_back(mag, 0.0);
  }
  for (const auto& s : out) {
    if (s.bins.size() != s.n_samples / 2 + 1) {
      throw Error(fmt::format("spectra CSV: '{}' has {} bins, expected {}", s.user_id, s.bins.size(),
                              s.n_samples / 2 + 1));
    }
  }
  return out;
}

}  // namespace tweetdyn

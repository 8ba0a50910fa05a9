#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "anderson/asymptotics.hpp"
#include "anderson/engine.hpp"
#include "anderson/potential.hpp"

namespace anderson {

/// One eigenvector drawn uniformly from one realization's spectrum.
struct TailSample {
  std::size_t id = 0;
  double lambda = 0.0;
  double center = 0.0;              // argmax site / N, in [0, 1]
  std::vector<double> q;            // q(s) = q_floor(Ns) / N on the s grid
  std::vector<double> fluct;        // sqrt(N) (q(s) + gamma(lambda) |s - center|)
  double gamma = 0.0;               // table value at lambda
  double sigma = 0.0;
};

struct TailsResult {
  std::vector<double> s;
  std::vector<TailSample> samples;
  std::size_t skipped = 0;          // realizations whose eigenvector check failed
  std::vector<std::string> warnings;
};

/// Uniform s grid on [0, 1] with `points` points.
std::vector<double> unit_grid(std::size_t points);

TailsResult tails_experiment(const PotentialSpec& spec, std::size_t n, std::size_t realizations,
                             const std::vector<double>& s_grid, const LyapunovTable& table, std::uint64_t seed,
                             const Executor& ex = {});

struct TailDiagnostics {
  double ks_center = 0.0;            // KS distance of centers against uniform(0, 1)
  double slope_error_max = 0.0;      // max over populated lambda bins of |mean slope / mean gamma - 1|
  double slope_error_pooled = 0.0;
  double mean_slope = 0.0;
  double mean_gamma = 0.0;
  std::size_t slope_bins = 0;        // bins with at least min_bin_samples samples
  double fluct_skew = 0.0;           // standardized increments of fluct
  double fluct_kurt = 0.0;           // excess kurtosis
  double fluct_var = 0.0;            // should be near 1
  std::size_t samples = 0;
};

/// Tent slope per sample: least squares q(s) = a - slope |s - center|.
double tent_slope(const TailSample& t, const std::vector<double>& s);

/// Fluctuation increments are taken on the longer side of the center between
/// offsets 0.05 and 0.35 and divided by sigma(lambda) sqrt(0.3).
TailDiagnostics tail_diagnostics(const TailsResult& r, std::size_t lambda_bins = 10, std::size_t min_bin_samples = 50);

struct TemperatureResult {
  std::vector<std::size_t> x;
  std::vector<double> measured;
  std::vector<double> stderr;
  std::vector<double> predicted;
  double t0 = 0.0;
  double tn = 0.0;
  std::size_t realizations = 0;
};

/// E[T(x)] with T(x) = sum_lambda |psi(x)|^2 (T0 w_0 + TN w_N), the boundary
/// weights w_0 = |psi(1)|^2 / (|psi(1)|^2 + |psi(N)|^2), w_N = 1 - w_0, and the
/// limit curve T0 + (TN - T0) int P(Z <= 2 gamma x' / sigma) dN, x' = (x - N/2) / sqrt(N).
/// dN is the pooled eigenvalue histogram on the table's lambda cells.
TemperatureResult temperature_profile(const PotentialSpec& spec, std::size_t n, double t0, double tn,
                                      std::size_t realizations, const std::vector<std::size_t>& x,
                                      const LyapunovTable& table, std::uint64_t seed, const Executor& ex = {});

/// Base law of the critical preset.
PotentialSpec critical_base_spec();

struct CriticalResult {
  PotentialSpec spec;               // base scaled by 1 / sqrt(N)
  LyapunovTable table;
  TailsResult tails;
  double mean_slope_times_n = 0.0;
};

CriticalResult critical_preset(std::size_t n, const PotentialSpec& base, std::size_t realizations,
                               const std::vector<double>& s_grid, std::uint64_t seed, const Executor& ex = {});

enum class FigureKind { fig1, fig2 };

struct FigureData {
  std::vector<double> log_norm;     // log r_n - log r_0, n = 0..N
  std::vector<double> fit;          // a - gamma_fit * dist(n, center)
  double lambda = 0.0;
  std::size_t center = 0;
  double gamma_fit = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double gamma_lyapunov = 0.0;      // independent estimate at lambda
  double spread = 0.0;              // max - min of log_norm
  std::vector<std::string> warnings;
};

/// fig1: Dirichlet, eigenvalue drawn uniformly from the spectrum.
/// fig2: periodic, one located trace root drawn uniformly; distances on the ring.
FigureData figure_data(FigureKind kind, const PotentialSpec& spec, std::size_t n, std::uint64_t seed,
                       std::size_t grid_factor = 4);

}  // namespace anderson

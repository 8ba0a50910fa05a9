#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "anderson/density.hpp"
#include "anderson/engine.hpp"
#include "anderson/potential.hpp"

namespace anderson {

struct LyapunovEstimate {
  double lambda = 0.0;
  double gamma = 0.0;
  double gamma_se = 0.0;
  double sigma2 = 0.0;
  double sigma2_se = 0.0;
  std::size_t steps = 0;
  std::size_t batches = 0;
  std::vector<std::string> warnings;
};

inline constexpr std::size_t kLyapunovBurnIn = 1000;

/// gamma = mean one-step log stretch of a renormalized vector along one
/// chain (natural log, after kLyapunovBurnIn discarded steps); sigma^2 from
/// batch means over `batches` consecutive blocks of steps / batches.
LyapunovEstimate lyapunov(const PotentialSpec& spec, double lambda, std::size_t steps, std::size_t batches,
                          std::uint64_t seed);

/// Weak-disorder formulas as stated for |lambda| < 2:
/// gamma = varV eps^2 / (4 - lambda^2), sigma^2 = 2 gamma.
/// varV is the variance of the unscaled variable v.
std::pair<double, double> weak_disorder_reference(double lambda, double eps, double var_v);

/// gamma(lambda), sigma(lambda) tabulated on a uniform grid and linearly interpolated.
struct LyapunovTable {
  std::vector<double> lambdas;
  std::vector<double> gamma;
  std::vector<double> sigma;

  double gamma_at(double lambda) const;
  double sigma_at(double lambda) const;
};

LyapunovTable lyapunov_table(const PotentialSpec& spec, double lo, double hi, std::size_t points, std::size_t steps,
                             std::size_t batches, std::uint64_t seed, const Executor& ex = {});

struct InvariantMeasure {
  EmpiricalDensity histogram;  // long-run chain mod pi
  EmpiricalDensity op;         // fixed point of the binned transfer operator
  double tv = 0.0;
  std::vector<std::string> warnings;
};

/// Invariant measure of the phase chain (mod pi), estimated twice: a chain
/// histogram after `burnin` steps, and the fixed point of the bin-to-bin
/// operator built from a 64-point quadrature of the potential law.
InvariantMeasure invariant_measure(const PotentialSpec& spec, double lambda, std::size_t bins, std::size_t burnin,
                                   std::size_t steps, std::uint64_t seed);

/// Chain histogram only.
EmpiricalDensity invariant_histogram(const PotentialSpec& spec, double lambda, std::size_t bins, std::size_t burnin,
                                     std::size_t steps, std::uint64_t seed);

/// Fixed point of the binned operator only.
EmpiricalDensity invariant_operator(const PotentialSpec& spec, double lambda, std::size_t bins);

/// int sin^2(phi) m(phi) m(pi/2 - phi) dphi for a binned density m.
double dos_from_invariant(const EmpiricalDensity& m);

struct DosCurve {
  std::vector<double> centers;
  std::vector<double> density;
  std::string method;
  std::vector<std::string> warnings;

  /// Sum of density times spacing (uniform bins).
  double integral() const;
};

/// Realization-averaged eigenvalue histogram per site and unit lambda on
/// `bins` equal cells over [lo, hi].
DosCurve dos_counting(const PotentialSpec& spec, std::size_t n, std::size_t realizations, double lo, double hi,
                      std::size_t bins, std::uint64_t seed, const Executor& ex = {});

/// Invariant-measure formula evaluated at each lambda of `grid`.
DosCurve dos_invariant(const PotentialSpec& spec, const std::vector<double>& grid, std::size_t bins,
                       std::size_t steps, std::uint64_t seed, const Executor& ex = {});

struct MixingEstimate {
  std::vector<std::array<double, 3>> corr;  // [lag] -> (sin^2, cos 2phi, cos 4phi), lag 0..max
  std::array<double, 3> kappa{};
  std::array<double, 3> r2{};
  std::array<std::size_t, 3> fit_lags{};
  double kappa_max = 0.0;
  std::vector<std::string> warnings;
};

inline constexpr std::array<const char*, 3> kMixingFunctions{"sin2", "cos2", "cos4"};

/// Autocorrelations of f(phi_k) pooled over 8 independent stationary chains,
/// and fits |corr(n)| ~ C kappa^n on lags above the noise floor.
MixingEstimate mixing_estimate(const PotentialSpec& spec, double lambda, std::size_t max_lag, std::size_t steps,
                               std::uint64_t seed);

/// W_N(t) = S_floor(Nt) / sqrt(N), S_n = (log||M_n|| - gamma n) / sigma, at t = i/N.
struct WalkPath {
  std::vector<double> t;
  std::vector<double> w;
};

WalkPath rescaled_walk(const PotentialSpec& spec, double lambda, std::size_t n, double gamma, double sigma,
                       std::uint64_t seed);

struct WalkStats {
  double mean_end = 0.0;       // mean of W(1)
  double var_end = 0.0;        // variance of W(1)
  double var_half = 0.0;       // variance of W(1) - W(1/2)
  double skew_end = 0.0;
  double kurt_end = 0.0;       // excess
  double increment_corr = 0.0; // corr(W(1/2), W(1) - W(1/2))
  std::size_t paths = 0;
};

WalkStats walk_stats(const std::vector<WalkPath>& paths);

}  // namespace anderson

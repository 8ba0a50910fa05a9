#include "anderson/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "anderson/prufer.hpp"
#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"
#include "anderson/transfer.hpp"

namespace anderson {

namespace {

// One step of z -> T(v - lambda) z, folding large or tiny magnitudes into log_scale.
inline void advance(double& x, double& y, double v, double lambda, double& log_scale) noexcept {
  const double nx = (v - lambda) * x - y;
  y = x;
  x = nx;
  const double m = std::max(std::abs(x), std::abs(y));
  if (m > 1e100 || m < 1e-100) {
    x /= m;
    y /= m;
    log_scale += std::log(m);
  }
}

inline void normalize(double& x, double& y, double& log_scale) noexcept {
  const double r = std::hypot(x, y);
  x /= r;
  y /= r;
  log_scale += std::log(r);
}

}  // namespace

LyapunovEstimate lyapunov(const PotentialSpec& spec, double lambda, std::size_t steps, std::size_t batches,
                          std::uint64_t seed) {
  if (steps < 10000) throw std::invalid_argument("lyapunov needs steps >= 1e4");
  if (batches < 2 || batches > steps) throw std::invalid_argument("lyapunov needs 2 <= batches <= steps");
  const std::size_t len = steps / batches;
  Rng rng(seed);
  double x = 1.0, y = 0.0, sink = 0.0;
  for (std::size_t i = 0; i < kLyapunovBurnIn; ++i) advance(x, y, spec.draw(rng), lambda, sink);
  normalize(x, y, sink);

  std::vector<double> sums(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) advance(x, y, spec.draw(rng), lambda, s);
    normalize(x, y, s);
    sums[b] = s;
  }

  LyapunovEstimate e;
  e.lambda = lambda;
  e.steps = len * batches;
  e.batches = batches;
  const double l = static_cast<double>(len);
  e.gamma = mean(sums) / l;
  e.sigma2 = variance(sums) / l;
  e.gamma_se = std::sqrt(e.sigma2 / static_cast<double>(e.steps));
  e.sigma2_se = e.sigma2 * std::sqrt(2.0 / static_cast<double>(batches - 1));
  if (batches < 30) {
    std::ostringstream os;
    os << "only " << batches << " batches; the variance estimate is unreliable below 30";
    e.warnings.push_back(os.str());
  }
  return e;
}

std::pair<double, double> weak_disorder_reference(double lambda, double eps, double var_v) {
  if (!(std::abs(lambda) < 2.0)) throw std::invalid_argument("weak-disorder formulas need |lambda| < 2");
  const double g = var_v * eps * eps / (4.0 - lambda * lambda);
  return {g, 2.0 * g};
}

double LyapunovTable::gamma_at(double lambda) const { return interpolate(lambdas, gamma, lambda); }
double LyapunovTable::sigma_at(double lambda) const { return interpolate(lambdas, sigma, lambda); }

LyapunovTable lyapunov_table(const PotentialSpec& spec, double lo, double hi, std::size_t points, std::size_t steps,
                             std::size_t batches, std::uint64_t seed, const Executor& ex) {
  if (points < 2 || !(lo < hi)) throw std::invalid_argument("lyapunov table needs points >= 2 and lo < hi");
  LyapunovTable t;
  for (std::size_t i = 0; i < points; ++i)
    t.lambdas.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  const auto est = parallel_map(ex, points, [&](std::size_t i) {
    return lyapunov(spec, t.lambdas[i], steps, batches, derive_seed(seed, {i}));
  });
  for (const auto& e : est) {
    t.gamma.push_back(e.gamma);
    t.sigma.push_back(std::sqrt(e.sigma2));
  }
  return t;
}

EmpiricalDensity invariant_histogram(const PotentialSpec& spec, double lambda, std::size_t bins, std::size_t burnin,
                                     std::size_t steps, std::uint64_t seed) {
  if (bins < 16) throw std::invalid_argument("invariant measure needs at least 16 bins");
  if (steps == 0) throw std::invalid_argument("invariant measure needs steps > 0");
  Rng rng(seed);
  double x = 1.0, y = 0.0, sink = 0.0;
  for (std::size_t i = 0; i < burnin; ++i) advance(x, y, spec.draw(rng), lambda, sink);
  EmpiricalDensity d{std::vector<double>(bins, 0.0), steps};
  for (std::size_t i = 0; i < steps; ++i) {
    advance(x, y, spec.draw(rng), lambda, sink);
    d.mass[d.bin_of(PhaseAngle::of({x, y}).value())] += 1.0;
  }
  const double scale = 1.0 / (static_cast<double>(steps) * d.width());
  for (auto& m : d.mass) m *= scale;
  return d;
}

EmpiricalDensity invariant_operator(const PotentialSpec& spec, double lambda, std::size_t bins) {
  if (bins < 16) throw std::invalid_argument("invariant measure needs at least 16 bins");
  constexpr std::size_t sub = 8;
  const auto nodes = spec.quadrature(64);
  const double w = kPi / static_cast<double>(bins);
  std::vector<double> p(bins * bins, 0.0);
  EmpiricalDensity shape{std::vector<double>(bins, 0.0), 0};
  for (std::size_t i = 0; i < bins; ++i) {
    for (std::size_t s = 0; s < sub; ++s) {
      const double a = (static_cast<double>(i) + (static_cast<double>(s) + 0.5) / sub) * w;
      const double c = std::cos(a), sn = std::sin(a);
      for (const auto& [v, wt] : nodes) {
        const double img = PhaseAngle::of({(v - lambda) * c - sn, c}).value();
        p[i * bins + shape.bin_of(img)] += wt / sub;
      }
    }
  }
  std::vector<double> pi(bins, 1.0 / static_cast<double>(bins)), next(bins);
  for (int it = 0; it < 20000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < bins; ++i) {
      const double mi = 0.5 * pi[i];
      next[i] += mi;
      const double* row = &p[i * bins];
      for (std::size_t j = 0; j < bins; ++j) next[j] += mi * row[j];
    }
    double total = 0.0, change = 0.0;
    for (double v : next) total += v;
    for (std::size_t j = 0; j < bins; ++j) {
      next[j] /= total;
      change += std::abs(next[j] - pi[j]);
    }
    pi.swap(next);
    if (change < 1e-13) break;
  }
  return from_weights(pi, 0);
}

InvariantMeasure invariant_measure(const PotentialSpec& spec, double lambda, std::size_t bins, std::size_t burnin,
                                   std::size_t steps, std::uint64_t seed) {
  InvariantMeasure m;
  m.histogram = invariant_histogram(spec, lambda, bins, burnin, steps, seed);
  m.op = invariant_operator(spec, lambda, bins);
  m.tv = tv_distance(m.histogram, m.op);
  if (m.tv > 0.05) {
    std::ostringstream os;
    os << "histogram and operator fixed point differ: TV = " << m.tv << " > 0.05";
    m.warnings.push_back(os.str());
  }
  return m;
}

double dos_from_invariant(const EmpiricalDensity& m) {
  const EmpiricalDensity r = m.reflected();
  double s = 0.0;
  for (std::size_t i = 0; i < m.bins(); ++i) {
    const double sn = std::sin(m.center(i));
    s += sn * sn * m.mass[i] * r.mass[i];
  }
  return s * m.width();
}

double DosCurve::integral() const {
  if (centers.size() < 2) return 0.0;
  const double w = (centers.back() - centers.front()) / static_cast<double>(centers.size() - 1);
  double s = 0.0;
  for (double d : density) s += d;
  return s * w;
}

DosCurve dos_counting(const PotentialSpec& spec, std::size_t n, std::size_t realizations, double lo, double hi,
                      std::size_t bins, std::uint64_t seed, const Executor& ex) {
  if (realizations == 0 || bins == 0 || !(lo < hi)) throw std::invalid_argument("dos_counting needs realizations, bins and lo < hi");
  std::vector<double> edges(bins + 1);
  for (std::size_t j = 0; j <= bins; ++j) edges[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(bins);
  auto task = [&](std::size_t i) {
    const Disorder d = sample_disorder(spec, n, derive_seed(seed, {i}));
    std::vector<double> counts(bins);
    std::size_t prev = phase_count_below(d, edges[0]);
    for (std::size_t j = 0; j < bins; ++j) {
      const std::size_t c = phase_count_below(d, edges[j + 1]);
      counts[j] = static_cast<double>(c - prev);
      prev = c;
    }
    return counts;
  };
  const auto total = parallel_map_reduce(ex, realizations, task, std::vector<double>(bins, 0.0),
                                         [](std::vector<double> acc, std::vector<double> c) {
                                           for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += c[j];
                                           return acc;
                                         });
  DosCurve curve;
  curve.method = "counting";
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t j = 0; j < bins; ++j) {
    curve.centers.push_back(0.5 * (edges[j] + edges[j + 1]));
    curve.density.push_back(total[j] / (static_cast<double>(realizations) * static_cast<double>(n) * width));
  }
  return curve;
}

DosCurve dos_invariant(const PotentialSpec& spec, const std::vector<double>& grid, std::size_t bins, std::size_t steps,
                       std::uint64_t seed, const Executor& ex) {
  if (grid.empty()) throw std::invalid_argument("dos_invariant needs a lambda grid");
  DosCurve curve;
  curve.method = "invariant";
  curve.centers = grid;
  curve.density = parallel_map(ex, grid.size(), [&](std::size_t i) {
    return dos_from_invariant(invariant_histogram(spec, grid[i], bins, 1000, steps, derive_seed(seed, {i})));
  });
  return curve;
}

MixingEstimate mixing_estimate(const PotentialSpec& spec, double lambda, std::size_t max_lag, std::size_t steps,
                               std::uint64_t seed) {
  constexpr std::size_t chains = 8;
  if (max_lag == 0 || max_lag * 100 > steps) throw std::invalid_argument("mixing needs 1 <= max_lag <= steps / 100");
  const std::size_t len = steps / chains;
  std::array<std::vector<double>, 3> f;
  for (auto& v : f) v.resize(len * chains);
  for (std::size_t c = 0; c < chains; ++c) {
    Rng rng(derive_seed(seed, {c}));
    double x = 1.0, y = 0.0, sink = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) advance(x, y, spec.draw(rng), lambda, sink);
    for (std::size_t i = 0; i < len; ++i) {
      advance(x, y, spec.draw(rng), lambda, sink);
      const double r2 = x * x + y * y;
      const double s2 = y * y / r2;
      const double c2 = (x * x - y * y) / r2;  // cos 2phi
      f[0][c * len + i] = s2;
      f[1][c * len + i] = c2;
      f[2][c * len + i] = 2.0 * c2 * c2 - 1.0;  // cos 4phi
    }
  }

  MixingEstimate m;
  m.corr.assign(max_lag + 1, {});
  const double floor = 3.0 / std::sqrt(static_cast<double>(len * chains));
  for (std::size_t q = 0; q < 3; ++q) {
    const double mu = mean(f[q]);
    double var = 0.0;
    for (double v : f[q]) var += (v - mu) * (v - mu);
    var /= static_cast<double>(f[q].size());
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
      double s = 0.0;
      std::size_t cnt = 0;
      for (std::size_t c = 0; c < chains; ++c) {
        const double* base = &f[q][c * len];
        for (std::size_t i = 0; i + lag < len; ++i) s += (base[i] - mu) * (base[i + lag] - mu);
        cnt += len - lag;
      }
      m.corr[lag][q] = s / (static_cast<double>(cnt) * var);
    }
    std::vector<double> xs, ys;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
      const double a = std::abs(m.corr[lag][q]);
      if (a < floor) break;
      xs.push_back(static_cast<double>(lag));
      ys.push_back(std::log(a));
    }
    m.fit_lags[q] = xs.size();
    if (xs.size() < 2) {
      // Correlation is already at the noise floor by lag 2.
      const double a = std::max(std::abs(m.corr[1][q]), floor);
      m.kappa[q] = std::min(a, 1.0);
      m.r2[q] = 1.0;
      std::ostringstream os;
      os << kMixingFunctions[q] << ": fewer than 2 lags above the noise floor " << floor << "; kappa bounded by lag-1 value";
      m.warnings.push_back(os.str());
    } else {
      const LinearFit fit = linear_fit(xs, ys);
      m.kappa[q] = std::exp(fit.slope);
      m.r2[q] = fit.r2;
      if (fit.r2 < 0.9) {
        std::ostringstream os;
        os << kMixingFunctions[q] << ": exponential fit R^2 = " << fit.r2 << " < 0.9";
        m.warnings.push_back(os.str());
      }
    }
  }
  m.kappa_max = *std::max_element(m.kappa.begin(), m.kappa.end());
  return m;
}

WalkPath rescaled_walk(const PotentialSpec& spec, double lambda, std::size_t n, double gamma, double sigma,
                       std::uint64_t seed) {
  if (n == 0 || !(sigma > 0.0)) throw std::invalid_argument("rescaled_walk needs n >= 1 and sigma > 0");
  Rng rng(seed);
  WalkPath p;
  p.t.resize(n + 1);
  p.w.resize(n + 1);
  ScaledTransfer m;
  const double root = std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) m.push(transfer_matrix(spec.draw(rng) - lambda));
    const double log_norm = m.log_scale + std::log(m.m.operator_norm());
    p.t[k] = static_cast<double>(k) / static_cast<double>(n);
    p.w[k] = k == 0 ? 0.0 : (log_norm - gamma * static_cast<double>(k)) / sigma / root;
  }
  return p;
}

WalkStats walk_stats(const std::vector<WalkPath>& paths) {
  if (paths.size() < 3) throw std::invalid_argument("walk_stats needs at least 3 paths");
  std::vector<double> end, half, inc;
  for (const auto& p : paths) {
    const std::size_t n = p.w.size() - 1;
    end.push_back(p.w[n]);
    half.push_back(p.w[n / 2]);
    inc.push_back(p.w[n] - p.w[n / 2]);
  }
  WalkStats s;
  s.paths = paths.size();
  s.mean_end = mean(end);
  s.var_end = variance(end);
  s.var_half = variance(inc);
  s.skew_end = skewness(end);
  s.kurt_end = excess_kurtosis(end);
  const double mh = mean(half), mi = mean(inc);
  double c = 0.0;
  for (std::size_t i = 0; i < half.size(); ++i) c += (half[i] - mh) * (inc[i] - mi);
  c /= static_cast<double>(half.size() - 1);
  s.increment_corr = c / std::sqrt(variance(half) * variance(inc));
  return s;
}

}  // namespace anderson

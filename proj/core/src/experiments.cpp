#include "anderson/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"

namespace anderson {

std::vector<double> unit_grid(std::size_t points) {
  if (points < 2) throw std::invalid_argument("s grid needs at least 2 points");
  std::vector<double> s(points);
  for (std::size_t i = 0; i < points; ++i) s[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return s;
}

namespace {

std::size_t uniform_index(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace

TailsResult tails_experiment(const PotentialSpec& spec, std::size_t n, std::size_t realizations,
                             const std::vector<double>& s_grid, const LyapunovTable& table, std::uint64_t seed,
                             const Executor& ex) {
  if (n < 2) throw std::invalid_argument("tails experiment needs N >= 2");
  if (s_grid.empty()) throw std::invalid_argument("tails experiment needs an s grid");
  const double nd = static_cast<double>(n);
  const double root = std::sqrt(nd);

  auto task = [&](std::size_t i) -> std::optional<TailSample> {
    const Disorder d = sample_disorder(spec, n, derive_seed(seed, {i, 0}));
    const std::size_t j = uniform_index(derive_seed(seed, {i, 1}), n);
    const double lambda = eigenvalues_by_index(d, j, j + 1, 0.0).front();
    Eigenpair e;
    try {
      e = eigenvector(d, lambda);
    } catch (const EigenvectorError&) {
      return std::nullopt;
    }
    TailSample t;
    t.id = i;
    t.lambda = lambda;
    t.center = static_cast<double>(e.profile.center) / nd;
    t.gamma = table.gamma_at(lambda);
    t.sigma = table.sigma_at(lambda);
    for (double s : s_grid) {
      const auto k = std::min(n, static_cast<std::size_t>(std::floor(nd * s)));
      const double q = e.profile.q[k] / nd;
      t.q.push_back(q);
      t.fluct.push_back(root * (q + t.gamma * std::abs(s - t.center)));
    }
    return t;
  };

  TailsResult r;
  r.s = s_grid;
  auto out = parallel_map(ex, realizations, task);
  for (auto& t : out) {
    if (t)
      r.samples.push_back(std::move(*t));
    else
      ++r.skipped;
  }
  if (r.skipped > 0) {
    std::ostringstream os;
    os << r.skipped << " realizations skipped after eigenvector residual failures";
    r.warnings.push_back(os.str());
  }
  return r;
}

double tent_slope(const TailSample& t, const std::vector<double>& s) {
  std::vector<double> dist(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) dist[i] = std::abs(s[i] - t.center);
  return -linear_fit(dist, t.q).slope;
}

TailDiagnostics tail_diagnostics(const TailsResult& r, std::size_t lambda_bins, std::size_t min_bin_samples) {
  if (r.samples.size() < 3) throw std::invalid_argument("tail diagnostics need at least 3 samples");
  TailDiagnostics dg;
  dg.samples = r.samples.size();
  std::vector<double> centers, slopes, incs;
  double lmin = r.samples.front().lambda, lmax = lmin;
  for (const auto& t : r.samples) {
    centers.push_back(t.center);
    slopes.push_back(tent_slope(t, r.s));
    lmin = std::min(lmin, t.lambda);
    lmax = std::max(lmax, t.lambda);
    const double side = t.center < 0.5 ? 1.0 : -1.0;
    const double f1 = interpolate(r.s, t.fluct, t.center + side * 0.05);
    const double f2 = interpolate(r.s, t.fluct, t.center + side * 0.35);
    incs.push_back((f2 - f1) / (t.sigma * std::sqrt(0.3)));
  }
  dg.ks_center = ks_uniform(centers);

  std::vector<Accumulator> bs(lambda_bins), bg(lambda_bins);
  Accumulator all_s, all_g;
  const double width = (lmax - lmin) / static_cast<double>(lambda_bins);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((r.samples[i].lambda - lmin) / width) : 0;
    b = std::min(b, lambda_bins - 1);
    bs[b].add(slopes[i]);
    bg[b].add(r.samples[i].gamma);
    all_s.add(slopes[i]);
    all_g.add(r.samples[i].gamma);
  }
  for (std::size_t b = 0; b < lambda_bins; ++b) {
    if (bs[b].count < min_bin_samples) continue;
    ++dg.slope_bins;
    dg.slope_error_max = std::max(dg.slope_error_max, std::abs(bs[b].mean() / bg[b].mean() - 1.0));
  }
  dg.mean_slope = all_s.mean();
  dg.mean_gamma = all_g.mean();
  dg.slope_error_pooled = std::abs(dg.mean_slope / dg.mean_gamma - 1.0);
  dg.fluct_skew = skewness(incs);
  dg.fluct_kurt = excess_kurtosis(incs);
  dg.fluct_var = variance(incs);
  return dg;
}

TemperatureResult temperature_profile(const PotentialSpec& spec, std::size_t n, double t0, double tn,
                                      std::size_t realizations, const std::vector<std::size_t>& x,
                                      const LyapunovTable& table, std::uint64_t seed, const Executor& ex) {
  if (realizations < 2) throw std::invalid_argument("temperature profile needs at least 2 realizations");
  for (std::size_t site : x)
    if (site < 1 || site > n) throw std::out_of_range("temperature site outside [1, N]");

  struct One {
    std::vector<double> t;
    std::vector<double> eigenvalues;
  };
  auto task = [&](std::size_t i) {
    const Disorder d = sample_disorder(spec, n, derive_seed(seed, {i}));
    One o;
    o.eigenvalues = eigenvalues_dirichlet(d).eigenvalues;
    o.t.assign(x.size(), 0.0);
    for (double lambda : o.eigenvalues) {
      const Eigenpair e = eigenvector(d, lambda);
      const double w0 = 1.0 / (1.0 + std::exp(2.0 * (e.log_abs[n - 1] - e.log_abs[0])));
      const double mix = t0 * w0 + tn * (1.0 - w0);
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double u = e.vector[x[k] - 1];
        o.t[k] += u * u * mix;
      }
    }
    return o;
  };
  const auto runs = parallel_map(ex, realizations, task);

  TemperatureResult res;
  res.x = x;
  res.t0 = t0;
  res.tn = tn;
  res.realizations = realizations;
  const std::size_t cells = table.lambdas.size();
  const double step = (table.lambdas.back() - table.lambdas.front()) / static_cast<double>(cells - 1);
  std::vector<double> mass(cells, 0.0);
  double total = 0.0;
  for (const auto& o : runs)
    for (double lambda : o.eigenvalues) {
      const double pos = std::round((lambda - table.lambdas.front()) / step);
      const auto c = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(cells - 1)));
      mass[c] += 1.0;
      total += 1.0;
    }
  for (auto& m : mass) m /= total;

  for (std::size_t k = 0; k < x.size(); ++k) {
    Accumulator acc;
    for (const auto& o : runs) acc.add(o.t[k]);
    res.measured.push_back(acc.mean());
    res.stderr.push_back(acc.stderr_mean());
    const double xp = (static_cast<double>(x[k]) - 0.5 * static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
    double integral = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (mass[c] == 0.0) continue;
      integral += mass[c] * normal_cdf(2.0 * table.gamma[c] * xp / table.sigma[c]);
    }
    res.predicted.push_back(t0 + (tn - t0) * integral);
  }
  return res;
}

PotentialSpec critical_base_spec() { return PotentialSpec::gaussian(0.0, 2.0); }

CriticalResult critical_preset(std::size_t n, const PotentialSpec& base, std::size_t realizations,
                               const std::vector<double>& s_grid, std::uint64_t seed, const Executor& ex) {
  if (n < 2) throw std::invalid_argument("critical preset needs N >= 2");
  CriticalResult c{base.scaled(1.0 / std::sqrt(static_cast<double>(n))), {}, {}, 0.0};
  const auto [lo, hi] = c.spec.effective_support();
  c.table = lyapunov_table(c.spec, lo - 2.0, hi + 2.0, 100, 1000000, 100, derive_seed(seed, {1}), ex);
  c.tails = tails_experiment(c.spec, n, realizations, s_grid, c.table, derive_seed(seed, {2}), ex);
  Accumulator acc;
  for (const auto& t : c.tails.samples) acc.add(tent_slope(t, c.tails.s));
  c.mean_slope_times_n = acc.mean() * static_cast<double>(n);
  return c;
}

FigureData figure_data(FigureKind kind, const PotentialSpec& spec, std::size_t n, std::uint64_t seed,
                       std::size_t grid_factor) {
  const Disorder d = sample_disorder(spec, n, derive_seed(seed, {0}));
  FigureData f;
  std::vector<double> lr;
  if (kind == FigureKind::fig1) {
    const std::size_t j = uniform_index(derive_seed(seed, {1}), n);
    f.lambda = eigenvalues_by_index(d, j, j + 1, 0.0).front();
    lr = eigenvector(d, f.lambda).profile.q;
  } else {
    const PeriodicSpectrum ps = eigenvalues_periodic(d, grid_factor * n);
    f.warnings = ps.warnings;
    if (ps.roots.empty()) throw SpectrumError("periodic solver located no roots");
    f.lambda = ps.roots[uniform_index(derive_seed(seed, {1}), ps.roots.size())];
    lr = periodic_eigenvector(d, f.lambda).log_radii;
  }
  f.log_norm.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) f.log_norm[k] = lr[k] - lr[0];
  const auto top = std::max_element(f.log_norm.begin(), f.log_norm.end());
  f.center = static_cast<std::size_t>(top - f.log_norm.begin());
  f.spread = *top - *std::min_element(f.log_norm.begin(), f.log_norm.end());

  std::vector<double> dist(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double a = std::abs(static_cast<double>(k) - static_cast<double>(f.center));
    dist[k] = kind == FigureKind::fig1 ? a : std::min(a, static_cast<double>(n) - a);
  }
  const LinearFit fit = linear_fit(dist, f.log_norm);
  f.gamma_fit = -fit.slope;
  f.intercept = fit.intercept;
  f.r2 = fit.r2;
  f.fit.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) f.fit[k] = f.intercept - f.gamma_fit * dist[k];
  f.gamma_lyapunov = lyapunov(spec, f.lambda, 1000000, 100, derive_seed(seed, {2})).gamma;
  return f;
}

}  // namespace anderson

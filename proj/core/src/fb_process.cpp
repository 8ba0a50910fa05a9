#include "anderson/fb_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "anderson/spectrum.hpp"

namespace anderson {

namespace {

inline void rescale(double& x, double& y) noexcept {
  const double m = std::max(std::abs(x), std::abs(y));
  if (m > 1e100 || m < 1e-100) {
    x /= m;
    y /= m;
  }
}

inline double angle_of(double x, double y) noexcept { return PhaseAngle::of({x, y}).value(); }

// Angles of a forward chain from phi_0 = 0 (out[0..n]).
void forward_angles(const PotentialSpec& spec, double lambda, Rng& rng, std::vector<double>& out) {
  const std::size_t n = out.size() - 1;
  double x = 1.0, y = 0.0;
  out[0] = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = spec.draw(rng);
    const double nx = (v - lambda) * x - y;
    y = x;
    x = nx;
    rescale(x, y);
    out[k] = angle_of(x, y);
  }
}

// Angles of a backward chain from phi_N = pi/2, indexed by site (out[n] = pi/2).
void backward_angles(const PotentialSpec& spec, double lambda, Rng& rng, std::vector<double>& out) {
  const std::size_t n = out.size() - 1;
  double x = 0.0, y = 1.0;
  out[n] = kHalfPi;
  for (std::size_t k = n; k >= 1; --k) {
    const double v = spec.draw(rng);
    const double nx = y;
    y = (v - lambda) * y - x;
    x = nx;
    rescale(x, y);
    out[k - 1] = angle_of(x, y);
  }
}

double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys) {
  double s = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) s += 0.5 * (xs[i] - xs[i - 1]) * (ys[i] + ys[i - 1]);
  return s;
}

Estimate replica_estimate(const std::vector<double>& reps, std::size_t samples) {
  Accumulator acc;
  for (double r : reps) acc.add(r);
  return {acc.mean(), acc.stderr_mean(), samples};
}

// sin^2 of the eigenvector phase at site j, shooting from the nearer end.
double eigen_sin2(const Disorder& d, double lambda, std::size_t j) {
  const std::size_t n = d.size();
  double x, y;
  if (2 * j <= n) {
    x = 1.0;
    y = 0.0;
    for (std::size_t k = 1; k <= j; ++k) {
      const double nx = (d.values[k - 1] - lambda) * x - y;
      y = x;
      x = nx;
      rescale(x, y);
    }
  } else {
    x = 0.0;
    y = 1.0;
    for (std::size_t k = n; k > j; --k) {
      const double nx = y;
      y = (d.values[k - 1] - lambda) * y - x;
      x = nx;
      rescale(x, y);
    }
  }
  return y * y / (x * x + y * y);
}

}  // namespace

std::vector<PhaseAngle> forward_sample(const PotentialSpec& spec, std::size_t k, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> a(k + 1);
  forward_angles(spec, lambda, rng, a);
  std::vector<PhaseAngle> out;
  out.reserve(k + 1);
  for (double v : a) out.emplace_back(v);
  return out;
}

std::vector<PhaseAngle> backward_sample(const PotentialSpec& spec, std::size_t m, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> a(m + 1);
  backward_angles(spec, lambda, rng, a);
  std::vector<PhaseAngle> out;
  out.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) out.emplace_back(a[m - i]);
  return out;
}

double mod_pi_distance(double a, double b) noexcept {
  const double r = reduce_pi(a - b);
  return std::min(r, kPi - r);
}

double fb_weight(PhaseAngle phi_f, PhaseAngle phi_b, double h) {
  if (!(h > 0.0 && h < 0.25 * kPi)) throw std::invalid_argument("bandwidth h must lie in (0, pi/4)");
  if (mod_pi_distance(phi_f.value(), phi_b.value()) > h) return 0.0;
  const double s = std::sin(phi_f.value());
  return s * s / (2.0 * h);
}

RhsResult rhs_estimate(const std::vector<Observable>& observables, const PotentialSpec& spec, std::size_t n,
                       const RhsOptions& options, const Executor& ex) {
  if (n == 0) throw std::invalid_argument("chain length must be >= 1");
  if (observables.empty()) throw std::invalid_argument("no observables given");
  if (options.bandwidths.empty()) throw std::invalid_argument("no bandwidths given");
  if (options.cells < 1 || options.pairs < 1 || options.replicas < 2)
    throw std::invalid_argument("rhs_estimate needs cells >= 1, pairs >= 1, replicas >= 2");
  for (double h : options.bandwidths)
    if (!(h > 0.0 && h < 0.25 * kPi)) throw std::invalid_argument("bandwidth h must lie in (0, pi/4)");

  const auto [slo, shi] = spec.effective_support();
  const double lo = slo - 2.0 - options.margin, hi = shi + 2.0 + options.margin;
  std::vector<double> points;
  for (std::size_t i = 0; i <= options.cells; ++i)
    points.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options.cells));
  for (const auto& o : observables) {
    if (o.kind == ObservableKind::all) continue;
    for (double e : {o.a, o.b})
      if (e > lo && e < hi) points.push_back(e);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<double> grid;
  for (double p : points)
    if (std::any_of(observables.begin(), observables.end(), [&](const Observable& o) { return o.active(p); }))
      grid.push_back(p);

  const std::size_t nh = options.bandwidths.size(), no = observables.size(), reps = options.replicas;
  const std::size_t per_rep = (options.pairs + reps - 1) / reps;
  const double hmax = *std::max_element(options.bandwidths.begin(), options.bandwidths.end());

  // Task (point, replica) -> mean over its pairs of sum_k G * weight, laid out [h][observable].
  auto task = [&](std::size_t t) {
    const std::size_t p = t / reps, r = t % reps;
    const double lambda = grid[p];
    Rng fwd_rng(derive_seed(options.seed, {p, r, 0}));
    Rng bwd_rng(derive_seed(options.seed, {p, r, 1}));
    std::vector<double> f(n + 1), b(n + 1), sums(nh * no, 0.0);
    std::vector<std::size_t> live;
    for (std::size_t o = 0; o < no; ++o)
      if (observables[o].active(lambda)) live.push_back(o);
    for (std::size_t pair = 0; pair < per_rep; ++pair) {
      forward_angles(spec, lambda, fwd_rng, f);
      backward_angles(spec, lambda, bwd_rng, b);
      for (std::size_t k = 1; k <= n; ++k) {
        const double dist = mod_pi_distance(f[k], b[k]);
        if (dist > hmax) continue;
        const double s = std::sin(f[k]);
        const PhaseView view{f, b, k};
        for (std::size_t o : live) {
          const double g = observables[o](lambda, view);
          for (std::size_t i = 0; i < nh; ++i) {
            const double h = options.bandwidths[i];
            if (dist <= h) sums[i * no + o] += g * s * s / (2.0 * h);
          }
        }
      }
    }
    for (auto& v : sums) v /= static_cast<double>(per_rep);
    return sums;
  };
  const auto values = parallel_map(ex, grid.size() * reps, task);

  RhsResult res;
  res.bandwidths = options.bandwidths;
  res.grid = grid;
  res.fb_samples = grid.size() * reps * per_rep * n;
  res.estimates.assign(nh, std::vector<Estimate>(no));
  for (std::size_t i = 0; i < nh; ++i) {
    for (std::size_t o = 0; o < no; ++o) {
      std::vector<double> xs;
      std::vector<std::size_t> idx;
      for (std::size_t p = 0; p < grid.size(); ++p)
        if (observables[o].active(grid[p])) {
          xs.push_back(grid[p]);
          idx.push_back(p);
        }
      std::vector<double> integrals(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        std::vector<double> ys;
        for (std::size_t p : idx) ys.push_back(values[p * reps + r][i * no + o]);
        integrals[r] = trapezoid(xs, ys);
      }
      res.estimates[i][o] = replica_estimate(integrals, idx.size() * reps * per_rep * n);
    }
  }
  const double hmin = *std::min_element(options.bandwidths.begin(), options.bandwidths.end());
  if (static_cast<double>(reps * per_rep) < 10.0 / hmin) {
    std::ostringstream os;
    os << "delta starvation: " << reps * per_rep << " samples per (lambda, k) cell, fewer than 10/h = " << 10.0 / hmin;
    res.warnings.push_back(os.str());
  }
  return res;
}

std::vector<Estimate> lhs_estimate(const std::vector<Observable>& observables, const PotentialSpec& spec,
                                   std::size_t n, std::size_t realizations, std::uint64_t seed, const Executor& ex) {
  if (realizations < 2) throw std::invalid_argument("lhs_estimate needs at least 2 realizations");
  if (observables.empty()) throw std::invalid_argument("no observables given");
  const std::size_t no = observables.size();

  auto task = [&](std::size_t i) {
    const Disorder d = sample_disorder(spec, n, derive_seed(seed, {i}));
    std::vector<double> out(no, 0.0);
    std::map<std::pair<double, double>, std::vector<double>> window_eigs;
    auto eigs = [&](double a, double b) -> const std::vector<double>& {
      auto it = window_eigs.find({a, b});
      if (it == window_eigs.end()) it = window_eigs.emplace(std::make_pair(a, b), eigenvalues_in_window(d, a, b, 1e-11)).first;
      return it->second;
    };
    for (std::size_t o = 0; o < no; ++o) {
      const Observable& g = observables[o];
      switch (g.kind) {
        case ObservableKind::all: out[o] = static_cast<double>(n); break;
        case ObservableKind::window:
          out[o] = static_cast<double>(
              phase_count_below(d, std::nextafter(g.b, std::numeric_limits<double>::infinity())) -
              phase_count_below(d, g.a));
          break;
        case ObservableKind::window_sin2:
          if (g.site > n) throw std::out_of_range("observable site beyond chain length");
          for (double lambda : eigs(g.a, g.b)) out[o] += eigen_sin2(d, lambda, g.site);
          break;
        case ObservableKind::window_psi2:
          if (g.site > n) throw std::out_of_range("observable site beyond chain length");
          for (double lambda : eigs(g.a, g.b)) {
            const double u = eigenvector(d, lambda).vector[g.site - 1];
            out[o] += u * u;
          }
          break;
      }
    }
    return out;
  };
  const auto accs = parallel_map_reduce(ex, realizations, task, std::vector<Accumulator>(no),
                                        [](std::vector<Accumulator> acc, std::vector<double> r) {
                                          for (std::size_t o = 0; o < acc.size(); ++o) acc[o].add(r[o]);
                                          return acc;
                                        });
  std::vector<Estimate> res;
  for (const auto& a : accs) res.push_back({a.mean(), a.stderr_mean(), a.count});
  return res;
}

DthetaCheck dtheta_identity_check(const Disorder& d, double lambda, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  const PruferPath path = forward_path(d, lambda, PhaseAngle{});
  const std::size_t n = d.size();
  DthetaCheck c;
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = std::sin(path.phases[k].value());
    c.identity += std::exp(2.0 * (path.log_radii[k] - path.log_radii[n])) * s * s;
  }
  c.finite_difference = (theta_end(d, lambda + step).value - theta_end(d, lambda - step).value) / (2.0 * step);
  c.relative_error = std::abs(c.identity - c.finite_difference) / std::abs(c.finite_difference);
  return c;
}

namespace {

EmpiricalDensity chain_density(bool forward, const PotentialSpec& spec, std::size_t k, double lambda,
                               std::size_t samples, std::size_t bins, std::uint64_t seed, const Executor& ex) {
  if (bins < 16) throw std::invalid_argument("phase density needs at least 16 bins");
  if (samples == 0) throw std::invalid_argument("phase density needs samples");
  constexpr std::size_t chunk = 1000;
  const std::size_t tasks = (samples + chunk - 1) / chunk;
  auto task = [&](std::size_t t) {
    Rng rng(derive_seed(seed, {t}));
    const std::size_t count = std::min(chunk, samples - t * chunk);
    std::vector<double> angles(count), path(k + 1);
    for (std::size_t s = 0; s < count; ++s) {
      if (forward) {
        forward_angles(spec, lambda, rng, path);
        angles[s] = path[k];
      } else {
        backward_angles(spec, lambda, rng, path);
        angles[s] = path[0];
      }
    }
    return angles;
  };
  const auto all = parallel_map_reduce(ex, tasks, task, std::vector<double>{},
                                       [](std::vector<double> acc, std::vector<double> part) {
                                         acc.insert(acc.end(), part.begin(), part.end());
                                         return acc;
                                       });
  return histogram(all, bins);
}

}  // namespace

EmpiricalDensity phase_density(const PotentialSpec& spec, std::size_t k, double lambda, std::size_t samples,
                               std::size_t bins, std::uint64_t seed, const Executor& ex) {
  return chain_density(true, spec, k, lambda, samples, bins, seed, ex);
}

EmpiricalDensity backward_phase_density(const PotentialSpec& spec, std::size_t m, double lambda,
                                        std::size_t samples, std::size_t bins, std::uint64_t seed,
                                        const Executor& ex) {
  return chain_density(false, spec, m, lambda, samples, bins, seed, ex);
}

}  // namespace anderson

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace anderson {

/// Random engine used for every stochastic routine in the library.
using Rng = std::mt19937_64;

/// Derives an independent 64-bit stream seed from a master seed and a task
/// path such as (lambda index, cut, replica, side). The result depends only on
/// the inputs, never on which worker runs the task.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

enum class PotentialFamily { uniform, gaussian };

/// Law of one site potential V = eps * v, with v uniform(lo, hi) or
/// gaussian(mean, std). Only absolutely continuous laws are representable.
class PotentialSpec {
 public:
  static PotentialSpec uniform(double lo, double hi, double eps = 1.0);
  static PotentialSpec gaussian(double mean, double std, double eps = 1.0);

  /// Builds a spec from a family name. Discrete families (bernoulli, ...)
  /// throw: the potential law must have a density.
  static PotentialSpec from_name(std::string_view family, double a, double b, double eps = 1.0);

  PotentialFamily family() const noexcept { return family_; }
  double a() const noexcept { return a_; }  // lo or mean
  double b() const noexcept { return b_; }  // hi or std
  double eps() const noexcept { return eps_; }

  /// Same law with eps multiplied by `factor`.
  PotentialSpec scaled(double factor) const;

  double mean() const noexcept;
  double variance() const noexcept;

  /// Interval that contains every draw (uniform) or all but a negligible
  /// 8-sigma tail (gaussian). Used to size lambda grids.
  std::pair<double, double> effective_support() const noexcept;

  double draw(Rng& rng) const;

  /// 64-point quadrature of the law: (node, weight) with weights summing to 1.
  /// Midpoint rule for uniform, Gauss-Legendre against the density for gaussian.
  std::vector<std::pair<double, double>> quadrature(int points = 64) const;

  std::string describe() const;

 private:
  PotentialSpec(PotentialFamily f, double a, double b, double eps);

  PotentialFamily family_;
  double a_;
  double b_;
  double eps_;
};

/// One realization V_1..V_N of the iid potential together with its seed.
struct Disorder {
  std::vector<double> values;
  std::uint64_t seed = 0;
  PotentialSpec spec = PotentialSpec::uniform(0.0, 1.0);

  std::size_t size() const noexcept { return values.size(); }
  double min() const;
  double max() const;
};

/// n iid draws of `spec`, deterministic in (spec, n, seed).
Disorder sample_disorder(const PotentialSpec& spec, std::size_t n, std::uint64_t seed);

/// Wraps fixed values (tests, closed-form checks). The spec is informational.
Disorder make_disorder(std::vector<double> values, PotentialSpec spec = PotentialSpec::uniform(0.0, 1.0));

}  // namespace anderson

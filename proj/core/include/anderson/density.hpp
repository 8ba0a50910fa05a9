#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace anderson {

/// Piecewise-constant probability density on [0, pi) with B equal cells.
/// mass[i] is the density value on cell i, so sum(mass) * pi / B = 1.
struct EmpiricalDensity {
  std::vector<double> mass;
  std::size_t samples = 0;

  std::size_t bins() const noexcept { return mass.size(); }
  double width() const noexcept;
  double center(std::size_t i) const noexcept;
  std::size_t bin_of(double angle) const noexcept;  // angle taken mod pi

  /// Cell masses (probabilities) rather than density values.
  std::vector<double> probabilities() const;
  double total() const noexcept;

  /// The density of pi/2 - phi (mod pi). Requires an even bin count so cells map onto cells.
  EmpiricalDensity reflected() const;
};

/// Histogram of angles reduced mod pi.
EmpiricalDensity histogram(std::span<const double> angles, std::size_t bins);

/// Density from unnormalized nonnegative cell weights.
EmpiricalDensity from_weights(std::vector<double> weights, std::size_t samples);

/// Total-variation distance (1/2) sum |p_i - q_i| between cell probabilities.
double tv_distance(const EmpiricalDensity& a, const EmpiricalDensity& b);

}  // namespace anderson

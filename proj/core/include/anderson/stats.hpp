#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace anderson {

double mean(std::span<const double> x);
double variance(std::span<const double> x);  // unbiased
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

/// Kolmogorov-Smirnov statistic of x against uniform(0, 1).
double ks_uniform(std::vector<double> x);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Least squares through the origin, y = slope * x; r2 uses the uncentered total.
LinearFit proportional_fit(std::span<const double> x, std::span<const double> y);

double normal_cdf(double z) noexcept;

/// Linear interpolation on a sorted grid, clamped at the ends.
double interpolate(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace anderson

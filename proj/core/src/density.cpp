#include "anderson/density.hpp"

#include <cmath>
#include <stdexcept>

#include "anderson/prufer.hpp"

namespace anderson {

double EmpiricalDensity::width() const noexcept { return kPi / static_cast<double>(mass.size()); }

double EmpiricalDensity::center(std::size_t i) const noexcept { return (static_cast<double>(i) + 0.5) * width(); }

std::size_t EmpiricalDensity::bin_of(double angle) const noexcept {
  const auto b = static_cast<std::size_t>(reduce_pi(angle) / width());
  return b < mass.size() ? b : mass.size() - 1;
}

std::vector<double> EmpiricalDensity::probabilities() const {
  std::vector<double> p(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) p[i] = mass[i] * width();
  return p;
}

double EmpiricalDensity::total() const noexcept {
  double s = 0.0;
  for (double m : mass) s += m;
  return s * width();
}

EmpiricalDensity EmpiricalDensity::reflected() const {
  const std::size_t b = mass.size();
  if (b % 2 != 0) throw std::invalid_argument("reflection needs an even bin count");
  EmpiricalDensity r{std::vector<double>(b), samples};
  // Cell i has center (i + 1/2) pi / B; pi/2 minus that is the center of cell B/2 - 1 - i.
  for (std::size_t i = 0; i < b; ++i) r.mass[(b + b / 2 - 1 - i) % b] = mass[i];
  return r;
}

EmpiricalDensity histogram(std::span<const double> angles, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
  if (angles.empty()) throw std::invalid_argument("histogram of empty sample");
  EmpiricalDensity d{std::vector<double>(bins, 0.0), angles.size()};
  for (double a : angles) d.mass[d.bin_of(a)] += 1.0;
  const double scale = 1.0 / (static_cast<double>(angles.size()) * d.width());
  for (auto& m : d.mass) m *= scale;
  return d;
}

EmpiricalDensity from_weights(std::vector<double> weights, std::size_t samples) {
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("density weights must be nonnegative");
    s += w;
  }
  if (!(s > 0.0)) throw std::invalid_argument("density weights sum to zero");
  EmpiricalDensity d{std::move(weights), samples};
  const double scale = 1.0 / (s * d.width());
  for (auto& m : d.mass) m *= scale;
  return d;
}

double tv_distance(const EmpiricalDensity& a, const EmpiricalDensity& b) {
  if (a.bins() != b.bins()) throw std::invalid_argument("tv_distance: bin counts differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.bins(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return 0.5 * s * a.width();
}

}  // namespace anderson

#pragma once

#include <numbers>
#include <span>
#include <vector>

#include "anderson/potential.hpp"
#include "anderson/transfer.hpp"

namespace anderson {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kHalfPi = 0.5 * std::numbers::pi;

/// Reduces x to [0, 2*pi). Values that round onto 2*pi map to 0.
double reduce_2pi(double x) noexcept;

/// Reduces x to [0, pi).
double reduce_pi(double x) noexcept;

/// Angle on the circle R/2piZ, stored canonically in [0, 2*pi).
class PhaseAngle {
 public:
  constexpr PhaseAngle() = default;
  explicit PhaseAngle(double radians) noexcept : value_(reduce_2pi(radians)) {}

  /// Angle of the vector (x, y), i.e. of the complex number x + i*y.
  static PhaseAngle of(Vec2 v) noexcept;

  constexpr double value() const noexcept { return value_; }
  double mod_pi() const noexcept { return reduce_pi(value_); }
  Vec2 unit() const noexcept;

 private:
  double value_ = 0.0;
};

/// Real-valued unwinding of a PhaseAngle.
struct LiftedPhase {
  double value = 0.0;
};

/// Angle of T(v - lambda) applied to (cos phi, sin phi).
PhaseAngle phase_step(PhaseAngle phi, double v, double lambda) noexcept;

/// Angle of T(v - lambda)^{-1} applied to (cos phi, sin phi).
PhaseAngle phase_step_inv(PhaseAngle phi, double v, double lambda) noexcept;

/// d(phase_step)/d(phi) = 1 / |T(v - lambda) e(phi)|^2.
double phase_step_derivative(PhaseAngle phi, double v, double lambda) noexcept;

/// The representative of `next` (mod 2*pi) in [prev - pi/2, prev + 3*pi/2).
LiftedPhase lift_step(LiftedPhase prev, PhaseAngle next) noexcept;

/// Phases, lifts and log-radii of z_k = u_{k+1} + i u_k along a chain,
/// k = 0..N. log_radii[0] = 0.
struct PruferPath {
  std::vector<PhaseAngle> phases;
  std::vector<LiftedPhase> lifts;
  std::vector<double> log_radii;
  double lambda = 0.0;

  std::size_t sites() const noexcept { return phases.empty() ? 0 : phases.size() - 1; }
};

/// Forward iteration z_k = T(V_k - lambda) z_{k-1} from angle phi0 using a
/// renormalized unit vector, so log_radii never overflow.
PruferPath forward_path(std::span<const double> values, double lambda, PhaseAngle phi0 = PhaseAngle{});
PruferPath forward_path(const Disorder& d, double lambda, PhaseAngle phi0 = PhaseAngle{});

/// Backward iteration z_{k-1} = T(V_k - lambda)^{-1} z_k from angle phiN at
/// site N. Entries are indexed by site (index N holds phiN); log_radii[N] = 0.
/// Lifts decrease from lifts[N] = phiN.
PruferPath backward_path(std::span<const double> values, double lambda, PhaseAngle phiN);

}  // namespace anderson

#include "anderson/prufer.hpp"

#include <cmath>
#include <limits>

namespace anderson {

double reduce_2pi(double x) noexcept {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r + 0.0;  // -0.0 -> +0.0
}

double reduce_pi(double x) noexcept {
  double r = std::fmod(x, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r + 0.0;
}

PhaseAngle PhaseAngle::of(Vec2 v) noexcept {
  double a = std::atan2(v.y, v.x);
  if (a < 0.0) a += kTwoPi;
  PhaseAngle p;
  p.value_ = (a >= kTwoPi) ? 0.0 : a + 0.0;
  return p;
}

Vec2 PhaseAngle::unit() const noexcept { return {std::cos(value_), std::sin(value_)}; }

PhaseAngle phase_step(PhaseAngle phi, double v, double lambda) noexcept {
  return PhaseAngle::of(transfer_matrix(v - lambda) * phi.unit());
}

PhaseAngle phase_step_inv(PhaseAngle phi, double v, double lambda) noexcept {
  return PhaseAngle::of(transfer_matrix_inverse(v - lambda) * phi.unit());
}

double phase_step_derivative(PhaseAngle phi, double v, double lambda) noexcept {
  const Vec2 w = transfer_matrix(v - lambda) * phi.unit();
  return 1.0 / (w.x * w.x + w.y * w.y);
}

LiftedPhase lift_step(LiftedPhase prev, PhaseAngle next) noexcept {
  const double lower = prev.value - kHalfPi;
  const double offset = reduce_2pi(next.value() - lower);
  double theta = lower + offset;
  // Rounding in the two additions can step just outside the half-open window.
  const double upper = prev.value + 1.5 * kPi;
  if (theta < lower) theta = lower;
  if (theta >= upper) theta = std::nextafter(upper, -std::numeric_limits<double>::infinity());
  return {theta};
}

PruferPath forward_path(std::span<const double> values, double lambda, PhaseAngle phi0) {
  const std::size_t n = values.size();
  PruferPath path;
  path.lambda = lambda;
  path.phases.resize(n + 1);
  path.lifts.resize(n + 1);
  path.log_radii.resize(n + 1);
  path.phases[0] = phi0;
  path.lifts[0] = {phi0.value()};
  path.log_radii[0] = 0.0;

  Vec2 w = phi0.unit();
  for (std::size_t k = 1; k <= n; ++k) {
    const Vec2 next = transfer_matrix(values[k - 1] - lambda) * w;
    const double r = next.norm();
    w = {next.x / r, next.y / r};
    path.log_radii[k] = path.log_radii[k - 1] + std::log(r);
    path.phases[k] = PhaseAngle::of(w);
    path.lifts[k] = lift_step(path.lifts[k - 1], path.phases[k]);
  }
  return path;
}

PruferPath forward_path(const Disorder& d, double lambda, PhaseAngle phi0) {
  return forward_path(std::span<const double>(d.values), lambda, phi0);
}

PruferPath backward_path(std::span<const double> values, double lambda, PhaseAngle phiN) {
  const std::size_t n = values.size();
  PruferPath path;
  path.lambda = lambda;
  path.phases.resize(n + 1);
  path.lifts.resize(n + 1);
  path.log_radii.resize(n + 1);
  path.phases[n] = phiN;
  path.lifts[n] = {phiN.value()};
  path.log_radii[n] = 0.0;

  Vec2 w = phiN.unit();
  for (std::size_t k = n; k >= 1; --k) {
    const Vec2 prev = transfer_matrix_inverse(values[k - 1] - lambda) * w;
    const double r = prev.norm();
    w = {prev.x / r, prev.y / r};
    path.log_radii[k - 1] = path.log_radii[k] + std::log(r);
    path.phases[k - 1] = PhaseAngle::of(w);
    // Mirror image of the forward window: theta_{k-1} in (theta_k - 3pi/2, theta_k + pi/2].
    const LiftedPhase mirrored = lift_step({-path.lifts[k].value}, PhaseAngle(-path.phases[k - 1].value()));
    path.lifts[k - 1] = {-mirrored.value};
  }
  return path;
}

}  // namespace anderson

#pragma once

#include <algorithm>
#include <cmath>

namespace anderson {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  double norm() const noexcept { return std::hypot(x, y); }
};

/// Row-major 2x2 real matrix ((a, b), (c, d)).
struct Transfer2 {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;
  double d = 1.0;

  static constexpr Transfer2 identity() noexcept { return {1.0, 0.0, 0.0, 1.0}; }

  constexpr double det() const noexcept { return a * d - b * c; }
  constexpr double trace() const noexcept { return a + d; }

  constexpr Vec2 operator*(Vec2 v) const noexcept { return {a * v.x + b * v.y, c * v.x + d * v.y}; }

  constexpr Transfer2 operator*(const Transfer2& o) const noexcept {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }

  /// Largest singular value.
  double operator_norm() const noexcept;
  double max_abs() const noexcept;
};

/// T(x) = ((x, -1), (1, 0)); maps (u_n, u_{n-1}) to (u_{n+1}, u_n) with x = V_n - lambda.
constexpr Transfer2 transfer_matrix(double x) noexcept { return {x, -1.0, 1.0, 0.0}; }

/// T(x)^{-1} = ((0, 1), (-1, x)).
constexpr Transfer2 transfer_matrix_inverse(double x) noexcept { return {0.0, 1.0, -1.0, x}; }

/// Matrix scaled by exp(log_scale); keeps products of thousands of factors finite.
struct ScaledTransfer {
  Transfer2 m = Transfer2::identity();
  double log_scale = 0.0;

  /// Left-multiplies by `t` and renormalizes so max |entry| = 1.
  void push(const Transfer2& t) noexcept;
};

inline double Transfer2::operator_norm() const noexcept {
  // sigma_max^2 = (s + sqrt(s^2 - 4 det^2)) / 2 with s the squared Frobenius norm.
  const double s = a * a + b * b + c * c + d * d;
  const double dt = det();
  const double disc = std::max(0.0, s * s - 4.0 * dt * dt);
  return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

inline double Transfer2::max_abs() const noexcept {
  return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
}

inline void ScaledTransfer::push(const Transfer2& t) noexcept {
  m = t * m;
  const double s = m.max_abs();
  if (s > 0.0) {
    m = {m.a / s, m.b / s, m.c / s, m.d / s};
    log_scale += std::log(s);
  }
}

}  // namespace anderson

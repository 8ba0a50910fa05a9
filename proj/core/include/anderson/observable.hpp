#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace anderson {

/// Phase path seen by an observable: sites j < cut read the forward phases,
/// sites j >= cut the backward ones. Both spans are indexed by site 0..N.
/// For an eigenvector path pass the same span twice.
struct PhaseView {
  std::span<const double> forward;
  std::span<const double> backward;
  std::size_t cut = 0;

  std::size_t sites() const noexcept { return backward.size() - 1; }
  double phase(std::size_t j) const noexcept { return j < cut ? forward[j] : backward[j]; }
};

enum class ObservableKind {
  all,          // G = 1
  window,       // 1{lambda in [a, b]}
  window_sin2,  // 1{lambda in [a, b]} sin^2(phi_j)
  window_psi2,  // 1{lambda in [a, b]} |psi(j)|^2, psi rebuilt from the phases
};

/// Bounded test function G(lambda, X) from a fixed registry.
struct Observable {
  ObservableKind kind = ObservableKind::all;
  double a = 0.0;
  double b = 0.0;
  std::size_t site = 0;

  static Observable all();
  static Observable window(double a, double b);
  static Observable window_sin2(double a, double b, std::size_t site);
  static Observable window_psi2(double a, double b, std::size_t site);

  /// Parses "all", "window:a:b", "sin2:a:b:j", "psi2:a:b:x".
  static Observable parse(const std::string& text);

  std::string name() const;
  bool uses_path() const noexcept { return kind == ObservableKind::window_sin2 || kind == ObservableKind::window_psi2; }
  bool active(double lambda) const noexcept;

  double operator()(double lambda, const PhaseView& path) const;
};

/// |psi(x)|^2 of the normalized vector rebuilt from u_{k+1} / u_k = cot(phi_k), u_1 = 1.
double psi2_from_phases(const PhaseView& path, std::size_t x);

}  // namespace anderson

#include "anderson/observable.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace anderson {

namespace {

void check_window(double a, double b) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("observable window needs a < b");
}

}  // namespace

Observable Observable::all() { return {}; }

Observable Observable::window(double a, double b) {
  check_window(a, b);
  return {ObservableKind::window, a, b, 0};
}

Observable Observable::window_sin2(double a, double b, std::size_t site) {
  check_window(a, b);
  return {ObservableKind::window_sin2, a, b, site};
}

Observable Observable::window_psi2(double a, double b, std::size_t site) {
  check_window(a, b);
  if (site == 0) throw std::invalid_argument("psi2 observable needs a site >= 1");
  return {ObservableKind::window_psi2, a, b, site};
}

Observable Observable::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.empty()) throw std::invalid_argument("empty observable");
  const std::string& kind = parts[0];
  const std::string usage = "cannot parse observable '" + text + "' (expected all, window:a:b, sin2:a:b:j or psi2:a:b:x)";
  auto num = [&](std::size_t i) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(parts[i], &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(usage);
    }
    if (used != parts[i].size()) throw std::invalid_argument(usage);
    return v;
  };
  auto index = [&](std::size_t i) {
    const double v = num(i);
    if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument(usage);
    return static_cast<std::size_t>(v);
  };
  if (kind == "all" && parts.size() == 1) return all();
  if (kind == "window" && parts.size() == 3) return window(num(1), num(2));
  if (kind == "sin2" && parts.size() == 4) return window_sin2(num(1), num(2), index(3));
  if (kind == "psi2" && parts.size() == 4) return window_psi2(num(1), num(2), index(3));
  throw std::invalid_argument(usage);
}

std::string Observable::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case ObservableKind::all: return "all";
    case ObservableKind::window: os << "window:" << a << ':' << b; break;
    case ObservableKind::window_sin2: os << "sin2:" << a << ':' << b << ':' << site; break;
    case ObservableKind::window_psi2: os << "psi2:" << a << ':' << b << ':' << site; break;
  }
  return os.str();
}

bool Observable::active(double lambda) const noexcept {
  return kind == ObservableKind::all || (lambda >= a && lambda <= b);
}

double Observable::operator()(double lambda, const PhaseView& path) const {
  if (!active(lambda)) return 0.0;
  switch (kind) {
    case ObservableKind::all:
    case ObservableKind::window: return 1.0;
    case ObservableKind::window_sin2: {
      if (site > path.sites()) throw std::out_of_range("observable site beyond chain length");
      const double s = std::sin(path.phase(site));
      return s * s;
    }
    case ObservableKind::window_psi2: return psi2_from_phases(path, site);
  }
  return 0.0;
}

double psi2_from_phases(const PhaseView& path, std::size_t x) {
  const std::size_t n = path.sites();
  if (x < 1 || x > n) throw std::out_of_range("psi2 site outside [1, N]");
  std::vector<double> logu(n + 1, 0.0);
  double top = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double phi = path.phase(k);
    logu[k + 1] = logu[k] + std::log(std::abs(std::cos(phi))) - std::log(std::abs(std::sin(phi)));
    if (logu[k + 1] > top) top = logu[k + 1];
  }
  double norm = 0.0;
  for (std::size_t k = 1; k <= n; ++k) norm += std::exp(2.0 * (logu[k] - top));
  return std::exp(2.0 * (logu[x] - top)) / norm;
}

}  // namespace anderson

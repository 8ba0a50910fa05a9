#include "anderson/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace anderson {

namespace {

// Quadrant q covers angles [q*pi/2, (q+1)*pi/2).
inline int quadrant(double x, double y) noexcept {
  if (y >= 0.0) return x > 0.0 ? 0 : (y > 0.0 ? 1 : 2);
  return x >= 0.0 ? 3 : 2;
}

// Quadrants advanced by one step of the phase map; rows = from, cols = to.
// Transitions that the map cannot produce are never looked up.
constexpr int kAdvance[4][4] = {
    {0, 1, 0, 0},
    {0, 0, 1, 2},
    {0, 0, 0, 1},
    {1, 2, 0, 0},
};

struct QuadrantWalk {
  std::uint64_t quadrants = 0;  // absolute quadrant index of z_N
  double x = 1.0;
  double y = 0.0;
};

QuadrantWalk walk_quadrants(const std::vector<double>& v, double lambda) noexcept {
  QuadrantWalk w;
  int q = 0;
  for (double vk : v) {
    const double nx = (vk - lambda) * w.x - w.y;
    const double ny = w.x;
    const int nq = quadrant(nx, ny);
    w.quadrants += static_cast<std::uint64_t>(kAdvance[q][nq]);
    q = nq;
    w.x = nx;
    w.y = ny;
    const double m = std::max(std::abs(nx), std::abs(ny));
    if (m > 1e100 || m < 1e-100) {
      const double s = 1.0 / m;
      w.x *= s;
      w.y *= s;
    }
  }
  return w;
}

template <class Count>
std::vector<double> bisect_range(Count&& count, std::size_t n, double lo, double hi, std::size_t first,
                                 std::size_t last, double tol) {
  if (count(lo) != 0 || count(hi) != n) {
    std::ostringstream os;
    os << "eigenvalue bracket [" << lo << ", " << hi << "] holds " << count(hi) - count(lo)
       << " crossings, expected " << n;
    throw SpectrumError(os.str());
  }
  const std::size_t m = last - first;
  std::vector<double> lower(m, lo), upper(m, hi);
  for (std::size_t j = 0; j < m; ++j) {
    for (;;) {
      const double l = lower[j], u = upper[j];
      if (u - l <= tol) break;
      const double mid = 0.5 * (l + u);
      if (mid <= l || mid >= u) break;
      const std::size_t c = count(mid);
      // c eigenvalues lie below mid: indices < c get upper <= mid, the rest lower >= mid.
      for (std::size_t i = j; i < m; ++i) {
        if (first + i < c)
          upper[i] = std::min(upper[i], mid);
        else
          lower[i] = std::max(lower[i], mid);
      }
    }
  }
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) out[j] = 0.5 * (lower[j] + upper[j]);
  return out;
}

void check_tol(double tol) {
  if (!(tol >= 0.0) || !std::isfinite(tol)) throw std::invalid_argument("tolerance must be >= 0");
}

// Two-sided reconstruction shared by the Dirichlet and periodic solvers.
struct Glued {
  std::vector<double> log_radii;
  std::vector<Vec2> directions;
};

Glued glue(const PruferPath& f, const PruferPath& b) {
  const std::size_t n = f.sites();
  std::size_t m = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= n; ++k) {
    const double s = f.log_radii[k] + b.log_radii[k];
    if (s > best) {
      best = s;
      m = k;
    }
  }
  const Vec2 df = f.phases[m].unit();
  const Vec2 db = b.phases[m].unit();
  const double sign = (df.x * db.x + df.y * db.y) >= 0.0 ? 1.0 : -1.0;
  const double shift = f.log_radii[m] - b.log_radii[m];

  Glued g;
  g.log_radii.resize(n + 1);
  g.directions.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    if (k <= m) {
      g.log_radii[k] = f.log_radii[k];
      g.directions[k] = f.phases[k].unit();
    } else {
      g.log_radii[k] = b.log_radii[k] + shift;
      const Vec2 u = b.phases[k].unit();
      g.directions[k] = {sign * u.x, sign * u.y};
    }
  }
  return g;
}

}  // namespace

LiftedPhase theta_end(const Disorder& d, double lambda) {
  const QuadrantWalk w = walk_quadrants(d.values, lambda);
  const PhaseAngle phi = PhaseAngle::of({w.x, w.y});
  const std::uint64_t laps = w.quadrants / 4;
  // phi's quadrant equals quadrants mod 4 up to atan2 rounding at a boundary.
  double theta = phi.value() + kTwoPi * static_cast<double>(laps);
  const int q = static_cast<int>(w.quadrants % 4);
  const int qa = std::min(3, static_cast<int>(phi.value() / kHalfPi));
  if (q == 0 && qa == 3) theta -= kTwoPi;
  if (q == 3 && qa == 0) theta += kTwoPi;
  return {theta};
}

std::size_t phase_count_below(const Disorder& d, double lambda) {
  const QuadrantWalk w = walk_quadrants(d.values, lambda);
  // theta_N lies in [Q*pi/2, (Q+1)*pi/2); count odd j with j*pi/2 < theta_N.
  std::uint64_t c = (w.quadrants + 1) / 2;
  if ((w.quadrants & 1U) && w.x == 0.0) --c;
  return static_cast<std::size_t>(c);
}

std::size_t sturm_count(const Disorder& d, double lambda) {
  std::size_t neg = 0;
  double p = 1.0;
  bool first = true;
  for (double v : d.values) {
    p = first ? (v - lambda) : (v - lambda) - 1.0 / p;
    first = false;
    if (p == 0.0) p = 1e-14;
    if (p < 0.0) ++neg;
  }
  return neg;
}

std::pair<double, double> dirichlet_bracket(const Disorder& d) { return {d.min() - 3.0, d.max() + 3.0}; }

Spectrum eigenvalues_dirichlet(const Disorder& d, double tol) {
  Spectrum s;
  s.eigenvalues = eigenvalues_by_index(d, 0, d.size(), tol);
  s.boundary = Boundary::dirichlet;
  s.disorder = d;
  return s;
}

std::vector<double> eigenvalues_sturm(const Disorder& d, double tol) {
  check_tol(tol);
  const auto [lo, hi] = dirichlet_bracket(d);
  return bisect_range([&](double x) { return sturm_count(d, x); }, d.size(), lo, hi, 0, d.size(), tol);
}

std::vector<double> eigenvalues_by_index(const Disorder& d, std::size_t first, std::size_t last, double tol) {
  check_tol(tol);
  if (first > last || last > d.size()) throw std::out_of_range("eigenvalue index range outside [0, N]");
  const auto [lo, hi] = dirichlet_bracket(d);
  return bisect_range([&](double x) { return phase_count_below(d, x); }, d.size(), lo, hi, first, last, tol);
}

std::vector<double> eigenvalues_in_window(const Disorder& d, double a, double b, double tol) {
  if (!(a <= b)) throw std::invalid_argument("window requires a <= b");
  const std::size_t first = phase_count_below(d, a);
  // Count of eigenvalues <= b: strictly below the next representable number.
  const std::size_t last = phase_count_below(d, std::nextafter(b, std::numeric_limits<double>::infinity()));
  if (first >= last) return {};
  return eigenvalues_by_index(d, first, last, tol);
}

double dirichlet_residual(const Disorder& d, double lambda, const std::vector<double>& u) {
  const std::size_t n = d.size();
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? u[k - 1] : 0.0;
    const double right = k + 1 < n ? u[k + 1] : 0.0;
    worst = std::max(worst, std::abs((d.values[k] - lambda) * u[k] - left - right));
  }
  return worst;
}

Eigenpair eigenvector(const Disorder& d, double lambda) {
  const std::size_t n = d.size();
  const PruferPath f = forward_path(d, lambda, PhaseAngle{});
  const PruferPath b = backward_path(d.values, lambda, PhaseAngle(kHalfPi));
  Glued g = glue(f, b);

  Eigenpair e;
  e.lambda = lambda;
  e.log_abs.resize(n);
  e.vector.resize(n);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= n; ++k) {
    e.log_abs[k - 1] = g.log_radii[k] + std::log(std::abs(g.directions[k].y));
    top = std::max(top, e.log_abs[k - 1]);
  }
  double norm2 = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double a = std::exp(e.log_abs[k - 1] - top);
    e.vector[k - 1] = std::copysign(a, g.directions[k].y);
    norm2 += a * a;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  double umax = 0.0;
  for (auto& x : e.vector) {
    x *= inv;
    umax = std::max(umax, std::abs(x));
  }

  std::size_t bad = 0;
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double left = k > 0 ? e.vector[k - 1] : 0.0;
    const double right = k + 1 < n ? e.vector[k + 1] : 0.0;
    const double r = std::abs((d.values[k] - lambda) * e.vector[k] - left - right);
    if (r > worst) {
      worst = r;
      bad = k + 1;
    }
  }
  e.residual = worst / umax;
  if (!(e.residual <= 1e-8)) {
    std::ostringstream os;
    os.precision(17);
    os << "eigenvector residual " << e.residual << " exceeds 1e-8 at site " << bad << " (lambda=" << lambda << ")";
    throw EigenvectorError(os.str(), bad);
  }

  e.directions = std::move(g.directions);
  e.profile.lambda = lambda;
  e.profile.q = std::move(g.log_radii);
  const auto it = std::max_element(e.profile.q.begin(), e.profile.q.end());
  const double qmax = *it;
  e.profile.center = static_cast<std::size_t>(it - e.profile.q.begin());
  for (auto& q : e.profile.q) q -= qmax;
  return e;
}

Spectrum full_spectrum(const Disorder& d, double tol) {
  Spectrum s = eigenvalues_dirichlet(d, tol);
  std::vector<std::vector<double>> vecs;
  vecs.reserve(s.eigenvalues.size());
  for (double lambda : s.eigenvalues) vecs.push_back(eigenvector(d, lambda).vector);
  s.eigenvectors = std::move(vecs);
  return s;
}

// --- periodic ---

namespace {

ScaledTransfer monodromy(const Disorder& d, double lambda) {
  // Left-multiplying by T(x) maps rows (a, b), (c, d) to (x a - c, x b - d), (a, b).
  ScaledTransfer st;
  double a = 1.0, b = 0.0, c = 0.0, e = 1.0;
  const std::size_t n = d.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double x = d.values[k] - lambda;
    const double na = x * a - c, nb = x * b - e;
    c = a;
    e = b;
    a = na;
    b = nb;
    if ((k & 15U) == 15U) {
      const double s = std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(e)));
      if (s > 1e100) {
        a /= s;
        b /= s;
        c /= s;
        e /= s;
        st.log_scale += std::log(s);
      }
    }
  }
  const double s = std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(e)));
  st.m = {a / s, b / s, c / s, e / s};
  st.log_scale += std::log(s);
  return st;
}

double bisect_root(const std::function<double(double)>& f, double a, double b, double fa, double tol) {
  for (;;) {
    if (b - a <= tol) break;
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = mid;
      fa = fm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double periodic_trace_condition(const Disorder& d, double lambda) {
  const ScaledTransfer st = monodromy(d, lambda);
  const double tr = st.m.trace();
  if (tr == 0.0) return -2.0;
  if (st.log_scale > 700.0) return std::copysign(std::numeric_limits<double>::infinity(), tr);
  return tr * std::exp(st.log_scale) - 2.0;
}

PeriodicSpectrum eigenvalues_periodic(const Disorder& d, std::size_t grid, double tol) {
  check_tol(tol);
  if (grid < 2) throw std::invalid_argument("periodic grid needs at least 2 cells");
  const std::function<double(double)> f = [&](double x) { return periodic_trace_condition(d, x); };
  const auto [lo, hi] = dirichlet_bracket(d);
  const double floor_width = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi)));

  std::vector<std::pair<double, bool>> roots;
  // A cell holding more roots than its end signs reveal (close pairs, or a
  // count/trace disagreement at rounding level) is halved until each part
  // holds one sign-changing root; parts narrower than the floor are emitted
  // as degenerate.
  std::function<void(double, double, double, double, std::size_t, std::size_t)> cell =
      [&](double a, double b, double fa, double fb, std::size_t ca, std::size_t cb) {
        const std::size_t k = cb - ca;
        if (k == 0) return;
        if (k == 1 && fa == 0.0) {
          roots.emplace_back(a, false);
          return;
        }
        if (k == 1 && ((fa > 0.0) != (fb > 0.0)) && fb != 0.0) {
          roots.emplace_back(bisect_root(f, a, b, fa, tol), false);
          return;
        }
        const double m = 0.5 * (a + b);
        if (b - a <= floor_width || m <= a || m >= b) {
          for (std::size_t j = 0; j < k; ++j) roots.emplace_back(m, k > 1);
          return;
        }
        const double fm = f(m);
        const std::size_t cm = std::clamp(periodic_sturm_count(d, m), ca, cb);
        cell(a, m, fa, fm, ca, cm);
        cell(m, b, fm, fb, cm, cb);
      };

  double xa = lo, fa = f(lo);
  std::size_t ca = periodic_sturm_count(d, lo);
  for (std::size_t i = 1; i <= grid; ++i) {
    const double xb = i == grid ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid);
    const double fb = f(xb);
    const std::size_t cb = std::max(ca, periodic_sturm_count(d, xb));
    cell(xa, xb, fa, fb, ca, cb);
    xa = xb;
    fa = fb;
    ca = cb;
  }

  PeriodicSpectrum out;
  std::sort(roots.begin(), roots.end());
  for (const auto& [x, deg] : roots) {
    out.roots.push_back(x);
    out.degenerate.push_back(deg);
  }
  if (out.roots.size() != d.size()) {
    std::ostringstream os;
    os << "periodic solver located " << out.roots.size() << " roots, expected " << d.size();
    out.warnings.push_back(os.str());
  }
  return out;
}

std::size_t periodic_sturm_count(const Disorder& d, double lambda) {
  const std::size_t n = d.size();
  const auto& v = d.values;
  if (n == 1) return (v[0] - 2.0 - lambda) < 0.0 ? 1 : 0;
  // Couplings of site N to the block: -1 at sites 1 and N-1 (both hit site 1 when N = 2).
  std::vector<double> b(n - 1, 0.0);
  b.front() -= 1.0;
  b.back() -= 1.0;
  std::vector<double> p(n - 1), z(n - 1);
  std::size_t neg = 0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    p[k] = (v[k] - lambda) - (k > 0 ? 1.0 / p[k - 1] : 0.0);
    if (p[k] == 0.0) p[k] = 1e-14;
    if (p[k] < 0.0) ++neg;
    z[k] = b[k] + (k > 0 ? z[k - 1] / p[k - 1] : 0.0);
  }
  // Back substitution of L D L^T y = b, then s = c - b^T y.
  double y = z[n - 2] / p[n - 2];
  double bty = b[n - 2] * y;
  for (std::size_t k = n - 2; k-- > 0;) {
    y = z[k] / p[k] + y / p[k];
    bty += b[k] * y;
  }
  const double schur = (v[n - 1] - lambda) - bty;
  return neg + (schur < 0.0 ? 1 : 0);
}

PeriodicProfile periodic_eigenvector(const Disorder& d, double lambda) {
  const ScaledTransfer st = monodromy(d, lambda);
  // Kernel of M - I, computed as M_hat - exp(-s) I to stay finite.
  const double shrink = std::exp(-st.log_scale);
  const Transfer2& m = st.m;
  const Vec2 v1{m.b, shrink - m.a};
  const Vec2 v2{shrink - m.d, m.c};
  const Vec2 z0 = v1.norm() >= v2.norm() ? v1 : v2;
  const PhaseAngle phi0 = PhaseAngle::of(z0);
  const PruferPath f = forward_path(d, lambda, phi0);
  const PruferPath b = backward_path(d.values, lambda, phi0);
  Glued g = glue(f, b);
  return {std::move(g.log_radii), std::move(g.directions)};
}

}  // namespace anderson

#include <doctest.h>

#include <cmath>
#include <vector>

#include "anderson/spectrum.hpp"

using namespace anderson;

namespace {

Disorder zeros(std::size_t n) { return make_disorder(std::vector<double>(n, 0.0)); }

Disorder uniform01(std::size_t n, std::uint64_t seed) {
  return sample_disorder(PotentialSpec::uniform(0.0, 1.0), n, seed);
}

}  // namespace

TEST_CASE("theta_end of one free site at lambda 0") {
  CHECK(theta_end(zeros(1), 0.0).value == doctest::Approx(kHalfPi));
}

TEST_CASE("theta_end agrees with the lifted forward path") {
  const auto d = uniform01(300, 2);
  for (double lambda : {-2.5, -0.3, 0.5, 1.7, 3.2}) {
    const PruferPath p = forward_path(d, lambda);
    CHECK(theta_end(d, lambda).value == doctest::Approx(p.lifts.back().value).epsilon(1e-12));
  }
}

TEST_CASE("theta_end is strictly increasing in lambda") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto d = uniform01(200, seed);
    double prev = theta_end(d, -2.5).value;
    for (int i = 1; i < 100; ++i) {
      const double lambda = -2.5 + 6.0 * i / 99.0;
      const double t = theta_end(d, lambda).value;
      CHECK(t > prev);
      const double h = 1e-6;
      CHECK(theta_end(d, lambda + h).value - theta_end(d, lambda - h).value > 0.0);
      prev = t;
    }
  }
}

TEST_CASE("free chain eigenvalues in closed form") {
  const Spectrum s3 = eigenvalues_dirichlet(zeros(3), 1e-12);
  REQUIRE(s3.eigenvalues.size() == 3);
  CHECK(s3.eigenvalues[0] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-12));
  CHECK(std::abs(s3.eigenvalues[1]) <= 1e-12);
  CHECK(s3.eigenvalues[2] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  const Spectrum s = eigenvalues_dirichlet(zeros(100), 1e-12);
  REQUIRE(s.eigenvalues.size() == 100);
  double worst = 0.0;
  for (std::size_t j = 1; j <= 100; ++j)
    worst = std::max(worst, std::abs(s.eigenvalues[100 - j] - 2.0 * std::cos(static_cast<double>(j) * kPi / 101.0)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("phase bisection and Sturm bisection agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = uniform01(200, seed);
    const auto a = eigenvalues_dirichlet(d, 1e-12).eigenvalues;
    const auto b = eigenvalues_sturm(d, 1e-12);
    REQUIRE(a.size() == 200);
    REQUIRE(b.size() == 200);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    CHECK(worst <= 1e-10);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
    CHECK(a.front() >= d.min() - 2.0);
    CHECK(a.back() <= d.max() + 2.0);
  }
}

TEST_CASE("sturm_count examples") {
  CHECK(sturm_count(zeros(3), 0.0) == 1);
  const auto d = uniform01(50, 4);
  CHECK(sturm_count(d, d.min() - 2.01) == 0);
  CHECK(sturm_count(d, d.max() + 2.01) == 50);
}

TEST_CASE("sturm_count agrees with the phase count") {
  Rng rng(7);
  std::uniform_real_distribution<double> lam(-2.5, 3.5);
  for (int i = 0; i < 100; ++i) {
    const auto d = uniform01(80, 100 + i);
    const double lambda = lam(rng);
    CHECK(sturm_count(d, lambda) == phase_count_below(d, lambda));
  }
}

TEST_CASE("eigenvalue windows and index ranges") {
  const auto d = uniform01(120, 9);
  const auto all = eigenvalues_dirichlet(d).eigenvalues;
  const auto mid = eigenvalues_by_index(d, 30, 40);
  REQUIRE(mid.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(mid[i] == doctest::Approx(all[30 + i]).epsilon(1e-12));
  const auto win = eigenvalues_in_window(d, 0.0, 1.0);
  std::size_t expect = 0;
  for (double x : all) expect += (x >= 0.0 && x <= 1.0) ? 1 : 0;
  CHECK(win.size() == expect);
}

TEST_CASE("free eigenvector for lambda = sqrt 2") {
  const Eigenpair e = eigenvector(zeros(3), std::sqrt(2.0));
  const double s = e.vector[0] > 0 ? 1.0 : -1.0;
  CHECK(s * e.vector[0] == doctest::Approx(0.5));
  CHECK(s * e.vector[1] == doctest::Approx(-std::sqrt(0.5)));
  CHECK(s * e.vector[2] == doctest::Approx(0.5));
  CHECK(e.profile.q[e.profile.center] == 0.0);
}

TEST_CASE("eigenvector residuals and completeness at N = 500") {
  const auto d = uniform01(500, 13);
  const Spectrum s = full_spectrum(d);
  REQUIRE(s.eigenvectors.has_value());
  std::vector<double> total(500, 0.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < 500; ++j) {
    const auto& u = (*s.eigenvectors)[j];
    double norm = 0.0, umax = 0.0;
    for (std::size_t x = 0; x < 500; ++x) {
      total[x] += u[x] * u[x];
      norm += u[x] * u[x];
      umax = std::max(umax, std::abs(u[x]));
    }
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    worst = std::max(worst, dirichlet_residual(d, s.eigenvalues[j], u) / umax);
  }
  CHECK(worst <= 1e-8);
  double completeness = 0.0;
  for (double t : total) completeness = std::max(completeness, std::abs(t - 1.0));
  CHECK(completeness <= 1e-8);
}

TEST_CASE("eigenvector profile satisfies radius recovery on both halves") {
  const auto d = uniform01(300, 15);
  const double lambda = eigenvalues_by_index(d, 150, 151).front();
  const Eigenpair e = eigenvector(d, lambda);
  CHECK(*std::max_element(e.profile.q.begin(), e.profile.q.end()) == 0.0);
  std::size_t checked = 0;
  for (std::size_t k = 0; k + 1 < e.directions.size(); ++k) {
    const double phi0 = PhaseAngle::of(e.directions[k]).value();
    const double phi1 = PhaseAngle::of(e.directions[k + 1]).value();
    if (std::abs(std::sin(phi1)) < 1e-3) continue;
    const double ratio = std::exp(e.profile.q[k + 1] - e.profile.q[k]);
    CHECK(std::abs(ratio / (std::cos(phi0) / std::sin(phi1)) - 1.0) <= 1e-6);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("eigenvalue solver rejects a bad tolerance") {
  CHECK_THROWS(eigenvalues_dirichlet(zeros(3), -1.0));
}

TEST_CASE("free periodic roots") {
  const PeriodicSpectrum p = eigenvalues_periodic(zeros(8), 400);
  REQUIRE(p.roots.size() == 8);
  CHECK(p.warnings.empty());
  std::vector<double> expect;
  for (int j = 0; j < 8; ++j) expect.push_back(2.0 * std::cos(2.0 * kPi * j / 8.0));
  std::sort(expect.begin(), expect.end());
  // Touching roots are resolved only to about sqrt(machine epsilon).
  for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(p.roots[i] - expect[i]) <= 1e-7);
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < 8; ++i) distinct += p.roots[i] - p.roots[i - 1] > 1e-6 ? 1 : 0;
  CHECK(distinct == 5);
}

TEST_CASE("free trace is a Chebyshev polynomial") {
  CHECK(periodic_trace_condition(zeros(6), 1.0) + 2.0 == doctest::Approx(2.0 * std::cos(6.0 * kPi / 3.0)));
  CHECK(periodic_trace_condition(zeros(7), 0.3) + 2.0 == doctest::Approx(2.0 * std::cos(7.0 * std::acos(-0.15))));
}

TEST_CASE("periodic roots over a seed sweep") {
  const double tol = 1e-12;
  std::size_t warned = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto d = sample_disorder(PotentialSpec::uniform(0.0, 0.3), 100, seed);
    const PeriodicSpectrum p = eigenvalues_periodic(d, 400, tol);
    warned += p.warnings.empty() ? 0 : 1;
    for (std::size_t i = 0; i < p.roots.size(); ++i) {
      if (p.degenerate[i]) continue;
      const double x = p.roots[i];
      const double fl = periodic_trace_condition(d, x - tol), fr = periodic_trace_condition(d, x + tol);
      const double f = periodic_trace_condition(d, x);
      CHECK((std::abs(f) <= tol || (fl <= 0.0) != (fr <= 0.0)));
    }
  }
  CHECK(warned <= 10);
}

TEST_CASE("periodic roots match the independent periodic count") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), 150, seed);
    const PeriodicSpectrum p = eigenvalues_periodic(d, 600);
    REQUIRE(p.roots.size() == 150);
    for (std::size_t i = 0; i + 1 < p.roots.size(); ++i) {
      if (p.roots[i + 1] - p.roots[i] < 1e-9) continue;
      CHECK(periodic_sturm_count(d, 0.5 * (p.roots[i] + p.roots[i + 1])) == i + 1);
    }
  }
}

TEST_CASE("periodic roots interlace with the Dirichlet spectrum of N - 1 sites") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = sample_disorder(PotentialSpec::uniform(0.0, 0.3), 200, seed);
    const PeriodicSpectrum p = eigenvalues_periodic(d, 800);
    const auto inner = eigenvalues_dirichlet(
                           make_disorder(std::vector<double>(d.values.begin(), d.values.end() - 1)))
                           .eigenvalues;
    REQUIRE(p.roots.size() == 200);
    for (std::size_t i = 0; i < inner.size(); ++i) {
      CHECK(p.roots[i] <= inner[i] + 1e-9);
      CHECK(inner[i] <= p.roots[i + 1] + 1e-9);
    }
  }
}

TEST_CASE("periodic count examples") {
  CHECK(periodic_sturm_count(zeros(8), -2.1) == 0);
  CHECK(periodic_sturm_count(zeros(8), 0.5) == 5);
  CHECK(periodic_sturm_count(zeros(8), 2.1) == 8);
  CHECK(periodic_sturm_count(zeros(1), 0.0) == 1);
}

TEST_CASE("periodic eigenvector closes around the ring") {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 0.3), 400, 5);
  const PeriodicSpectrum p = eigenvalues_periodic(d, 1600);
  const double lambda = p.roots[200];
  const PeriodicProfile prof = periodic_eigenvector(d, lambda);
  REQUIRE(prof.log_radii.size() == 401);
  const Vec2 a = prof.directions.front(), b = prof.directions.back();
  CHECK(std::abs(a.x * b.y - a.y * b.x) <= 1e-6);
  CHECK(std::abs(prof.log_radii.back() - prof.log_radii.front()) <= 1e-6);
}

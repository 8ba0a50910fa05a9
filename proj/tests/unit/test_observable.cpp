#include <doctest.h>

#include <cmath>
#include <vector>

#include "anderson/density.hpp"
#include "anderson/observable.hpp"
#include "anderson/prufer.hpp"
#include "anderson/spectrum.hpp"
#include "anderson/stats.hpp"

using namespace anderson;

TEST_CASE("observable parsing round-trips through name") {
  for (const char* text : {"all", "window:0.5:1.5", "sin2:0.5:1.5:20", "psi2:-1:1:3"}) {
    const Observable o = Observable::parse(text);
    CHECK(Observable::parse(o.name()).name() == o.name());
  }
  CHECK(Observable::parse("sin2:0.5:1.5:20").site == 20);
  CHECK_THROWS_AS(Observable::parse("window:2:1"), std::invalid_argument);
  CHECK_THROWS_AS(Observable::parse("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(Observable::parse("sin2:0:1"), std::invalid_argument);
}

TEST_CASE("window observables are closed intervals") {
  const Observable w = Observable::window(0.0, 1.0);
  CHECK(w.active(0.0));
  CHECK(w.active(1.0));
  CHECK_FALSE(w.active(1.0 + 1e-12));
  CHECK(Observable::all().active(-1e9));
}

TEST_CASE("psi2 rebuilt from phases matches the eigenvector") {
  const auto d = sample_disorder(PotentialSpec::uniform(0.0, 1.0), 30, 2);
  const double lambda = eigenvalues_by_index(d, 12, 13).front();
  const Eigenpair e = eigenvector(d, lambda);
  std::vector<double> phases;
  for (const auto& v : e.directions) phases.push_back(PhaseAngle::of(v).value());
  const PhaseView view{phases, phases, 0};
  for (std::size_t x = 1; x <= 30; x += 7)
    CHECK(psi2_from_phases(view, x) == doctest::Approx(e.vector[x - 1] * e.vector[x - 1]).epsilon(1e-8));
  const Observable s = Observable::window_sin2(-5.0, 5.0, 4);
  const double sn = std::sin(phases[4]);
  CHECK(s(lambda, view) == doctest::Approx(sn * sn));
}

TEST_CASE("empirical density normalization and reflection") {
  std::vector<double> angles;
  for (int i = 0; i < 1000; ++i) angles.push_back(0.001 * i);
  const auto h = histogram(angles, 32);
  CHECK(h.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.bin_of(kPi + 0.01) == 0);
  const auto r = h.reflected();
  CHECK(r.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tv_distance(r.reflected(), h) == doctest::Approx(0.0));
  CHECK(tv_distance(h, h) == 0.0);
}

TEST_CASE("stats helpers") {
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
  const std::vector<double> y{3.0, 5.0, 7.0, 9.0};
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  CHECK(mean(x) == doctest::Approx(2.5));
  CHECK(variance(x) == doctest::Approx(5.0 / 3.0));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(interpolate(x, y, 2.5) == doctest::Approx(6.0));
  CHECK(interpolate(x, y, 10.0) == doctest::Approx(9.0));
  CHECK(ks_uniform({0.1, 0.3, 0.5, 0.7, 0.9}) == doctest::Approx(0.1));
}

#include <doctest.h>

#include <cmath>
#include <vector>

#include "anderson/fb_process.hpp"
#include "anderson/spectrum.hpp"

using namespace anderson;

namespace {

const PotentialSpec kUniform = PotentialSpec::uniform(0.0, 1.0);

std::vector<double> mod_pi(const std::vector<PhaseAngle>& phases) {
  std::vector<double> out;
  for (const auto& p : phases) out.push_back(p.mod_pi());
  return out;
}

}  // namespace

TEST_CASE("forward and backward samples of length zero") {
  const auto f = forward_sample(kUniform, 0, 0.5, 1);
  REQUIRE(f.size() == 1);
  CHECK(f[0].value() == 0.0);
  const auto b = backward_sample(kUniform, 0, 0.5, 1);
  REQUIRE(b.size() == 1);
  CHECK(b[0].value() == doctest::Approx(kHalfPi));
}

TEST_CASE("vanishing potential reproduces the deterministic rotation") {
  const auto spec = PotentialSpec::uniform(-1e-9, 1e-9);
  const auto f = forward_sample(spec, 30, 0.0, 3);
  const PruferPath p = forward_path(std::vector<double>(30, 0.0), 0.0);
  for (std::size_t k = 0; k <= 30; ++k)
    CHECK(std::abs(std::remainder(f[k].value() - p.phases[k].value(), kTwoPi)) <= 1e-6);
}

TEST_CASE("forward phase density is stationary by k = 200") {
  const auto a = phase_density(kUniform, 200, 0.5, 100000, 64, 5);
  const auto b = phase_density(kUniform, 400, 0.5, 100000, 64, 6);
  CHECK(tv_distance(a, b) <= 0.02);
}

TEST_CASE("phase density examples") {
  const auto d0 = phase_density(kUniform, 0, 0.5, 1000, 64, 1);
  CHECK(d0.probabilities()[0] == doctest::Approx(1.0));
  const auto d = phase_density(kUniform, 50, 0.5, 20000, 128, 2);
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(phase_density(kUniform, 5, 0.5, 100, 8, 1), std::invalid_argument);
}

TEST_CASE("phase density is stationary between k = 300 and k = 600") {
  const auto a = phase_density(kUniform, 300, 0.5, 100000, 64, 7);
  const auto b = phase_density(kUniform, 600, 0.5, 100000, 64, 8);
  CHECK(tv_distance(a, b) <= 0.03);
}

TEST_CASE("backward density is the forward density reflected through pi/2") {
  const auto f = phase_density(kUniform, 200, 0.5, 100000, 64, 9);
  const auto b = backward_phase_density(kUniform, 200, 0.5, 100000, 64, 10);
  CHECK(tv_distance(b, f.reflected()) <= 0.05);
}

TEST_CASE("backward map undoes a forward path with the same potentials") {
  const auto d = sample_disorder(kUniform, 40, 12);
  const PruferPath f = forward_path(d, 0.7);
  PhaseAngle phi = f.phases.back();
  for (std::size_t k = d.size(); k >= 1; --k) {
    phi = phase_step_inv(phi, d.values[k - 1], 0.7);
    CHECK(std::abs(std::remainder(phi.value() - f.phases[k - 1].value(), kTwoPi)) <= 1e-10);
  }
}

TEST_CASE("fb_weight examples and symmetries") {
  CHECK(fb_weight(PhaseAngle(0.25 * kPi), PhaseAngle(0.25 * kPi), 0.05) == doctest::Approx(5.0));
  for (double h : {0.01, 0.1, 0.5}) {
    const double s = std::sin(0.1);
    CHECK(fb_weight(PhaseAngle(0.1), PhaseAngle(0.1 + kPi), h) == doctest::Approx(s * s / (2.0 * h)));
  }
  CHECK(fb_weight(PhaseAngle(1.0), PhaseAngle(1.2), 0.1) == 0.0);
  CHECK_THROWS_AS(fb_weight(PhaseAngle(1.0), PhaseAngle(1.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fb_weight(PhaseAngle(1.0), PhaseAngle(1.0), 0.8), std::invalid_argument);
  Rng rng(3);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int i = 0; i < 500; ++i) {
    const double a = ang(rng), b = a + std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
    const double w = fb_weight(PhaseAngle(a), PhaseAngle(b), 0.1);
    CHECK(w >= 0.0);
    CHECK(fb_weight(PhaseAngle(a + kPi), PhaseAngle(b + kPi), 0.1) == doctest::Approx(w));
    CHECK(fb_weight(PhaseAngle(a), PhaseAngle(b + kPi), 0.1) == doctest::Approx(w));
  }
}

TEST_CASE("lhs of the constant observable is exactly N") {
  const auto e = lhs_estimate({Observable::all()}, kUniform, 25, 20, 1);
  CHECK(e[0].value == 25.0);
  CHECK(e[0].stderr == 0.0);
}

TEST_CASE("lhs below the Gershgorin bound is zero") {
  const auto e = lhs_estimate({Observable::window(-10.0, -2.0 - 1e-9)}, kUniform, 25, 20, 2);
  CHECK(e[0].value == 0.0);
}

TEST_CASE("lhs window count equals the Sturm count average") {
  const std::size_t n = 40, reps = 200;
  const auto e = lhs_estimate({Observable::window(0.0, 1.0)}, kUniform, n, reps, 3);
  double total = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto d = sample_disorder(kUniform, n, derive_seed(3, {r}));
    total += static_cast<double>(sturm_count(d, std::nextafter(1.0, 2.0)) - sturm_count(d, 0.0));
  }
  CHECK(e[0].value == doctest::Approx(total / static_cast<double>(reps)));
}

TEST_CASE("rhs of the constant observable recovers N") {
  RhsOptions o;
  o.pairs = 200;
  o.replicas = 10;
  o.cells = 200;
  o.bandwidths = {0.05};
  o.seed = 4;
  const auto r = rhs_estimate({Observable::all()}, kUniform, 10, o);
  const Estimate& e = r.estimates[0][0];
  CHECK(std::abs(e.value - 10.0) <= 3.0 * e.stderr);
  CHECK(e.stderr > 0.0);
}

TEST_CASE("rhs is stable under doubling the lambda grid") {
  RhsOptions o;
  o.pairs = 400;
  o.replicas = 10;
  o.cells = 200;
  o.bandwidths = {0.05};
  o.seed = 5;
  const std::vector<Observable> g{Observable::window(0.5, 1.5)};
  const auto a = rhs_estimate(g, kUniform, 12, o);
  o.cells = 400;
  o.seed = 6;
  const auto b = rhs_estimate(g, kUniform, 12, o);
  const double se = std::hypot(a.estimates[0][0].stderr, b.estimates[0][0].stderr);
  CHECK(std::abs(a.estimates[0][0].value - b.estimates[0][0].value) <= 3.0 * se);
}

TEST_CASE("rhs warns on kernel starvation") {
  RhsOptions o;
  o.pairs = 20;
  o.replicas = 2;
  o.cells = 20;
  o.bandwidths = {0.02};
  const auto r = rhs_estimate({Observable::all()}, kUniform, 5, o);
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("derivative identity on the free pair of sites") {
  const auto c = dtheta_identity_check(make_disorder({0.0, 0.0}), 0.0);
  CHECK(std::abs(c.identity - c.finite_difference) <= 1e-6);
  CHECK(c.identity > 0.0);
}

TEST_CASE("derivative identity on random instances") {
  Rng rng(17);
  std::uniform_real_distribution<double> lam(-2.0, 3.0);
  for (std::size_t i = 0; i < 100; ++i) {
    const auto d = sample_disorder(kUniform, 100, derive_seed(17, {i}));
    const auto c = dtheta_identity_check(d, lam(rng));
    CHECK(c.relative_error <= 1e-4);
    CHECK(c.identity > 0.0);
  }
}

TEST_CASE("mod_pi_distance") {
  CHECK(mod_pi_distance(0.1, 0.1 + kPi) == doctest::Approx(0.0));
  CHECK(mod_pi_distance(0.05, kPi - 0.05) == doctest::Approx(0.1));
  CHECK(mod_pi_distance(1.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("forward samples are deterministic and independent across seeds") {
  CHECK(mod_pi(forward_sample(kUniform, 20, 0.3, 1)) == mod_pi(forward_sample(kUniform, 20, 0.3, 1)));
  CHECK(mod_pi(forward_sample(kUniform, 20, 0.3, 1)) != mod_pi(forward_sample(kUniform, 20, 0.3, 2)));
}

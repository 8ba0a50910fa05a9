#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "anderson/density.hpp"
#include "anderson/engine.hpp"
#include "anderson/observable.hpp"
#include "anderson/potential.hpp"
#include "anderson/prufer.hpp"

namespace anderson {

struct Estimate {
  double value = 0.0;
  double stderr = 0.0;
  std::size_t samples = 0;
};

/// phi_0 = 0, ..., phi_k of the forward chain driven by fresh iid draws.
std::vector<PhaseAngle> forward_sample(const PotentialSpec& spec, std::size_t k, double lambda, std::uint64_t seed);

/// phi_N = pi/2, phi_{N-1}, ..., phi_{N-m} of the backward chain (element i is phi_{N-i}).
std::vector<PhaseAngle> backward_sample(const PotentialSpec& spec, std::size_t m, double lambda, std::uint64_t seed);

/// min over integers m of |a - b - m*pi|.
double mod_pi_distance(double a, double b) noexcept;

/// Box-kernel regularization of delta(phi_f - phi_b mod pi) sin^2(phi_f):
/// sin^2(phi_f) / (2h) when the mod-pi distance is <= h, else 0.
double fb_weight(PhaseAngle phi_f, PhaseAngle phi_b, double h);

struct RhsOptions {
  std::size_t cells = 400;          // uniform cells over the full lambda interval
  std::size_t pairs = 2000;         // forward/backward chain pairs per lambda point
  std::size_t replicas = 20;        // independent replicas for the standard error
  std::vector<double> bandwidths{0.02};
  double margin = 0.1;              // slack beyond [min support - 2, max support + 2]
  std::uint64_t seed = 0;
};

struct RhsResult {
  std::vector<double> bandwidths;
  std::vector<std::vector<Estimate>> estimates;  // [bandwidth][observable]
  std::vector<double> grid;                      // lambda points actually sampled
  std::size_t fb_samples = 0;                    // (lambda, cut, pair) triples
  std::vector<std::string> warnings;
};

/// Monte Carlo estimate of the forward-backward side of the identity,
///   int dlambda sum_{k=1}^N E[G(lambda, X_k) K_h(phi_k^f - phi_k^b) sin^2(phi_k^f)],
/// where X_k glues the forward path on [0, k] to the backward path on [k, N].
/// One pair of independent full-length chains serves every cut k. All
/// bandwidths are evaluated on the same samples.
RhsResult rhs_estimate(const std::vector<Observable>& observables, const PotentialSpec& spec, std::size_t n,
                       const RhsOptions& options, const Executor& ex = {});

/// E[sum over Dirichlet eigenpairs of G(lambda, eigenvector phases)] over
/// `realizations` disorder draws.
std::vector<Estimate> lhs_estimate(const std::vector<Observable>& observables, const PotentialSpec& spec,
                                   std::size_t n, std::size_t realizations, std::uint64_t seed,
                                   const Executor& ex = {});

struct DthetaCheck {
  double identity = 0.0;           // sum_k (r_k / r_N)^2 sin^2(phi_k)
  double finite_difference = 0.0;  // central difference of theta_N
  double relative_error = 0.0;
};

DthetaCheck dtheta_identity_check(const Disorder& d, double lambda, double step = 1e-6);

/// Histogram (mod pi) of phi_k of the forward chain started at 0.
EmpiricalDensity phase_density(const PotentialSpec& spec, std::size_t k, double lambda, std::size_t samples,
                               std::size_t bins, std::uint64_t seed, const Executor& ex = {});

/// Same for the backward chain started at pi/2 after m steps.
EmpiricalDensity backward_phase_density(const PotentialSpec& spec, std::size_t m, double lambda,
                                        std::size_t samples, std::size_t bins, std::uint64_t seed,
                                        const Executor& ex = {});

}  // namespace anderson

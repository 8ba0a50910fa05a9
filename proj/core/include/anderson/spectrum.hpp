#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "anderson/potential.hpp"
#include "anderson/prufer.hpp"

namespace anderson {

// The Hamiltonian is the N x N tridiagonal matrix with diagonal V_k and
// off-diagonal -1, i.e. (Hu)_k = V_k u_k - u_{k-1} - u_{k+1}; this is the
// sign convention of the transfer matrix T(x) = ((x, -1), (1, 0)).

enum class Boundary { dirichlet, periodic };

class SpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EigenvectorError : public std::runtime_error {
 public:
  EigenvectorError(const std::string& what, std::size_t site) : std::runtime_error(what), site_(site) {}
  std::size_t site() const noexcept { return site_; }

 private:
  std::size_t site_;
};

struct Spectrum {
  std::vector<double> eigenvalues;                        // sorted ascending
  std::optional<std::vector<std::vector<double>>> eigenvectors;  // [j] = normalized psi_j, sites 1..N
  Boundary boundary = Boundary::dirichlet;
  Disorder disorder;
  std::vector<std::string> warnings;
};

/// theta_N(lambda): lift of the Dirichlet forward phase started at phi_0 = 0.
/// Uses quadrant counting, so it costs one atan2 per call rather than per site.
LiftedPhase theta_end(const Disorder& d, double lambda);

/// Number of Dirichlet eigenvalues strictly below lambda, read off theta_N.
std::size_t phase_count_below(const Disorder& d, double lambda);

/// Number of Dirichlet eigenvalues strictly below lambda from the LDL^T pivot
/// signs of H - lambda. Independent of the phase machinery.
std::size_t sturm_count(const Disorder& d, double lambda);

/// Bracket [min V - 3, max V + 3] used by the bisection solvers.
std::pair<double, double> dirichlet_bracket(const Disorder& d);

/// All N Dirichlet eigenvalues by bisection on theta_N(lambda) = pi/2 + m*pi.
/// Each eigenvalue is localized to an interval of width <= tol (tol = 0 runs
/// to machine precision). Throws SpectrumError if the bracket does not hold
/// exactly N crossings.
Spectrum eigenvalues_dirichlet(const Disorder& d, double tol = 1e-12);

/// Same, using sturm_count. Test oracle for eigenvalues_dirichlet.
std::vector<double> eigenvalues_sturm(const Disorder& d, double tol = 1e-12);

/// Eigenvalues with index in [first, last) (0-based, ascending order).
std::vector<double> eigenvalues_by_index(const Disorder& d, std::size_t first, std::size_t last,
                                         double tol = 1e-12);

/// Eigenvalues lying in [a, b].
std::vector<double> eigenvalues_in_window(const Disorder& d, double a, double b, double tol = 1e-12);

/// q_k = log r_k normalized so max q = 0, k = 0..N.
struct EigvecProfile {
  std::vector<double> q;
  std::size_t center = 0;
  double lambda = 0.0;
};

struct Eigenpair {
  double lambda = 0.0;
  std::vector<double> vector;   // u_1..u_N, unit Euclidean norm
  std::vector<double> log_abs;  // log|u_k| before normalization, k = 1..N
  std::vector<Vec2> directions; // unit direction of z_k = (u_{k+1}, u_k), k = 0..N
  EigvecProfile profile;
  double residual = 0.0;        // max_k |(Hu - lambda u)_k| / max_k |u_k|
};

/// Two-sided shooting: forward from u_0 = 0, backward from u_{N+1} = 0,
/// matched at the site of maximal amplitude. Throws EigenvectorError if the
/// residual exceeds 1e-8 * max|u|.
Eigenpair eigenvector(const Disorder& d, double lambda);

/// Eigenvalues plus normalized eigenvectors.
Spectrum full_spectrum(const Disorder& d, double tol = 1e-12);

/// Residual max_k |(Hu - lambda u)_k| for a vector u_1..u_N.
double dirichlet_residual(const Disorder& d, double lambda, const std::vector<double>& u);

// --- periodic boundary ---

/// Tr(M_N(lambda)) - 2, evaluated from a renormalized product.
double periodic_trace_condition(const Disorder& d, double lambda);

struct PeriodicSpectrum {
  std::vector<double> roots;       // sorted; a touching root is listed twice
  std::vector<bool> degenerate;    // per root: located as a double (touching) root
  std::vector<std::string> warnings;
};

/// Roots of Tr M_N(lambda) = 2 located on a uniform grid of `grid` cells over
/// [min V - 3, max V + 3] by sign changes and refined by bisection to width
/// <= tol. Cells whose periodic_sturm_count exceeds the visible sign changes
/// are halved until the roots separate; pairs that never separate are listed
/// twice and flagged degenerate. Emits a warning when the root count differs
/// from N.
PeriodicSpectrum eigenvalues_periodic(const Disorder& d, std::size_t grid, double tol = 1e-12);

/// Number of eigenvalues of the periodic matrix (corner entries -1) strictly
/// below lambda, from the inertia of the Dirichlet block on sites 1..N-1 plus
/// the sign of the Schur complement of site N. Independent of the trace.
std::size_t periodic_sturm_count(const Disorder& d, double lambda);

/// Periodic eigenvector at a trace root: log r_k of z_k = M_k z_0 with z_0 the
/// fixed vector of M_N, k = 0..N, plus unit directions.
struct PeriodicProfile {
  std::vector<double> log_radii;
  std::vector<Vec2> directions;
};
PeriodicProfile periodic_eigenvector(const Disorder& d, double lambda);

}  // namespace anderson

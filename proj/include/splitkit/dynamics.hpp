#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "splitkit/gaussian.hpp"
#include "splitkit/measure.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/stats.hpp"
#include "splitkit/subspace.hpp"
#include "splitkit/subspace_distribution.hpp"

namespace splitkit {

// A tagged particle in an i.i.d. bath.  At the points of a Poisson(rate)
// clock the particle meets a fresh bath velocity v_* and a fresh subspace
// E ~ xi; it keeps its E-component and exchanges the E^perp-component.
class CollisionScene {
 public:
  /// Throws std::invalid_argument on dimension mismatch or rate <= 0.
  CollisionScene(SubspaceDistribution xi, MeasureSpec bath,
                 MeasureSpec initial, double rate = 1.0);

  const SubspaceDistribution& xi() const { return xi_; }
  const MeasureSpec& bath() const { return bath_; }
  const MeasureSpec& initial() const { return initial_; }
  double rate() const { return rate_; }
  int dim() const { return xi_.ambient_dim(); }

 private:
  SubspaceDistribution xi_;
  MeasureSpec bath_;
  MeasureSpec initial_;
  double rate_;
};

/// One collision: both particles keep their E-component and swap the
/// E^perp-component.  Conserves total kinetic energy and momentum exactly.
std::pair<Eigen::VectorXd, Eigen::VectorXd> collide(
    const Eigen::VectorXd& v, const Eigen::VectorXd& v_star, const Subspace& e);

// Jump skeleton of one particle path: entry 0 is the initial condition at
// time 0, then one entry per collision.  The velocity is constant between
// jumps.  atom_indices[j] is the xi-atom met at jump j; -1 marks the initial
// entry and subspaces drawn from a continuous xi.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<int> atom_indices;
};

/// Simulates independent particle paths up to t_end.  Each path runs on its
/// own seed substream, so the output is bit-identical for any worker count.
std::vector<Trajectory> simulate(const CollisionScene& scene, double t_end,
                                 int n_paths, std::uint64_t seed, int jobs = 0);

/// Generator at a point:
///   (Lf)(v) = rate * E_xi E_bath[ f(P_E v + P_{E^perp} v_*) - f(v) ].
/// The xi-average is an exact sum over atoms (one subspace draw per sample
/// when xi is continuous); the bath average is Monte Carlo.
McEstimate generator_apply(const std::function<double(const Eigen::VectorXd&)>& f,
                           const CollisionScene& scene, const Eigen::VectorXd& v,
                           int n_mc, std::uint64_t seed);

// Moments of V_t at the query times.  The mean solves
// theta' = rate (Q - I) theta + rate (I - Q) m_bath, and the second moment the
// matching linear jump equation; both are integrated together with a
// fixed-step fourth-order Runge-Kutta scheme (step ~1e-3 per unit of
// rate-time, far below every tolerance used downstream).
struct MomentEvolution {
  Eigen::MatrixXd q;  // mean projector of xi
  std::vector<double> times;
  std::vector<Eigen::VectorXd> means;
  std::vector<Eigen::MatrixXd> covariances;
};

/// Requires a Gaussian bath, a Gaussian initial law, and discrete xi; times
/// must be nonnegative and nondecreasing.  Throws std::invalid_argument.
MomentEvolution moment_evolution(const CollisionScene& scene,
                                 const std::vector<double>& times);

// Law of V_t for bath = standard Gaussian and initial N(theta, I): a finite
// mixture of unit-covariance Gaussians, one component per collision word
// E_1...E_k with mean P_{E_k}...P_{E_1} theta and Poisson(rate*t) length
// weights, truncated at word length trunc_k.  Words with equal means are
// merged level by level, so the component list stays small even when the raw
// word count is large.
struct NuT {
  std::vector<double> weights;         // sum to 1 - truncation_mass
  std::vector<Eigen::VectorXd> means;  // every component has identity covariance
  double truncation_mass = 0.0;
  Eigen::VectorXd initial_mean;

  /// Density of the truncated (unnormalized) mixture; integrates to
  /// 1 - truncation_mass.
  double density(const Eigen::VectorXd& x) const;
  double log_density(const Eigen::VectorXd& x) const;

  /// Draw from the normalized truncated mixture.
  Eigen::VectorXd sample(Rng& rng) const;
};

/// Requires bath = standard Gaussian, initial = N(theta, I), discrete xi with
/// a atoms, and an enumeration budget a^trunc_k <= 1e6.  Throws
/// std::invalid_argument when a precondition or the budget fails.
NuT nu_t_density(const CollisionScene& scene, double t, int trunc_k);

/// Poisson(mean) tail mass P(N > k): the truncation mass of nu_t_density.
double poisson_tail(double mean, int k);

/// Smallest k with poisson_tail(mean, k) < bound.
int poisson_trunc_k(double mean, double bound);

// Relative entropy estimate with the statistical error and the truncation
// bias reported separately.
struct KlEstimate {
  double value = 0.0;
  double se = 0.0;
  std::int64_t n = 0;
  double bias_bound = 0.0;  // conservative bound on the truncation bias

  double ci_halfwidth(double z = 3.0) const { return z * se; }
};

/// D(nu || reference) by importance sampling with the mixture itself as the
/// (self-normalized) proposal.  Requires a full-rank reference; a degenerate
/// reference makes the divergence infinite and is reported as such.
KlEstimate kl_to_gaussian(const NuT& nu, const GaussianMeasure& reference,
                          int n_mc, std::uint64_t seed);

/// Closed-form Donsker-Varadhan lower bound on D(nu_t || gamma):
///   n/(2 beta) - (n/2) log(beta / (beta - 1))
///     + (1/beta) e^{-lambda t} |theta|^2 / 2.
/// Throws std::invalid_argument unless beta > 1.
double dv_lower_bound(const Eigen::VectorXd& theta, double lambda, double t,
                      double beta, int n);

// Both sides of the detailed-balance identity E_mu[f Lg] = E_mu[g Lf],
// estimated on shared samples; pass iff the 3-sigma intervals overlap.
// With f = g the two estimates coincide exactly.
struct ReversibilityResult {
  McEstimate lhs;
  McEstimate rhs;
  bool pass = false;
};

ReversibilityResult reversibility_check(
    const CollisionScene& scene,
    const std::function<double(const Eigen::VectorXd&)>& f,
    const std::function<double(const Eigen::VectorXd&)>& g, int n_mc,
    std::uint64_t seed);

}  // namespace splitkit

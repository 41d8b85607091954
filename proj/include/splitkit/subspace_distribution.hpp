#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "splitkit/rng.hpp"
#include "splitkit/stats.hpp"
#include "splitkit/subspace.hpp"

namespace splitkit {

struct WeightedAtom {
  Subspace subspace;
  double weight;
};

// A probability distribution over subspaces of a fixed ambient space: either a
// finite list of weighted atoms, or an opaque sampler (the "continuous" case,
// where only Monte Carlo functionality is available).
class SubspaceDistribution {
 public:
  /// Discrete distribution.  Weights must be positive and sum to 1 within
  /// 1e-12; all atoms must share the ambient dimension.
  SubspaceDistribution(int ambient_dim, std::vector<WeightedAtom> atoms);

  /// Continuous distribution given by a seeded sampler.
  static SubspaceDistribution continuous(
      int ambient_dim, std::function<Subspace(std::uint64_t)> sampler);

  int ambient_dim() const { return ambient_dim_; }
  bool is_discrete() const { return sampler_ == nullptr; }
  const std::vector<WeightedAtom>& atoms() const;
  std::size_t sample_atom_index(Rng& rng) const;  // discrete only
  Subspace sample(std::uint64_t seed) const;      // continuous only

 private:
  SubspaceDistribution() = default;
  int ambient_dim_ = 0;
  std::vector<WeightedAtom> atoms_;
  std::vector<double> weights_;
  std::function<Subspace(std::uint64_t)> sampler_;
};

/// chi(x) = E_xi[ min(|P_E x|, |P_{E^perp} x|) ].  Exact sum over atoms;
/// requires a discrete distribution.
double chi(const SubspaceDistribution& xi, const Eigen::VectorXd& x);

/// Monte Carlo version of chi for continuous distributions (also works for
/// discrete ones); returns the estimate with its standard error.
McEstimate chi_mc(const SubspaceDistribution& xi, const Eigen::VectorXd& x,
                  int n_samples, std::uint64_t seed);

// The mean projector Q = E_xi[P_E], its spectral gap lambda = 1 - lambda_max(Q),
// and a top eigenvector (unit norm, sign fixed deterministically).  Q <= (1-lambda)·Id
// as quadratic forms, with equality direction u.
struct FrameConstant {
  Eigen::MatrixXd mean_projector;
  double lambda;
  Eigen::VectorXd top_eigenvector;
};

/// Computes the frame data of a discrete distribution.  Throws for continuous ones.
FrameConstant mean_projector(const SubspaceDistribution& xi);

}  // namespace splitkit

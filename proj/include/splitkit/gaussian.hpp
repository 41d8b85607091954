#pragma once

#include <Eigen/Core>

#include "splitkit/rng.hpp"
#include "splitkit/subspace.hpp"

namespace splitkit {

// A (possibly degenerate) Gaussian measure on R^n.  The covariance is
// eigendecomposed once at construction: eigenvalues below the relative
// threshold are clipped to zero and sampling happens in the range space, so
// rank-deficient covariances are first-class citizens.
class GaussianMeasure {
 public:
  /// Throws std::invalid_argument if dimensions are inconsistent, cov is not
  /// symmetric within 1e-10, or cov has an eigenvalue below -1e-10 * scale.
  GaussianMeasure(Eigen::VectorXd mean, Eigen::MatrixXd cov,
                  double tol = kDefaultRankTol);

  static GaussianMeasure standard(int dim);

  int dim() const { return static_cast<int>(mean_.size()); }
  int rank() const { return rank_; }
  double tol() const { return tol_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }

  /// Range-space factor F (n x rank) with F F^T = cov.
  const Eigen::MatrixXd& sqrt_factor() const { return factor_; }
  /// Orthonormal basis of the range of cov (n x rank).
  const Eigen::MatrixXd& range_basis() const { return range_; }
  /// Eigenvalues of cov restricted to its range (length rank, ascending).
  const Eigen::VectorXd& range_eigenvalues() const { return evals_; }

  Eigen::VectorXd sample(Rng& rng) const;

  /// Log density with respect to Lebesgue measure on R^n.  Throws
  /// std::logic_error for a rank-deficient covariance (no Lebesgue density).
  double log_density(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd factor_;
  Eigen::MatrixXd range_;
  Eigen::VectorXd evals_;
  int rank_;
  double tol_;
};

/// Relative entropy D(p || q) in nats.  Returns +infinity when p is not
/// absolutely continuous with respect to q: the mean gap must lie in the range
/// of q's covariance, and the two covariance ranges must agree (a strict range
/// drop concentrates p on a q-null set).
double gaussian_kl(const GaussianMeasure& p, const GaussianMeasure& q);

/// Marginal of g on the subspace s, expressed in the coordinates of s's basis
/// (a Gaussian on R^{dim s}).
GaussianMeasure marginal_gaussian(const GaussianMeasure& g, const Subspace& s);

}  // namespace splitkit

#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "splitkit/subspace.hpp"

namespace splitkit {

// Two-part independence test for (P_S X, P_{S^perp} X):
//  (a) Frobenius norm of the empirical cross-covariance against a bootstrap
//      null quantile (catches linear dependence),
//  (b) distance-covariance permutation test on a subsample (catches the rest).
// The test passes only if both parts do.
struct SplitTestResult {
  double cross_stat = 0.0;
  double cross_threshold = 0.0;
  double dcov_stat = 0.0;
  double dcov_pvalue = 1.0;
  bool cross_pass = true;
  bool dcov_pass = true;
  bool pass = true;
};

struct SplitTestOptions {
  int dcov_subsample = 1024;  // pairwise-distance work is quadratic in this
  int dcov_permutations = 199;
  int bootstrap_reps = 200;
  std::uint64_t seed = 0;
};

/// samples: one row per observation.  level: per-part rejection level.
/// Splits along the zero or full subspace are vacuous and always pass.
SplitTestResult empirical_split_test(const Eigen::MatrixXd& samples,
                                     const Subspace& s, double level,
                                     const SplitTestOptions& opts = {});

// Energy-distance two-sample permutation test.
struct TwoSampleResult {
  double stat = 0.0;
  double pvalue = 1.0;
  bool pass = true;  // true = no evidence the two samples differ
};

struct TwoSampleOptions {
  int subsample = 1024;  // per group
  int permutations = 199;
  std::uint64_t seed = 0;
};

TwoSampleResult energy_two_sample_test(const Eigen::MatrixXd& x,
                                       const Eigen::MatrixXd& y, double level,
                                       const TwoSampleOptions& opts = {});

/// Plain distance covariance (squared, biased V-statistic) of paired rows.
double distance_covariance_sq(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

}  // namespace splitkit

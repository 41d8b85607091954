#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace splitkit {

/// A Monte Carlo estimate with its standard error.
struct McEstimate {
  double value = 0.0;
  double se = 0.0;       // standard error of `value`
  std::int64_t n = 0;    // number of samples behind the estimate

  double ci_halfwidth(double z = 3.0) const { return z * se; }
};

// Mergeable streaming mean/variance accumulator (Welford + Chan merge).
// Merging in a fixed order is deterministic, which keeps parallel reductions
// reproducible across worker counts.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);

  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;     // unbiased sample variance
  double se_mean() const;      // sqrt(variance / n)
  McEstimate mean_estimate() const { return {mean(), se_mean(), n_}; }

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Sample variance together with its (asymptotic, delta-method) standard error.
McEstimate sample_variance_with_se(std::span<const double> values);

/// Standard normal quantile (inverse CDF), accurate to ~1e-9 (Acklam's method).
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace splitkit

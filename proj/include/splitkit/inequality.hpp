#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "splitkit/gaussian.hpp"
#include "splitkit/measure.hpp"
#include "splitkit/scalar_fn.hpp"
#include "splitkit/stats.hpp"
#include "splitkit/subspace_distribution.hpp"

namespace splitkit {

enum class Verdict { holds, violated, inconclusive };

std::string to_string(Verdict v);

// One verified inequality: both sides with their uncertainties, the slack,
// and a verdict at the margin z * (se_lhs + se_rhs) plus a small absolute
// cushion for exact-arithmetic paths.
struct SlackReport {
  std::string name;
  McEstimate lhs;
  McEstimate rhs;
  double slack = 0.0;  // rhs - lhs
  double margin = 0.0;
  Verdict verdict = Verdict::inconclusive;
  bool tight = false;  // |slack| within the margin: an equality case
  std::string notes;
  std::map<std::string, double> params;
};

// Shared knobs for the statistical checks.  The nested estimators are biased
// O(1/n_inner); the bias-corrected combinations below keep that out of the
// verdicts.
struct CheckOptions {
  int n_outer = 2000;
  int n_inner = 500;
  double z = 3.0;  // verdict margin in combined standard errors
};

/// z-score for a two-sided Bonferroni-adjusted level over n comparisons.
double bonferroni_z(double level, int n_comparisons);

enum class CvMethod { closed_form_gaussian, resample_nested, binned };

struct ConditionalVarianceEstimate {
  double value = 0.0;
  double se = 0.0;
  CvMethod method = CvMethod::resample_nested;
};

// The full conditional variance decomposition of f(X) against P_E X:
//   Var f = Var(E[f | P_E X]) + E[Var(f | P_E X)].
// Estimates share one sample stream, so the decomposition identity holds
// within the reported errors.
struct ConditionalDecomposition {
  ConditionalVarianceEstimate var_of_conditional_mean;
  ConditionalVarianceEstimate mean_of_conditional_variance;
  McEstimate total_variance;
};

enum class CvMethodChoice { automatic, closed_form, resample };

/// Resampling is exact in law only when the spec splits along (e, e^perp)
/// (then the conditional law of X given P_E X = y is y + the e^perp marginal);
/// a spec that cannot be certified to split throws std::invalid_argument
/// rather than silently biasing the estimate.  Gaussian specs with linear or
/// quadratic f take the closed-form path under `automatic`.
ConditionalDecomposition conditional_decomposition(
    const MeasureSpec& spec, const Subspace& e, const ScalarFn& f,
    const CheckOptions& opts, std::uint64_t seed,
    CvMethodChoice choice = CvMethodChoice::automatic);

/// Var(E[f(X) | P_E X]) — the first component of conditional_decomposition.
ConditionalVarianceEstimate conditional_mean_variance(const MeasureSpec& spec,
                                                      const Subspace& e,
                                                      const ScalarFn& f,
                                                      int n_outer, int n_inner,
                                                      std::uint64_t seed);

// The two second-order entropy-drop consequences, checked together:
//   variance_drop:  sum_E w_E Var(E[f|P_E X])  <=  (1 - lambda) Var f
//   inverse_form:   Var f  <=  (1/lambda) sum_E w_E E[Var(f|P_E X)]
// The inverse form is marked inconclusive ("inapplicable") when lambda = 0.
struct LinearizedBlReports {
  SlackReport variance_drop;
  SlackReport inverse_form;
};

LinearizedBlReports check_linearized_bl(const MeasureSpec& spec,
                                        const SubspaceDistribution& xi,
                                        const ScalarFn& f, double lambda,
                                        const CheckOptions& opts,
                                        std::uint64_t seed);

/// Exact-arithmetic check of the split relative-entropy drop
///   sum_E w_E D(nu_E || mu_E) <= (1 - lambda) D(nu || mu)
/// for Gaussian (or all-Gaussian product) mu splitting with respect to xi and
/// Gaussian nu.  An infinite right side is flagged and counts as holding.
SlackReport check_bl_split(const MeasureSpec& mu, const SubspaceDistribution& xi,
                           const GaussianMeasure& nu, double lambda);

/// Var f(X) <= sum_i E[Var(f(X) | X^(i))] for independent 1-d components,
/// with X^(i) = all coordinates but the i-th (resampled nested estimate).
SlackReport check_efron_stein(const std::vector<MeasureSpec>& components,
                              const ScalarFn& f, const CheckOptions& opts,
                              std::uint64_t seed);

/// Var(E[g(S_n) | S_m]) <= (m/n) Var(g(S_n)) for i.i.d. 1-d summands.
SlackReport check_dks(const MeasureSpec& base, const ScalarFn& g, int n, int m,
                      const CheckOptions& opts, std::uint64_t seed);

/// Var(sum_i psi_i(X_{S_i})) <= r sum_i Var(psi_i(X_{S_i})) when every index
/// of [n] lies in at most r members of the cover (throws when it does not;
/// indices in no member are flagged in the notes).
SlackReport check_madiman_barron(const std::vector<MeasureSpec>& components,
                                 const std::vector<std::vector<int>>& cover,
                                 int r, const std::vector<ScalarFn>& psi,
                                 const CheckOptions& opts, std::uint64_t seed);

/// Var(sum_E w_E psi_E(P_E X)) <= (1 - lambda) sum_E w_E Var(psi_E(P_E X))
/// for a spec splitting with respect to xi (shared samples on both sides).
SlackReport check_jensen_improvement(const MeasureSpec& spec,
                                     const SubspaceDistribution& xi,
                                     const std::vector<ScalarFn>& psi_family,
                                     double lambda, const CheckOptions& opts,
                                     std::uint64_t seed);

// Empirical survival-function diagnostic for the tail-ratio bound
//   P(|X|^2 > t) <= C * P(|X|^2 > c t).
// Purely descriptive: Wilson intervals are reported, grid points whose c*t
// exceedance count is too small for a meaningful ratio are marked
// unsupported, and t0 is the start of the trailing supported run on which the
// point estimates satisfy the bound.
struct TailRatioReport {
  std::vector<double> t_grid;
  std::vector<double> survival_t, ci_low_t, ci_high_t;
  std::vector<double> survival_ct, ci_low_ct, ci_high_ct;
  std::vector<bool> supported;
  std::vector<bool> holds_at;
  double t0 = std::numeric_limits<double>::infinity();
  bool holds_from_t0 = false;
};

/// Requires at least 1e4 sample rows, 0 < c < 1, and 0 < C < 1.
TailRatioReport tail_ratio_diagnostic(const Eigen::MatrixXd& samples, double c,
                                      double big_c,
                                      const std::vector<double>& t_grid);

}  // namespace splitkit

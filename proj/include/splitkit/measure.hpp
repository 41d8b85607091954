#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "splitkit/decomposition.hpp"
#include "splitkit/gaussian.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/subspace_distribution.hpp"

namespace splitkit {

// A sampleable measure on R^n, one of:
//   gaussian   - explicit (possibly degenerate) Gaussian
//   product    - independent factors across the blocks of a decomposition,
//                each factor expressed in its block's basis coordinates
//   mixture    - E ~ xi, X, X' ~ base independent, output P_E X + P_{E^perp} X'
//   empirical  - uniform draw from stored sample rows
//   custom     - opaque seeded sampler
// Values are immutable; copies share the underlying node.
class MeasureSpec {
 public:
  enum class Kind { gaussian, product, mixture, empirical, custom };

  static MeasureSpec gaussian(GaussianMeasure g);
  /// Factors line up with decomposition.independent in order, followed by one
  /// factor for the dependent block when it is nonzero.
  static MeasureSpec product(IndependentDecomposition blocks,
                             std::vector<MeasureSpec> factors);
  static MeasureSpec mixture(SubspaceDistribution xi, MeasureSpec base);
  /// rows = samples; must be nonempty.
  static MeasureSpec empirical(Eigen::MatrixXd samples);
  static MeasureSpec custom(int dim,
                            std::function<Eigen::VectorXd(Rng&)> sampler);

  Kind kind() const;
  int dim() const;
  bool is_gaussian() const { return kind() == Kind::gaussian; }

  const GaussianMeasure& gaussian_part() const;
  const IndependentDecomposition& product_blocks() const;
  const std::vector<MeasureSpec>& product_factors() const;
  const SubspaceDistribution& mixture_xi() const;
  const MeasureSpec& mixture_base() const;
  const Eigen::MatrixXd& empirical_samples() const;

  Eigen::VectorXd sample_one(Rng& rng) const;

 private:
  struct Node;
  explicit MeasureSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Draws `count` samples (rows) with a dedicated substream of `seed`.
Eigen::MatrixXd sample(const MeasureSpec& spec, int count, std::uint64_t seed);

Eigen::VectorXd empirical_mean(const Eigen::MatrixXd& samples);
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples);

// Whether every branch of the spec is known analytically enough to certify a
// finite log-moment E[log(1+|X|)] (custom samplers are opaque, hence
// untestable).
enum class LogMomentStatus { finite, untestable };
LogMomentStatus log_moment_status(const MeasureSpec& spec);

// Cross-covariance defect of a measure against a subspace distribution:
// per atom E, the Frobenius norm |P_E Sigma P_{E^perp}|, plus the
// xi-weighted total.  Exact when the measure is Gaussian, otherwise estimated
// from `count` samples with bootstrap standard errors.
struct SplitDefect {
  std::vector<double> per_atom;
  std::vector<double> per_atom_se;  // zero in the exact path
  double cross_norm;                // sum of weight_i * per_atom_i
  bool exact;
};

SplitDefect covariance_split_defect(const MeasureSpec& spec,
                                    const SubspaceDistribution& xi, int count,
                                    std::uint64_t seed);

/// Flattens a spec into one explicit Gaussian when that is possible without
/// sampling: a gaussian node, or a product whose factors all flatten.
std::optional<GaussianMeasure> as_gaussian(const MeasureSpec& spec);

/// True when the spec provably splits along (e, e^perp): a Gaussian with
/// vanishing cross-covariance, or a product whose blocks each sit inside e or
/// its complement.  "False" means "not certifiable from the structure",
/// not "dependent".
bool certifies_split(const MeasureSpec& spec, const Subspace& e,
                     double tol = 1e-8);

}  // namespace splitkit

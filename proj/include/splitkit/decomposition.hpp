#pragma once

#include <cstdint>

#include "splitkit/subspace_distribution.hpp"

namespace splitkit {

// The orthogonal decomposition R^n = (⊕_a E_a) ⊕ E_dep induced by a discrete
// subspace distribution: the E_a are the maximal subspaces on which every atom
// acts as identity or as zero (equivalently, the zero set of chi splits into
// them), and E_dep is the orthogonal complement of their sum.
struct IndependentDecomposition {
  std::vector<Subspace> independent;  // mutually orthogonal, sorted (see below)
  Subspace dependent;
  int ambient_dim;
};

/// Computes the decomposition by successive refinement: the running partition
/// is split against each atom E into parts inside E and inside E^perp; pieces
/// that vanish drop out and their directions end up in E_dep.  Output order is
/// canonical: decreasing dimension, ties broken lexicographically on the
/// canonical basis, so it does not depend on the order of the atoms.
/// Continuous distributions are rejected (std::invalid_argument).
IndependentDecomposition independent_decomposition(const SubspaceDistribution& xi);

// The splitting margin theta = min over unit x of chi(x), with a minimizer.
// theta == 0 exactly when some independent subspace is nonzero.
struct SplittingMargin {
  double theta;
  Eigen::VectorXd argmin;
};

struct SplittingMarginOptions {
  int restarts = 32;
  int iterations = 500;     // subgradient steps per restart
  double step0 = 0.3;       // initial step size
  double step_decay = 0.985;  // geometric decay per iteration
  int polish_rounds = 3;    // tangent-mesh refinement rounds around the best point
};

/// Minimizes chi over the unit sphere by multi-start projected subgradient
/// descent with geometric step decay, followed by a local tangent-space mesh
/// polish.  If the decomposition already certifies a zero (a nonzero
/// independent subspace exists), returns theta = 0 with an exact minimizer.
SplittingMargin splitting_margin(const SubspaceDistribution& xi, std::uint64_t seed,
                                 const SplittingMarginOptions& opts = {});

}  // namespace splitkit

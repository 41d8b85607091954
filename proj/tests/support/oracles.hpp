#pragma once

// Test-only reference computations.  These deliberately take different
// algorithmic routes from the library (single-shot eigen thresholds, grid
// search, brute-force enumeration) so that agreement is meaningful.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "splitkit/decomposition.hpp"
#include "splitkit/rng.hpp"
#include "splitkit/subspace.hpp"
#include "splitkit/subspace_distribution.hpp"

namespace splitkit::testing {

// ---------------------------------------------------------------------------
// Brute-force decomposition oracle: enumerate all 2^k sign patterns
// (atom vs. complement), and for each pattern compute the intersection of the
// k chosen subspaces in one shot, as the eigenspace of the *sum* of their
// projectors at eigenvalue k.  No pairwise refinement involved.
// ---------------------------------------------------------------------------
inline std::vector<Subspace> brute_force_independent_blocks(
    const SubspaceDistribution& xi, double tol = 1e-9) {
  const int n = xi.ambient_dim();
  const auto& atoms = xi.atoms();
  const std::size_t k = atoms.size();

  std::vector<Eigen::MatrixXd> proj(k), proj_comp(k);
  for (std::size_t i = 0; i < k; ++i) {
    proj[i] = atoms[i].subspace.projector();
    proj_comp[i] = Eigen::MatrixXd::Identity(n, n) - proj[i];
  }

  std::vector<Subspace> blocks;
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << k); ++pattern) {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < k; ++i)
      sum += (pattern >> i) & 1 ? proj_comp[i] : proj[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sum);
    int count = 0;
    for (Eigen::Index j = n - 1; j >= 0; --j) {
      if (es.eigenvalues()[j] >= static_cast<double>(k) - static_cast<double>(k) * tol)
        ++count;
      else
        break;
    }
    if (count > 0) blocks.emplace_back(es.eigenvectors().rightCols(count), n, tol);
  }
  return blocks;
}

/// True if the two collections contain the same subspaces up to `tol` in
/// projector Frobenius distance (one-to-one matching).
inline bool same_subspace_set(std::vector<Subspace> a, std::vector<Subspace> b,
                              double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  for (const auto& s : a) {
    bool found = false;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j] || b[j].dim() != s.dim()) continue;
      if (subspace_distance(s, b[j]) <= tol) {
        used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Random instance generators.
// ---------------------------------------------------------------------------

/// Haar-ish random subspace of the given dimension (orthonormalized Gaussian).
inline Subspace random_subspace(int ambient_dim, int dim, Rng& rng) {
  if (dim == 0) return Subspace::zero(ambient_dim);
  std::vector<Eigen::VectorXd> cols;
  cols.reserve(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) cols.push_back(rng.normal_vector(ambient_dim));
  return subspace_from_spanning_set(cols, ambient_dim);
}

inline Eigen::MatrixXd random_rotation(int n, Rng& rng) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) g.col(i) = rng.normal_vector(n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  // Fix column signs so the draw is unambiguous.
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

/// A random discrete subspace distribution.  With probability ~1/2 the atoms
/// are unions of blocks of a common rotated coordinate partition (so the
/// decomposition is rich); otherwise they are generic (decomposition trivial).
inline SubspaceDistribution random_instance(int max_dim, int max_atoms,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const int n = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_dim)));
  const int k = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(max_atoms)));
  std::vector<WeightedAtom> atoms;
  atoms.reserve(static_cast<std::size_t>(k));

  const bool structured = rng.uniform01() < 0.5;
  if (structured) {
    const Eigen::MatrixXd rot = random_rotation(n, rng);
    // Random partition of the n rotated axes into groups.
    std::vector<int> group(static_cast<std::size_t>(n));
    const int n_groups = 1 + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    for (auto& g : group) g = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n_groups)));
    for (int i = 0; i < k; ++i) {
      std::vector<Eigen::VectorXd> cols;
      for (int g = 0; g < n_groups; ++g) {
        if (rng.uniform01() < 0.5) continue;  // group not in this atom
        for (int j = 0; j < n; ++j)
          if (group[static_cast<std::size_t>(j)] == g) cols.push_back(rot.col(j));
      }
      Subspace s = subspace_from_spanning_set(cols, n);
      atoms.push_back({std::move(s), 0.0});
    }
  } else {
    for (int i = 0; i < k; ++i) {
      const int d = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n) + 1));
      atoms.push_back({random_subspace(n, d, rng), 0.0});
    }
  }

  double total = 0.0;
  std::vector<double> w(atoms.size());
  for (auto& x : w) {
    x = 0.1 + rng.uniform01();
    total += x;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    atoms[i].weight = w[i] / total;
    acc += atoms[i].weight;
  }
  atoms.back().weight = 1.0 - acc;  // exact unit sum
  return SubspaceDistribution(n, std::move(atoms));
}

}  // namespace splitkit::testing

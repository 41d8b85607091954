#pragma once

// Shared scene fixtures used across test suites.

#include <vector>

#include "splitkit/subspace_distribution.hpp"

namespace splitkit::testing {

/// Two lines in R^2: the first coordinate axis and the diagonal, weight 1/2
/// each.  No common invariant line, so the whole plane is dependent.
inline SubspaceDistribution bernstein_xi() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXd diag(2, 1);
  diag << s, s;
  std::vector<WeightedAtom> atoms;
  atoms.push_back({Subspace::coordinate_span(2, {0}), 0.5});
  atoms.push_back({Subspace(diag, 2), 0.5});
  return SubspaceDistribution(2, std::move(atoms));
}

/// Uniform distribution on the k coordinate-hyperplane spans of R^k
/// (atom i = span of all axes except i).  Mean projector ((k-1)/k)·Id.
inline SubspaceDistribution leave_one_out_xi(int k) {
  std::vector<WeightedAtom> atoms;
  for (int i = 0; i < k; ++i) {
    std::vector<int> axes;
    for (int j = 0; j < k; ++j)
      if (j != i) axes.push_back(j);
    atoms.push_back({Subspace::coordinate_span(k, axes), 0.0});
  }
  for (auto& a : atoms) a.weight = 1.0 / k;
  atoms.back().weight = 1.0 - (k - 1) * (1.0 / k);
  return SubspaceDistribution(k, std::move(atoms));
}

/// Uniform distribution on all C(n,m) m-coordinate spans of R^n.
/// Mean projector (m/n)·Id.
inline SubspaceDistribution coordinate_subset_xi(int n, int m) {
  std::vector<std::vector<int>> subsets;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == m) {
      subsets.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  std::vector<WeightedAtom> atoms;
  const double w = 1.0 / static_cast<double>(subsets.size());
  for (const auto& s : subsets) atoms.push_back({Subspace::coordinate_span(n, s), w});
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) acc += atoms[i].weight;
  atoms.back().weight = 1.0 - acc;
  return SubspaceDistribution(n, std::move(atoms));
}

/// Point mass on a single subspace.
inline SubspaceDistribution dirac_xi(Subspace s) {
  const int n = s.ambient_dim();
  std::vector<WeightedAtom> atoms;
  atoms.push_back({std::move(s), 1.0});
  return SubspaceDistribution(n, std::move(atoms));
}

}  // namespace splitkit::testing

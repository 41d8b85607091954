#include "splitkit/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace splitkit {

namespace {

// Lexicographic order on canonical bases; used only to break ties among
// blocks of equal dimension, so the overall order is reproducible.
bool canonical_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index na = a.size(), nb = b.size();
  for (Eigen::Index i = 0; i < std::min(na, nb); ++i) {
    const double x = a(i % a.rows(), i / a.rows());
    const double y = b(i % b.rows(), i / b.rows());
    if (x < y - 1e-12) return true;
    if (x > y + 1e-12) return false;
  }
  return na < nb;
}

}  // namespace

IndependentDecomposition independent_decomposition(const SubspaceDistribution& xi) {
  if (!xi.is_discrete())
    throw std::invalid_argument(
        "independent_decomposition: continuous subspace distributions are not "
        "supported; decompose a discretization instead");
  const int n = xi.ambient_dim();
  double tol = kDefaultRankTol;
  for (const auto& a : xi.atoms()) tol = std::max(tol, a.subspace.tol());

  // Successive refinement: keep the pieces of the running partition that lie
  // wholly inside the atom or wholly inside its complement; everything else
  // loses dimensions, which end up in the dependent part.
  std::vector<Subspace> parts = {Subspace::full(n, tol)};
  for (const auto& atom : xi.atoms()) {
    const Subspace comp = complement(atom.subspace);
    std::vector<Subspace> next;
    next.reserve(parts.size() * 2);
    for (const auto& w : parts) {
      Subspace inside = intersect(w, atom.subspace);
      if (inside.dim() > 0) next.push_back(std::move(inside));
      Subspace outside = intersect(w, comp);
      if (outside.dim() > 0) next.push_back(std::move(outside));
    }
    parts = std::move(next);
    if (parts.empty()) break;
  }

  // Canonical order: decreasing dimension, then lexicographic canonical basis.
  std::vector<std::pair<Eigen::MatrixXd, std::size_t>> keys;
  keys.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i)
    keys.emplace_back(canonical_basis(parts[i]), i);
  std::sort(keys.begin(), keys.end(), [&](const auto& x, const auto& y) {
    const int dx = parts[x.second].dim(), dy = parts[y.second].dim();
    if (dx != dy) return dx > dy;
    return canonical_less(x.first, y.first);
  });

  std::vector<Subspace> independent;
  independent.reserve(parts.size());
  for (const auto& [basis, idx] : keys)
    independent.push_back(Subspace(basis, n, parts[idx].tol()));
  Subspace dependent = complement(direct_sum(independent, n, tol));
  return {std::move(independent), std::move(dependent), n};
}

namespace {

// chi and one subgradient at a unit vector.  At the kink (both projections
// equal) either branch is a valid subgradient.
double chi_and_subgradient(const SubspaceDistribution& xi, const Eigen::VectorXd& x,
                           Eigen::VectorXd* grad) {
  const int n = xi.ambient_dim();
  if (grad) grad->setZero(n);
  double value = 0.0;
  for (const auto& a : xi.atoms()) {
    const Eigen::VectorXd px = a.subspace.project(x);
    const Eigen::VectorXd qx = x - px;
    const double np = px.norm(), nq = qx.norm();
    if (np <= nq) {
      value += a.weight * np;
      if (grad && np > 1e-14) *grad += (a.weight / np) * px;
    } else {
      value += a.weight * nq;
      if (grad && nq > 1e-14) *grad += (a.weight / nq) * qx;
    }
  }
  return value;
}

// One hill-climbing pass over a tensor mesh {-r, 0, r}^(n-1) in the tangent
// space at x (full mesh in low dimension, random tangent probes otherwise).
void mesh_polish(const SubspaceDistribution& xi, Eigen::VectorXd& x, double& fx,
                 double radius, Rng& rng) {
  const int n = xi.ambient_dim();
  const int td = n - 1;
  if (td == 0) return;
  // Tangent basis at x.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeFullU);
  const Eigen::MatrixXd tangent = svd.matrixU().rightCols(td);

  bool improved = true;
  int guard = 0;
  while (improved && guard++ < 40) {
    improved = false;
    if (td <= 6) {
      std::vector<int> combo(static_cast<std::size_t>(td), -1);
      for (;;) {
        Eigen::VectorXd step = Eigen::VectorXd::Zero(td);
        bool all_zero = true;
        for (int j = 0; j < td; ++j) {
          step[j] = radius * combo[static_cast<std::size_t>(j)];
          if (combo[static_cast<std::size_t>(j)] != 0) all_zero = false;
        }
        if (!all_zero) {
          Eigen::VectorXd cand = (x + tangent * step).normalized();
          const double fc = chi_and_subgradient(xi, cand, nullptr);
          if (fc < fx) {
            fx = fc;
            x = cand;
            improved = true;
          }
        }
        int j = 0;
        while (j < td && combo[static_cast<std::size_t>(j)] == 1) {
          combo[static_cast<std::size_t>(j)] = -1;
          ++j;
        }
        if (j == td) break;
        ++combo[static_cast<std::size_t>(j)];
      }
    } else {
      for (int trial = 0; trial < 512; ++trial) {
        Eigen::VectorXd cand =
            (x + radius * (tangent * rng.normal_vector(td)).normalized() *
                     rng.uniform(0.25, 1.0))
                .normalized();
        const double fc = chi_and_subgradient(xi, cand, nullptr);
        if (fc < fx) {
          fx = fc;
          x = cand;
          improved = true;
        }
      }
    }
  }
}

}  // namespace

SplittingMargin splitting_margin(const SubspaceDistribution& xi, std::uint64_t seed,
                                 const SplittingMarginOptions& opts) {
  if (!xi.is_discrete())
    throw std::invalid_argument("splitting_margin: needs a discrete distribution");
  const int n = xi.ambient_dim();

  const IndependentDecomposition dec = independent_decomposition(xi);
  if (!dec.independent.empty() && dec.independent[0].dim() > 0) {
    // chi vanishes on every independent block; report an exact minimizer.
    return {0.0, dec.independent[0].basis().col(0)};
  }

  if (n == 1) {
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    return {chi_and_subgradient(xi, e, nullptr), e};
  }

  Eigen::VectorXd best_x = Eigen::VectorXd::Unit(n, 0);
  double best_f = chi_and_subgradient(xi, best_x, nullptr);

  for (int r = 0; r < opts.restarts; ++r) {
    Rng rng(derive_seed(seed, "splitting_margin", static_cast<std::uint64_t>(r)));
    Eigen::VectorXd x = (r == 0) ? best_x : rng.unit_vector(n);
    double step = opts.step0;
    Eigen::VectorXd grad(n);
    for (int it = 0; it < opts.iterations; ++it) {
      const double f = chi_and_subgradient(xi, x, &grad);
      if (f < best_f) {
        best_f = f;
        best_x = x;
      }
      const Eigen::VectorXd tangent_grad = grad - grad.dot(x) * x;
      if (tangent_grad.norm() < 1e-14) break;
      x = (x - step * tangent_grad).normalized();
      step *= opts.step_decay;
    }
  }

  Rng polish_rng(derive_seed(seed, "splitting_margin_polish", 0));
  double radius = 0.05;
  for (int round = 0; round < opts.polish_rounds; ++round) {
    mesh_polish(xi, best_x, best_f, radius, polish_rng);
    radius *= 0.1;
  }
  return {best_f, best_x};
}

}  // namespace splitkit

#include "splitkit/subspace_distribution.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace splitkit {

SubspaceDistribution::SubspaceDistribution(int ambient_dim,
                                           std::vector<WeightedAtom> atoms)
    : ambient_dim_(ambient_dim), atoms_(std::move(atoms)) {
  if (atoms_.empty())
    throw std::invalid_argument("SubspaceDistribution: needs at least one atom");
  double total = 0.0;
  for (const auto& a : atoms_) {
    if (a.subspace.ambient_dim() != ambient_dim_)
      throw std::invalid_argument("SubspaceDistribution: atom ambient_dim mismatch");
    if (a.weight <= 0.0)
      throw std::invalid_argument("SubspaceDistribution: weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("SubspaceDistribution: weights must sum to 1");
  weights_.reserve(atoms_.size());
  for (const auto& a : atoms_) weights_.push_back(a.weight);
}

SubspaceDistribution SubspaceDistribution::continuous(
    int ambient_dim, std::function<Subspace(std::uint64_t)> sampler) {
  if (!sampler)
    throw std::invalid_argument("SubspaceDistribution::continuous: null sampler");
  SubspaceDistribution d;
  d.ambient_dim_ = ambient_dim;
  d.sampler_ = std::move(sampler);
  return d;
}

const std::vector<WeightedAtom>& SubspaceDistribution::atoms() const {
  if (!is_discrete())
    throw std::logic_error("SubspaceDistribution: continuous distribution has no atoms");
  return atoms_;
}

std::size_t SubspaceDistribution::sample_atom_index(Rng& rng) const {
  if (!is_discrete())
    throw std::logic_error("SubspaceDistribution: continuous distribution has no atoms");
  return rng.categorical(weights_);
}

Subspace SubspaceDistribution::sample(std::uint64_t seed) const {
  if (is_discrete())
    throw std::logic_error("SubspaceDistribution::sample: distribution is discrete");
  Subspace s = sampler_(seed);
  if (s.ambient_dim() != ambient_dim_)
    throw std::runtime_error("SubspaceDistribution: sampler returned wrong ambient_dim");
  return s;
}

namespace {

double min_projection_norm(const Subspace& e, const Eigen::VectorXd& x) {
  const Eigen::VectorXd px = e.project(x);
  const double np = px.norm();
  const double nq = (x - px).norm();
  return std::min(np, nq);
}

}  // namespace

double chi(const SubspaceDistribution& xi, const Eigen::VectorXd& x) {
  if (!xi.is_discrete())
    throw std::invalid_argument("chi: exact evaluation needs a discrete distribution; use chi_mc");
  if (x.size() != xi.ambient_dim())
    throw std::invalid_argument("chi: dimension mismatch");
  double acc = 0.0;
  for (const auto& a : xi.atoms()) acc += a.weight * min_projection_norm(a.subspace, x);
  return acc;
}

McEstimate chi_mc(const SubspaceDistribution& xi, const Eigen::VectorXd& x,
                  int n_samples, std::uint64_t seed) {
  if (x.size() != xi.ambient_dim())
    throw std::invalid_argument("chi_mc: dimension mismatch");
  if (n_samples < 2) throw std::invalid_argument("chi_mc: need at least 2 samples");
  RunningMoments acc;
  if (xi.is_discrete()) {
    Rng rng(derive_seed(seed, "chi_mc", 0));
    for (int i = 0; i < n_samples; ++i) {
      const auto& a = xi.atoms()[xi.sample_atom_index(rng)];
      acc.add(min_projection_norm(a.subspace, x));
    }
  } else {
    for (int i = 0; i < n_samples; ++i) {
      const Subspace e = xi.sample(derive_seed(seed, "chi_mc", static_cast<std::uint64_t>(i)));
      acc.add(min_projection_norm(e, x));
    }
  }
  return acc.mean_estimate();
}

FrameConstant mean_projector(const SubspaceDistribution& xi) {
  if (!xi.is_discrete())
    throw std::invalid_argument("mean_projector: needs a discrete distribution");
  const int n = xi.ambient_dim();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (const auto& a : xi.atoms()) q += a.weight * a.subspace.projector();
  q = 0.5 * (q + q.transpose());  // exact symmetry for the eigensolver
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
  const double lmax = es.eigenvalues()[n - 1];
  Eigen::VectorXd u = es.eigenvectors().col(n - 1);
  Eigen::Index imax = 0;
  u.cwiseAbs().maxCoeff(&imax);
  if (u[imax] < 0.0) u = -u;
  FrameConstant fc;
  fc.mean_projector = std::move(q);
  fc.lambda = std::min(1.0, std::max(0.0, 1.0 - lmax));
  fc.top_eigenvector = std::move(u);
  return fc;
}

}  // namespace splitkit

#include "splitkit/measure.hpp"

#include <cmath>
#include <stdexcept>

namespace splitkit {

struct MeasureSpec::Node {
  Kind kind;
  int dim;
  std::optional<GaussianMeasure> gauss;
  std::optional<IndependentDecomposition> blocks;
  std::vector<MeasureSpec> factors;
  std::optional<SubspaceDistribution> xi;
  std::shared_ptr<const MeasureSpec> base;
  Eigen::MatrixXd samples;
  std::function<Eigen::VectorXd(Rng&)> sampler;
};

MeasureSpec MeasureSpec::gaussian(GaussianMeasure g) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::gaussian;
  node->dim = g.dim();
  node->gauss = std::move(g);
  return MeasureSpec(std::move(node));
}

MeasureSpec MeasureSpec::product(IndependentDecomposition blocks,
                                 std::vector<MeasureSpec> factors) {
  const std::size_t expected =
      blocks.independent.size() + (blocks.dependent.dim() > 0 ? 1 : 0);
  if (factors.size() != expected)
    throw std::invalid_argument(
        "MeasureSpec::product: factor count does not match block count");
  for (std::size_t i = 0; i < blocks.independent.size(); ++i)
    if (factors[i].dim() != blocks.independent[i].dim())
      throw std::invalid_argument(
          "MeasureSpec::product: factor dimension does not match its block");
  if (blocks.dependent.dim() > 0 &&
      factors.back().dim() != blocks.dependent.dim())
    throw std::invalid_argument(
        "MeasureSpec::product: dependent factor dimension mismatch");
  auto node = std::make_shared<Node>();
  node->kind = Kind::product;
  node->dim = blocks.ambient_dim;
  node->blocks = std::move(blocks);
  node->factors = std::move(factors);
  return MeasureSpec(std::move(node));
}

MeasureSpec MeasureSpec::mixture(SubspaceDistribution xi, MeasureSpec base) {
  if (base.dim() != xi.ambient_dim())
    throw std::invalid_argument("MeasureSpec::mixture: base dimension mismatch");
  auto node = std::make_shared<Node>();
  node->kind = Kind::mixture;
  node->dim = xi.ambient_dim();
  node->xi = std::move(xi);
  node->base = std::make_shared<const MeasureSpec>(std::move(base));
  return MeasureSpec(std::move(node));
}

MeasureSpec MeasureSpec::empirical(Eigen::MatrixXd samples) {
  if (samples.rows() == 0)
    throw std::invalid_argument("MeasureSpec::empirical: no samples");
  auto node = std::make_shared<Node>();
  node->kind = Kind::empirical;
  node->dim = static_cast<int>(samples.cols());
  node->samples = std::move(samples);
  return MeasureSpec(std::move(node));
}

MeasureSpec MeasureSpec::custom(int dim,
                                std::function<Eigen::VectorXd(Rng&)> sampler) {
  if (!sampler) throw std::invalid_argument("MeasureSpec::custom: null sampler");
  auto node = std::make_shared<Node>();
  node->kind = Kind::custom;
  node->dim = dim;
  node->sampler = std::move(sampler);
  return MeasureSpec(std::move(node));
}

MeasureSpec::Kind MeasureSpec::kind() const { return node_->kind; }
int MeasureSpec::dim() const { return node_->dim; }

const GaussianMeasure& MeasureSpec::gaussian_part() const {
  if (!node_->gauss) throw std::logic_error("MeasureSpec: not a gaussian");
  return *node_->gauss;
}
const IndependentDecomposition& MeasureSpec::product_blocks() const {
  if (!node_->blocks) throw std::logic_error("MeasureSpec: not a product");
  return *node_->blocks;
}
const std::vector<MeasureSpec>& MeasureSpec::product_factors() const {
  if (node_->kind != Kind::product) throw std::logic_error("MeasureSpec: not a product");
  return node_->factors;
}
const SubspaceDistribution& MeasureSpec::mixture_xi() const {
  if (!node_->xi) throw std::logic_error("MeasureSpec: not a mixture");
  return *node_->xi;
}
const MeasureSpec& MeasureSpec::mixture_base() const {
  if (!node_->base) throw std::logic_error("MeasureSpec: not a mixture");
  return *node_->base;
}
const Eigen::MatrixXd& MeasureSpec::empirical_samples() const {
  if (node_->kind != Kind::empirical)
    throw std::logic_error("MeasureSpec: not empirical");
  return node_->samples;
}

Eigen::VectorXd MeasureSpec::sample_one(Rng& rng) const {
  switch (node_->kind) {
    case Kind::gaussian:
      return node_->gauss->sample(rng);
    case Kind::product: {
      const auto& blocks = *node_->blocks;
      Eigen::VectorXd x = Eigen::VectorXd::Zero(node_->dim);
      for (std::size_t i = 0; i < blocks.independent.size(); ++i)
        x += blocks.independent[i].basis() * node_->factors[i].sample_one(rng);
      if (blocks.dependent.dim() > 0)
        x += blocks.dependent.basis() * node_->factors.back().sample_one(rng);
      return x;
    }
    case Kind::mixture: {
      const auto& xi = *node_->xi;
      const Eigen::VectorXd x = node_->base->sample_one(rng);
      const Eigen::VectorXd y = node_->base->sample_one(rng);
      if (xi.is_discrete()) {
        const auto& atom = xi.atoms()[xi.sample_atom_index(rng)];
        const Eigen::VectorXd px = atom.subspace.project(x);
        return px + (y - atom.subspace.project(y));
      }
      const Subspace e = xi.sample(rng.next_u64());
      return e.project(x) + (y - e.project(y));
    }
    case Kind::empirical:
      return node_->samples.row(static_cast<Eigen::Index>(
                                    rng.uniform_index(static_cast<std::size_t>(
                                        node_->samples.rows()))))
          .transpose();
    case Kind::custom: {
      Eigen::VectorXd x = node_->sampler(rng);
      if (x.size() != node_->dim)
        throw std::runtime_error("MeasureSpec: custom sampler returned wrong dim");
      return x;
    }
  }
  throw std::logic_error("MeasureSpec: invalid kind");
}

Eigen::MatrixXd sample(const MeasureSpec& spec, int count, std::uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("sample: count must be positive");
  Rng rng(derive_seed(seed, "measure_sample", 0));
  Eigen::MatrixXd out(count, spec.dim());
  for (int i = 0; i < count; ++i) out.row(i) = spec.sample_one(rng).transpose();
  return out;
}

Eigen::VectorXd empirical_mean(const Eigen::MatrixXd& samples) {
  if (samples.rows() == 0) throw std::invalid_argument("empirical_mean: no samples");
  return samples.colwise().mean().transpose();
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& samples) {
  const Eigen::Index n = samples.rows();
  if (n < 2) throw std::invalid_argument("empirical_covariance: need >= 2 samples");
  const Eigen::MatrixXd centered = samples.rowwise() - samples.colwise().mean();
  return centered.transpose() * centered / static_cast<double>(n - 1);
}

LogMomentStatus log_moment_status(const MeasureSpec& spec) {
  switch (spec.kind()) {
    case MeasureSpec::Kind::gaussian:
      return LogMomentStatus::finite;
    case MeasureSpec::Kind::empirical:
      return LogMomentStatus::finite;  // finitely supported
    case MeasureSpec::Kind::product: {
      for (const auto& f : spec.product_factors())
        if (log_moment_status(f) == LogMomentStatus::untestable)
          return LogMomentStatus::untestable;
      return LogMomentStatus::finite;
    }
    case MeasureSpec::Kind::mixture:
      // |P_E X + P_{E^perp} X'| <= |X| + |X'|, so the status of the base law
      // carries over.
      return log_moment_status(spec.mixture_base());
    case MeasureSpec::Kind::custom:
      return LogMomentStatus::untestable;
  }
  return LogMomentStatus::untestable;
}

namespace {

std::vector<double> defect_per_atom(const Eigen::MatrixXd& sigma,
                                    const SubspaceDistribution& xi) {
  std::vector<double> out;
  out.reserve(xi.atoms().size());
  const Eigen::MatrixXd eye =
      Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
  for (const auto& a : xi.atoms()) {
    const Eigen::MatrixXd p = a.subspace.projector();
    out.push_back((p * sigma * (eye - p)).norm());
  }
  return out;
}

}  // namespace

SplitDefect covariance_split_defect(const MeasureSpec& spec,
                                    const SubspaceDistribution& xi, int count,
                                    std::uint64_t seed) {
  if (spec.dim() != xi.ambient_dim())
    throw std::invalid_argument("covariance_split_defect: dimension mismatch");
  if (!xi.is_discrete())
    throw std::invalid_argument(
        "covariance_split_defect: continuous subspace distributions are not supported");

  SplitDefect result;
  if (spec.is_gaussian()) {
    result.exact = true;
    result.per_atom = defect_per_atom(spec.gaussian_part().cov(), xi);
    result.per_atom_se.assign(result.per_atom.size(), 0.0);
  } else {
    if (count < 16)
      throw std::invalid_argument("covariance_split_defect: too few samples");
    result.exact = false;
    const Eigen::MatrixXd draws = sample(spec, count, seed);
    result.per_atom = defect_per_atom(empirical_covariance(draws), xi);

    // Bootstrap standard errors for the per-atom statistics.
    const int reps = 100;
    std::vector<RunningMoments> acc(result.per_atom.size());
    Rng rng(derive_seed(seed, "split_defect_bootstrap", 0));
    for (int b = 0; b < reps; ++b) {
      Eigen::MatrixXd boot(draws.rows(), draws.cols());
      for (Eigen::Index i = 0; i < draws.rows(); ++i)
        boot.row(i) = draws.row(static_cast<Eigen::Index>(
            rng.uniform_index(static_cast<std::size_t>(draws.rows()))));
      const auto vals = defect_per_atom(empirical_covariance(boot), xi);
      for (std::size_t j = 0; j < vals.size(); ++j) acc[j].add(vals[j]);
    }
    result.per_atom_se.resize(result.per_atom.size());
    for (std::size_t j = 0; j < acc.size(); ++j)
      result.per_atom_se[j] = std::sqrt(std::max(0.0, acc[j].variance()));
  }

  result.cross_norm = 0.0;
  const auto& atoms = xi.atoms();
  for (std::size_t j = 0; j < atoms.size(); ++j)
    result.cross_norm += atoms[j].weight * result.per_atom[j];
  return result;
}

std::optional<GaussianMeasure> as_gaussian(const MeasureSpec& spec) {
  if (spec.is_gaussian()) return spec.gaussian_part();
  if (spec.kind() != MeasureSpec::Kind::product) return std::nullopt;

  const int n = spec.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  const auto& blocks = spec.product_blocks();
  const auto& factors = spec.product_factors();
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto flat = as_gaussian(factors[i]);
    if (!flat) return std::nullopt;
    const Eigen::MatrixXd& basis = i < blocks.independent.size()
                                       ? blocks.independent[i].basis()
                                       : blocks.dependent.basis();
    mean += basis * flat->mean();
    cov += basis * flat->cov() * basis.transpose();
  }
  return GaussianMeasure(std::move(mean), std::move(cov));
}

bool certifies_split(const MeasureSpec& spec, const Subspace& e, double tol) {
  if (spec.dim() != e.ambient_dim())
    throw std::invalid_argument("certifies_split: dimension mismatch");
  if (const auto flat = as_gaussian(spec)) {
    const Eigen::MatrixXd& sigma = flat->cov();
    const Eigen::MatrixXd p = e.projector();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(sigma.rows(), sigma.cols());
    return (p * sigma * (eye - p)).norm() <= tol * (1.0 + sigma.norm());
  }
  if (spec.kind() == MeasureSpec::Kind::product) {
    // Independent factors split along e as soon as every block lands in e or
    // in its complement.
    const auto& blocks = spec.product_blocks();
    std::vector<const Subspace*> parts;
    for (const auto& b : blocks.independent) parts.push_back(&b);
    if (blocks.dependent.dim() > 0) parts.push_back(&blocks.dependent);
    const Eigen::MatrixXd p = e.projector();
    for (const Subspace* b : parts) {
      const double inside = (p * b->basis() - b->basis()).norm();
      const double outside = (p * b->basis()).norm();
      if (inside > tol && outside > tol) return false;
    }
    return true;
  }
  return false;
}

}  // namespace splitkit

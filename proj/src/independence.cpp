#include "splitkit/independence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "splitkit/rng.hpp"

namespace splitkit {

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.rows();
  Eigen::MatrixXd d(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double v = (x.row(i) - x.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

void double_center(Eigen::MatrixXd& d) {
  const Eigen::VectorXd row_mean = d.rowwise().mean();
  const double total_mean = row_mean.mean();
  d.colwise() -= row_mean;
  d.rowwise() -= row_mean.transpose();
  d.array() += total_mean;
}

std::vector<Eigen::Index> subsample_indices(Eigen::Index n, Eigen::Index m,
                                            Rng& rng) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::size_t j =
        static_cast<std::size_t>(i) +
        rng.uniform_index(static_cast<std::size_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(m));
  return idx;
}

double quantile_above(std::vector<double> values, double level) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  auto idx = static_cast<std::ptrdiff_t>(
      std::ceil((1.0 - level) * static_cast<double>(n))) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, n - 1);
  return values[static_cast<std::size_t>(idx)];
}

}  // namespace

double distance_covariance_sq(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows())
    throw std::invalid_argument("distance_covariance_sq: row count mismatch");
  Eigen::MatrixXd a = pairwise_distances(x);
  Eigen::MatrixXd b = pairwise_distances(y);
  double_center(a);
  double_center(b);
  return a.cwiseProduct(b).mean();
}

SplitTestResult empirical_split_test(const Eigen::MatrixXd& samples,
                                     const Subspace& s, double level,
                                     const SplitTestOptions& opts) {
  if (samples.cols() != s.ambient_dim())
    throw std::invalid_argument("empirical_split_test: dimension mismatch");
  if (samples.rows() < 16)
    throw std::invalid_argument("empirical_split_test: too few samples");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("empirical_split_test: level must be in (0,1)");

  SplitTestResult result;
  if (s.dim() == 0 || s.dim() == s.ambient_dim()) return result;  // vacuous

  const Subspace sc = complement(s);
  const Eigen::MatrixXd y = samples * s.basis();   // coordinates in S
  const Eigen::MatrixXd z = samples * sc.basis();  // coordinates in S^perp
  const Eigen::Index n = samples.rows();

  // --- (a) cross-covariance norm against its bootstrap null ---------------
  const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
  const Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cross = yc.transpose() * zc / static_cast<double>(n);
  result.cross_stat = cross.norm();

  Rng boot_rng(derive_seed(opts.seed, "split_test_bootstrap", 0));
  std::vector<double> null_stats;
  null_stats.reserve(static_cast<std::size_t>(opts.bootstrap_reps));
  for (int b = 0; b < opts.bootstrap_reps; ++b) {
    Eigen::MatrixXd cb = Eigen::MatrixXd::Zero(y.cols(), z.cols());
    Eigen::VectorXd my = Eigen::VectorXd::Zero(y.cols());
    Eigen::VectorXd mz = Eigen::VectorXd::Zero(z.cols());
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
    for (auto& r : rows)
      r = static_cast<Eigen::Index>(
          boot_rng.uniform_index(static_cast<std::size_t>(n)));
    for (const auto r : rows) {
      cb += y.row(r).transpose() * z.row(r);
      my += y.row(r).transpose();
      mz += z.row(r).transpose();
    }
    cb /= static_cast<double>(n);
    my /= static_cast<double>(n);
    mz /= static_cast<double>(n);
    cb -= my * mz.transpose();
    // Centered bootstrap: distribution of the statistic around its point value.
    null_stats.push_back((cb - cross).norm());
  }
  result.cross_threshold = quantile_above(std::move(null_stats), level);
  result.cross_pass = result.cross_stat <= result.cross_threshold;

  // --- (b) distance covariance with permutation null ----------------------
  Rng dcov_rng(derive_seed(opts.seed, "split_test_dcov", 0));
  const Eigen::Index m =
      std::min<Eigen::Index>(n, std::max(16, opts.dcov_subsample));
  const auto idx = subsample_indices(n, m, dcov_rng);
  Eigen::MatrixXd ys(m, y.cols()), zs(m, z.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    ys.row(i) = y.row(idx[static_cast<std::size_t>(i)]);
    zs.row(i) = z.row(idx[static_cast<std::size_t>(i)]);
  }
  Eigen::MatrixXd a = pairwise_distances(ys);
  Eigen::MatrixXd b = pairwise_distances(zs);
  double_center(a);
  double_center(b);
  result.dcov_stat = a.cwiseProduct(b).mean();

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  int exceed = 0;
  for (int p = 0; p < opts.dcov_permutations; ++p) {
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[dcov_rng.uniform_index(i)]);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Index pi = perm[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < m; ++j)
        acc += a(i, j) * b(pi, perm[static_cast<std::size_t>(j)]);
    }
    if (acc / static_cast<double>(m * m) >= result.dcov_stat) ++exceed;
  }
  result.dcov_pvalue = (1.0 + exceed) / (1.0 + opts.dcov_permutations);
  result.dcov_pass = result.dcov_pvalue > level;

  result.pass = result.cross_pass && result.dcov_pass;
  return result;
}

TwoSampleResult energy_two_sample_test(const Eigen::MatrixXd& x,
                                       const Eigen::MatrixXd& y, double level,
                                       const TwoSampleOptions& opts) {
  if (x.cols() != y.cols())
    throw std::invalid_argument("energy_two_sample_test: dimension mismatch");
  if (x.rows() < 8 || y.rows() < 8)
    throw std::invalid_argument("energy_two_sample_test: too few samples");

  Rng rng(derive_seed(opts.seed, "energy_test", 0));
  const Eigen::Index nx = std::min<Eigen::Index>(x.rows(), opts.subsample);
  const Eigen::Index ny = std::min<Eigen::Index>(y.rows(), opts.subsample);
  const auto ix = subsample_indices(x.rows(), nx, rng);
  const auto iy = subsample_indices(y.rows(), ny, rng);

  Eigen::MatrixXd pooled(nx + ny, x.cols());
  for (Eigen::Index i = 0; i < nx; ++i)
    pooled.row(i) = x.row(ix[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < ny; ++i)
    pooled.row(nx + i) = y.row(iy[static_cast<std::size_t>(i)]);
  const Eigen::MatrixXd d = pairwise_distances(pooled);
  const Eigen::Index total = nx + ny;

  // Energy statistic for a given group labeling (indices of group 1).
  std::vector<Eigen::Index> labels(static_cast<std::size_t>(total));
  std::iota(labels.begin(), labels.end(), Eigen::Index{0});
  const auto energy_stat = [&](const std::vector<Eigen::Index>& order) {
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Eigen::Index i = 0; i < nx; ++i) {
      const Eigen::Index a = order[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < nx; ++j)
        sxx += d(a, order[static_cast<std::size_t>(j)]);
      for (Eigen::Index j = nx; j < total; ++j)
        sxy += d(a, order[static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index i = nx; i < total; ++i) {
      const Eigen::Index a = order[static_cast<std::size_t>(i)];
      for (Eigen::Index j = nx; j < total; ++j)
        syy += d(a, order[static_cast<std::size_t>(j)]);
    }
    const double fx = static_cast<double>(nx), fy = static_cast<double>(ny);
    return 2.0 * sxy / (fx * fy) - sxx / (fx * fx) - syy / (fy * fy);
  };

  TwoSampleResult result;
  result.stat = energy_stat(labels);
  int exceed = 0;
  for (int p = 0; p < opts.permutations; ++p) {
    for (std::size_t i = labels.size(); i > 1; --i)
      std::swap(labels[i - 1], labels[rng.uniform_index(i)]);
    if (energy_stat(labels) >= result.stat) ++exceed;
  }
  result.pvalue = (1.0 + exceed) / (1.0 + opts.permutations);
  result.pass = result.pvalue > level;
  return result;
}

}  // namespace splitkit

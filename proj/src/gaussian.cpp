#include "splitkit/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace splitkit {

GaussianMeasure::GaussianMeasure(Eigen::VectorXd mean, Eigen::MatrixXd cov, double tol)
    : mean_(std::move(mean)), cov_(std::move(cov)), tol_(tol) {
  const Eigen::Index n = mean_.size();
  if (cov_.rows() != n || cov_.cols() != n)
    throw std::invalid_argument("GaussianMeasure: cov shape does not match mean");
  if (n == 0) {
    factor_.resize(0, 0);
    range_.resize(0, 0);
    evals_.resize(0);
    rank_ = 0;
    return;
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("GaussianMeasure: cov is not symmetric");
  cov_ = 0.5 * (cov_ + cov_.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
  const Eigen::VectorXd& vals = es.eigenvalues();  // ascending
  if (vals[0] < -1e-10 * scale)
    throw std::invalid_argument("GaussianMeasure: cov has a negative eigenvalue");
  const double vmax = std::max(vals[n - 1], 0.0);

  rank_ = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (vals[i] > tol_ * vmax && vals[i] > 0.0) ++rank_;

  range_ = es.eigenvectors().rightCols(rank_);
  evals_ = vals.tail(rank_).cwiseMax(0.0);
  factor_ = range_ * evals_.cwiseSqrt().asDiagonal();
}

GaussianMeasure GaussianMeasure::standard(int dim) {
  return GaussianMeasure(Eigen::VectorXd::Zero(dim),
                         Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::VectorXd GaussianMeasure::sample(Rng& rng) const {
  if (rank_ == 0) return mean_;
  return mean_ + factor_ * rng.normal_vector(rank_);
}

double GaussianMeasure::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != mean_.size())
    throw std::invalid_argument("log_density: dimension mismatch");
  if (rank_ < dim())
    throw std::logic_error(
        "log_density: rank-deficient covariance has no Lebesgue density");
  const Eigen::VectorXd y = range_.transpose() * (x - mean_);
  double out = 0.0;
  for (int i = 0; i < rank_; ++i)
    out -= 0.5 * (y[i] * y[i] / evals_[i] +
                  std::log(2.0 * std::numbers::pi * evals_[i]));
  return out;
}

double gaussian_kl(const GaussianMeasure& p, const GaussianMeasure& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("gaussian_kl: dimension mismatch");
  const int n = p.dim();
  if (n == 0) return 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  const double tol = std::max(p.tol(), q.tol());

  const int r = q.rank();
  if (p.rank() != r) return inf;  // a strict range drop is singular w.r.t. q

  const Eigen::MatrixXd& vq = q.range_basis();
  const Eigen::MatrixXd pq = vq * vq.transpose();

  // Support inclusion within tolerance: mean gap and p's covariance range must
  // both lie in range(q.cov).
  const Eigen::VectorXd delta = p.mean() - q.mean();
  if ((delta - pq * delta).norm() > tol * (1.0 + delta.norm())) return inf;
  const double cov_scale = std::max(1.0, p.cov().norm());
  if ((p.cov() - pq * p.cov() * pq).norm() > tol * cov_scale) return inf;

  // Work in the r-dimensional range coordinates of q.
  const Eigen::VectorXd d = vq.transpose() * delta;
  const Eigen::MatrixXd sp = vq.transpose() * p.cov() * vq;
  const Eigen::VectorXd qe = q.range_eigenvalues();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esp(sp);
  const Eigen::VectorXd pe = esp.eigenvalues();
  if (pe[0] <= 0.0) return inf;

  // In these coordinates Sq = vq' q.cov vq is diagonal with entries qe.
  double trace = 0.0, quad = 0.0, logdet_q = 0.0, logdet_p = 0.0;
  for (int i = 0; i < r; ++i) {
    logdet_q += std::log(qe[i]);
    logdet_p += std::log(pe[i]);
    trace += sp(i, i) / qe[i];
    quad += d[i] * d[i] / qe[i];
  }
  return 0.5 * (trace + quad - r + logdet_q - logdet_p);
}

GaussianMeasure marginal_gaussian(const GaussianMeasure& g, const Subspace& s) {
  if (g.dim() != s.ambient_dim())
    throw std::invalid_argument("marginal_gaussian: dimension mismatch");
  const Eigen::MatrixXd& b = s.basis();
  return GaussianMeasure(b.transpose() * g.mean(), b.transpose() * g.cov() * b,
                         g.tol());
}

}  // namespace splitkit

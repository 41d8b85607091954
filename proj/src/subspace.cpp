#include "splitkit/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace splitkit {

Subspace::Subspace(Eigen::MatrixXd basis, int ambient_dim, double tol)
    : basis_(std::move(basis)), ambient_dim_(ambient_dim), tol_(tol) {
  if (ambient_dim_ < 0) throw std::invalid_argument("Subspace: negative ambient_dim");
  if (basis_.rows() != ambient_dim_)
    throw std::invalid_argument("Subspace: basis rows != ambient_dim");
  if (basis_.cols() > ambient_dim_)
    throw std::invalid_argument("Subspace: more basis vectors than ambient_dim");
  if (tol_ <= 0.0) throw std::invalid_argument("Subspace: tol must be positive");
  if (basis_.cols() > 0) {
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    const double err =
        (gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (err > 1e-8)
      throw std::invalid_argument("Subspace: basis columns are not orthonormal");
  }
}

Subspace Subspace::zero(int ambient_dim, double tol) {
  return Subspace(Eigen::MatrixXd(ambient_dim, 0), ambient_dim, tol);
}

Subspace Subspace::full(int ambient_dim, double tol) {
  return Subspace(Eigen::MatrixXd::Identity(ambient_dim, ambient_dim), ambient_dim, tol);
}

Subspace Subspace::coordinate_span(int ambient_dim, const std::vector<int>& axes,
                                   double tol) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(ambient_dim, static_cast<int>(axes.size()));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (axes[j] < 0 || axes[j] >= ambient_dim)
      throw std::invalid_argument("coordinate_span: axis out of range");
    b(axes[j], static_cast<int>(j)) = 1.0;
  }
  return Subspace(std::move(b), ambient_dim, tol);
}

Eigen::VectorXd Subspace::project(const Eigen::VectorXd& x) const {
  if (x.size() != ambient_dim_)
    throw std::invalid_argument("Subspace::project: dimension mismatch");
  if (dim() == 0) return Eigen::VectorXd::Zero(ambient_dim_);
  return basis_ * (basis_.transpose() * x);
}

bool Subspace::contains(const Eigen::VectorXd& x) const {
  const double nx = x.norm();
  if (nx == 0.0) return true;
  return (x - project(x)).norm() <= 1e-8 * nx;
}

Subspace subspace_from_spanning_set(const std::vector<Eigen::VectorXd>& vectors,
                                    int ambient_dim, double tol) {
  if (vectors.empty()) return Subspace::zero(ambient_dim, tol);
  Eigen::MatrixXd m(ambient_dim, static_cast<int>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != ambient_dim)
      throw std::invalid_argument("subspace_from_spanning_set: dimension mismatch");
    m.col(static_cast<int>(j)) = vectors[j];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return Subspace::zero(ambient_dim, tol);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return Subspace(svd.matrixU().leftCols(rank), ambient_dim, tol);
}

Subspace complement(const Subspace& s) {
  const int n = s.ambient_dim();
  if (s.dim() == 0) return Subspace::full(n, s.tol());
  if (s.dim() == n) return Subspace::zero(n, s.tol());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.basis(), Eigen::ComputeFullU);
  return Subspace(svd.matrixU().rightCols(n - s.dim()), n, s.tol());
}

Subspace intersect(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("intersect: ambient dimensions differ");
  const int n = a.ambient_dim();
  const double tol = std::max(a.tol(), b.tol());
  if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(n, tol);
  if (a.dim() == n) return Subspace(b.basis(), n, tol);
  if (b.dim() == n) return Subspace(a.basis(), n, tol);
  // x lies in both subspaces iff (P_a + P_b) x = 2x.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.projector() + b.projector());
  const auto& vals = es.eigenvalues();  // ascending
  int count = 0;
  for (Eigen::Index i = vals.size() - 1; i >= 0; --i) {
    if (vals[i] >= 2.0 - tol)
      ++count;
    else
      break;
  }
  if (count == 0) return Subspace::zero(n, tol);
  return Subspace(es.eigenvectors().rightCols(count), n, tol);
}

Subspace direct_sum(const std::vector<Subspace>& parts, int ambient_dim, double tol) {
  std::vector<Eigen::VectorXd> cols;
  for (const auto& p : parts) {
    if (p.ambient_dim() != ambient_dim)
      throw std::invalid_argument("direct_sum: ambient dimensions differ");
    for (int j = 0; j < p.dim(); ++j) cols.push_back(p.basis().col(j));
  }
  return subspace_from_spanning_set(cols, ambient_dim, tol);
}

double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("subspace_distance: ambient dimensions differ");
  return (a.projector() - b.projector()).norm();
}

Eigen::MatrixXd canonical_basis(const Subspace& s) {
  const int d = s.dim();
  if (d == 0) return Eigen::MatrixXd(s.ambient_dim(), 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.projector());
  Eigen::MatrixXd b = es.eigenvectors().rightCols(d);  // eigenvalues ~1
  for (int j = 0; j < d; ++j) {
    Eigen::Index imax = 0;
    b.col(j).cwiseAbs().maxCoeff(&imax);
    if (b(imax, j) < 0.0) b.col(j) = -b.col(j);
  }
  return b;
}

}  // namespace splitkit

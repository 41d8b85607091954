#pragma once

#include <vector>

#include <Eigen/Core>

namespace splitkit {

inline constexpr double kDefaultRankTol = 1e-9;

// A linear subspace of R^n held as an orthonormal basis (n x d matrix).
// The zero subspace has an n x 0 basis.  `tol` is the relative threshold used
// by rank decisions involving this subspace (singular values / eigenvalues).
class Subspace {
 public:
  /// Wraps an existing orthonormal basis.  Throws std::invalid_argument if the
  /// columns are not orthonormal within 1e-8 or dimensions are inconsistent.
  Subspace(Eigen::MatrixXd basis, int ambient_dim, double tol = kDefaultRankTol);

  static Subspace zero(int ambient_dim, double tol = kDefaultRankTol);
  static Subspace full(int ambient_dim, double tol = kDefaultRankTol);
  /// Span of the given coordinate axes.
  static Subspace coordinate_span(int ambient_dim, const std::vector<int>& axes,
                                  double tol = kDefaultRankTol);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.cols()); }
  double tol() const { return tol_; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// Orthogonal projector onto the subspace (n x n).
  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

  /// Projection of x onto the subspace.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

  /// True if x lies in the subspace up to a relative tolerance.
  bool contains(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd basis_;
  int ambient_dim_;
  double tol_;
};

/// Orthonormalizes a spanning set into a Subspace.  Rank is decided by
/// singular values above tol times the largest one.
Subspace subspace_from_spanning_set(const std::vector<Eigen::VectorXd>& vectors,
                                    int ambient_dim, double tol = kDefaultRankTol);

/// Orthogonal complement.
Subspace complement(const Subspace& s);

/// Intersection of two subspaces of the same ambient space, computed from the
/// top eigenvectors of P_a + P_b (eigenvalue within tol of 2).
Subspace intersect(const Subspace& a, const Subspace& b);

/// Direct sum of mutually orthogonal subspaces (re-orthonormalized).
Subspace direct_sum(const std::vector<Subspace>& parts, int ambient_dim,
                    double tol = kDefaultRankTol);

/// Frobenius distance between the projectors of a and b.  Zero iff the
/// subspaces are equal; usable as a metric on the Grassmannian.
double subspace_distance(const Subspace& a, const Subspace& b);

/// Deterministic canonical basis obtained from the projector's eigenvectors
/// with sign fixed by the first coordinate of largest magnitude.  Two equal
/// subspaces built along different construction paths canonicalize to nearly
/// identical matrices.
Eigen::MatrixXd canonical_basis(const Subspace& s);

}  // namespace splitkit

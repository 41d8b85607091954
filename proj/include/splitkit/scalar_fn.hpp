#pragma once

#include <functional>

#include <Eigen/Core>

namespace splitkit {

// A scalar test function on R^n.  Linear and quadratic forms carry their
// coefficients so that Gaussian computations can take closed-form paths;
// anything else is an opaque callable handled by Monte Carlo.
class ScalarFn {
 public:
  enum class Kind { linear, quadratic, custom };

  /// u.x + c
  static ScalarFn linear(Eigen::VectorXd u, double c = 0.0);
  /// x'Ax + b.x + c (A is symmetrized)
  static ScalarFn quadratic(Eigen::MatrixXd a, Eigen::VectorXd b, double c = 0.0);
  static ScalarFn constant(int dim, double c);
  static ScalarFn custom(int dim, std::function<double(const Eigen::VectorXd&)> fn);
  /// |x|^2 as an explicit quadratic form.
  static ScalarFn norm_squared(int dim);

  double operator()(const Eigen::VectorXd& x) const;

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool is_closed_form() const { return kind_ != Kind::custom; }

  const Eigen::VectorXd& linear_u() const { return u_; }
  const Eigen::MatrixXd& quad_a() const { return a_; }
  const Eigen::VectorXd& quad_b() const { return u_; }
  double offset() const { return c_; }

 private:
  ScalarFn() = default;
  Kind kind_ = Kind::custom;
  int dim_ = 0;
  Eigen::VectorXd u_;  // linear coefficients (or quadratic b)
  Eigen::MatrixXd a_;
  double c_ = 0.0;
  std::function<double(const Eigen::VectorXd&)> fn_;
};

}  // namespace splitkit

#include "splitkit/scalar_fn.hpp"

#include <stdexcept>

namespace splitkit {

ScalarFn ScalarFn::linear(Eigen::VectorXd u, double c) {
  ScalarFn f;
  f.kind_ = Kind::linear;
  f.dim_ = static_cast<int>(u.size());
  f.u_ = std::move(u);
  f.c_ = c;
  return f;
}

ScalarFn ScalarFn::quadratic(Eigen::MatrixXd a, Eigen::VectorXd b, double c) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("ScalarFn::quadratic: shape mismatch");
  ScalarFn f;
  f.kind_ = Kind::quadratic;
  f.dim_ = static_cast<int>(b.size());
  f.a_ = 0.5 * (a + a.transpose());
  f.u_ = std::move(b);
  f.c_ = c;
  return f;
}

ScalarFn ScalarFn::constant(int dim, double c) {
  return linear(Eigen::VectorXd::Zero(dim), c);
}

ScalarFn ScalarFn::norm_squared(int dim) {
  return quadratic(Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim));
}

ScalarFn ScalarFn::custom(int dim, std::function<double(const Eigen::VectorXd&)> fn) {
  if (!fn) throw std::invalid_argument("ScalarFn::custom: null function");
  ScalarFn f;
  f.kind_ = Kind::custom;
  f.dim_ = dim;
  f.fn_ = std::move(fn);
  return f;
}

double ScalarFn::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("ScalarFn: dimension mismatch");
  switch (kind_) {
    case Kind::linear:
      return u_.dot(x) + c_;
    case Kind::quadratic:
      return x.dot(a_ * x) + u_.dot(x) + c_;
    case Kind::custom:
      return fn_(x);
  }
  return 0.0;  // unreachable
}

}  // namespace splitkit

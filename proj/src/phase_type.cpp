#include "telesched/phase_type.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "telesched/error.hpp"

namespace telesched::laplace {

PhaseType::PhaseType(Eigen::RowVectorXd initial, Eigen::MatrixXd generator, Eigen::VectorXd exit)
    : initial_(std::move(initial)), generator_(std::move(generator)), exit_(std::move(exit)) {
  detail::require(generator_.rows() == generator_.cols() && generator_.rows() > 0,
                  "phase-type generator must be square and non-empty");
  detail::require(initial_.size() == generator_.rows() && exit_.size() == generator_.rows(),
                  "phase-type vectors do not match the generator");
  const Eigen::MatrixXd negated = -generator_;
  absorbed_ = negated.transpose().partialPivLu().solve(initial_.transpose()).transpose();
  mass_ = absorbed_.dot(exit_);
}

double PhaseType::density(double t) const {
  detail::require(t >= 0.0, "density needs t >= 0");
  const Eigen::MatrixXd flow = (generator_ * t).exp();
  return std::max(0.0, (initial_ * flow * exit_)(0));
}

double PhaseType::cumulative(double t) const {
  detail::require(t >= 0.0, "cumulative needs t >= 0");
  const Eigen::MatrixXd flow = (generator_ * t).exp();
  const Eigen::Index n = generator_.rows();
  return (absorbed_ * (Eigen::MatrixXd::Identity(n, n) - flow) * exit_)(0);
}

double PhaseType::laplace(double s) const {
  detail::require(s >= 0.0, "Laplace argument must be >= 0");
  const Eigen::Index n = generator_.rows();
  const Eigen::MatrixXd shifted = s * Eigen::MatrixXd::Identity(n, n) - generator_;
  const Eigen::VectorXd resolvent = shifted.partialPivLu().solve(exit_);
  return initial_.dot(resolvent);
}

}  // namespace telesched::laplace

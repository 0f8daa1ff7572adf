#pragma once

#include <Eigen/Dense>

namespace telesched::laplace {

/// Time to absorption of a finite transient CTMC, restricted to the
/// absorbing exit of interest (here: "served"). Mass on the other exits
/// (pushed out) is missing, so the distribution is defective and its total
/// mass is the service probability.
///
///   density(t)   = a exp(T t) x
///   cumulative(t)= a (-T)^{-1} (I - exp(T t)) x
///   laplace(s)   = a (sI - T)^{-1} x
class PhaseType {
 public:
  PhaseType(Eigen::RowVectorXd initial, Eigen::MatrixXd generator, Eigen::VectorXd exit);

  double density(double t) const;
  double cumulative(double t) const;
  double laplace(double s) const;
  double mass() const { return mass_; }
  Eigen::Index states() const { return generator_.rows(); }

 private:
  Eigen::RowVectorXd initial_;
  Eigen::MatrixXd generator_;
  Eigen::VectorXd exit_;
  Eigen::RowVectorXd absorbed_;  // a (-T)^{-1}
  double mass_ = 0.0;
};

}  // namespace telesched::laplace

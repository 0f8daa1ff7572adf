#pragma once

// Density-matrix machinery for a single request qubit and its teleportation
// resource, plus the closed-form fidelity curves derived from it.
//
// The matrix route (dephase -> Werner -> teleport -> overlap) is the
// reference; every closed form in this header is tested against it.

#include <array>
#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace telesched::qmath {

using Complex = std::complex<double>;

/// alpha|0> + beta|1>, normalized to 1e-12.
class PureQubit {
 public:
  PureQubit(Complex alpha, Complex beta);

  static PureQubit zero();
  static PureQubit one();
  static PureQubit plus();
  /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
  static PureQubit from_bloch(double theta, double phi);

  Complex alpha() const { return alpha_; }
  Complex beta() const { return beta_; }
  double weight0() const { return std::norm(alpha_); }
  double weight1() const { return std::norm(beta_); }
  Eigen::Vector2cd ket() const;

 private:
  Complex alpha_;
  Complex beta_;
};

/// Hermitian, unit-trace, positive semidefinite matrix of dimension 2 or 4.
/// Construction validates all three properties.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd m);

  static DensityMatrix from_ket(const Eigen::VectorXcd& ket);
  static DensityMatrix maximally_mixed(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }
  Complex operator()(int row, int col) const { return m_(row, col); }
  Eigen::VectorXd eigenvalues() const;

 private:
  Eigen::MatrixXcd m_;
};

/// Memory dephasing rate Gamma (1/time), non-negative.
class DephasingParams {
 public:
  explicit DephasingParams(double gamma);
  double gamma() const { return gamma_; }

 private:
  double gamma_;
};

/// F(t) = constant + amplitude * exp(-decay_rate * t).
class FidelityCurve {
 public:
  FidelityCurve(double constant, double amplitude, double decay_rate);

  double constant() const { return constant_; }
  double amplitude() const { return amplitude_; }
  double decay_rate() const { return decay_rate_; }

  double operator()(double t) const;
  double initial() const { return constant_ + amplitude_; }
  double floor() const { return decay_rate_ > 0.0 ? constant_ : initial(); }
  bool strictly_decreasing() const { return amplitude_ > 0.0 && decay_rate_ > 0.0; }
  /// Wait time at which the curve reaches x; x must lie in (floor, initial].
  double time_at(double x) const;

 private:
  double constant_;
  double amplitude_;
  double decay_rate_;
};

/// |Phi+> = (|00> + |11>)/sqrt(2).
Eigen::Vector4cd bell_phi_plus();

/// Bell basis in the order phi_00, phi_01, phi_10, phi_11 matching the
/// correction unitaries I, X, Z, iY.
std::array<Eigen::Vector4cd, 4> bell_basis();
std::array<Eigen::Matrix2cd, 4> teleport_corrections();

DensityMatrix dephase(const DensityMatrix& rho, const DephasingParams& params, double t);

double fidelity_to_pure(const Eigen::VectorXcd& psi, const DensityMatrix& rho);
double fidelity_to_pure(const PureQubit& psi, const DensityMatrix& rho);

/// |a|^4 + 2 e^{-Gamma t} |a|^2 |b|^2 + |b|^4
double single_qubit_fidelity(const PureQubit& q, const DephasingParams& params, double t);

/// Time at which single_qubit_fidelity falls to f.
double inverse_fidelity_time(const PureQubit& q, const DephasingParams& params, double f);

/// (1 + e^{-2 Gamma t}) / 2
double bell_fidelity(const DephasingParams& params, double t);

/// (1-F)/3 I + (4F-1)/3 |Phi+><Phi+|, F in [1/4, 1].
DensityMatrix werner_state(double f);

/// sum_ij <phi_ij|werner|phi_ij> U_ij rho U_ij^dagger
DensityMatrix teleport_channel(const DensityMatrix& werner, const DensityMatrix& rho);

/// Fidelity of q after waiting t1 in memory and being teleported with a
/// Bell pair that waited t2. Closed form; see teleported_fidelity_matrix.
double teleported_fidelity(const PureQubit& q, double t1, double t2, const DephasingParams& params);

/// Same quantity evaluated through the explicit density-matrix pipeline.
double teleported_fidelity_matrix(const PureQubit& q, double t1, double t2,
                                  const DephasingParams& params);

/// Fidelity curve when only the request qubit waits.
FidelityCurve curve_request(const PureQubit& q, const DephasingParams& params);
/// Fidelity curve when only the EPR pair waits.
FidelityCurve curve_epr(const PureQubit& q, const DephasingParams& params);

/// E[F(T)] = constant + amplitude * T*(decay_rate), where laplace(s) is
/// E[exp(-s T)] for a nonnegative T.
double expected_fidelity(const FidelityCurve& curve, const std::function<double(double)>& laplace);

}  // namespace telesched::qmath

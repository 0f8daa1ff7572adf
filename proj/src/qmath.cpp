#include "telesched/qmath.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "telesched/error.hpp"

namespace telesched::qmath {
namespace {

constexpr double kStateTol = 1e-12;
constexpr double kPsdTol = 1e-10;

void require_time(double t, const char* name) {
  detail::require(std::isfinite(t) && t >= 0.0, std::string(name) + " must be a finite time >= 0");
}

}  // namespace

PureQubit::PureQubit(Complex alpha, Complex beta) : alpha_(alpha), beta_(beta) {
  const double norm = std::norm(alpha) + std::norm(beta);
  detail::require(std::abs(norm - 1.0) <= kStateTol, "qubit amplitudes must satisfy |alpha|^2 + |beta|^2 = 1");
}

PureQubit PureQubit::zero() { return {1.0, 0.0}; }
PureQubit PureQubit::one() { return {0.0, 1.0}; }
PureQubit PureQubit::plus() { return {M_SQRT1_2, M_SQRT1_2}; }

PureQubit PureQubit::from_bloch(double theta, double phi) {
  return {std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi)};
}

Eigen::Vector2cd PureQubit::ket() const { return {alpha_, beta_}; }

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
  detail::require(m_.rows() == m_.cols() && (m_.rows() == 2 || m_.rows() == 4),
                  "density matrix must be 2x2 or 4x4");
  detail::require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= kStateTol, "density matrix must be Hermitian");
  detail::require(std::abs(m_.trace() - Complex(1.0)) <= kStateTol, "density matrix must have unit trace");
  detail::require(eigenvalues().minCoeff() >= -kPsdTol, "density matrix must be positive semidefinite");
}

DensityMatrix DensityMatrix::from_ket(const Eigen::VectorXcd& ket) {
  return DensityMatrix(ket * ket.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  detail::require(dim == 2 || dim == 4, "dimension must be 2 or 4");
  return DensityMatrix(Eigen::MatrixXcd::Identity(dim, dim) / static_cast<double>(dim));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

DephasingParams::DephasingParams(double gamma) : gamma_(gamma) {
  detail::require(std::isfinite(gamma) && gamma >= 0.0, "dephasing rate must be finite and >= 0");
}

FidelityCurve::FidelityCurve(double constant, double amplitude, double decay_rate)
    : constant_(constant), amplitude_(amplitude), decay_rate_(decay_rate) {
  detail::require(constant >= -kStateTol && constant <= 1.0 + kStateTol, "curve constant must lie in [0, 1]");
  detail::require(amplitude >= 0.0, "curve amplitude must be >= 0");
  detail::require(std::isfinite(decay_rate) && decay_rate >= 0.0, "curve decay rate must be finite and >= 0");
  detail::require(constant + amplitude <= 1.0 + kStateTol, "curve initial value must not exceed 1");
}

double FidelityCurve::operator()(double t) const {
  return constant_ + amplitude_ * std::exp(-decay_rate_ * t);
}

double FidelityCurve::time_at(double x) const {
  detail::require(strictly_decreasing(), "curve is constant; no inverse exists");
  detail::require(x > constant_ && x <= initial(), "fidelity outside the attainable range of the curve");
  return std::log(amplitude_ / (x - constant_)) / decay_rate_;
}

Eigen::Vector4cd bell_phi_plus() { return bell_basis()[0]; }

std::array<Eigen::Vector4cd, 4> bell_basis() {
  const double h = M_SQRT1_2;
  // index = 2*a + b for |ab>
  return {Eigen::Vector4cd(h, 0, 0, h), Eigen::Vector4cd(0, h, h, 0), Eigen::Vector4cd(h, 0, 0, -h),
          Eigen::Vector4cd(0, h, -h, 0)};
}

std::array<Eigen::Matrix2cd, 4> teleport_corrections() {
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd x;
  x << 0, 1, 1, 0;
  Eigen::Matrix2cd z;
  z << 1, 0, 0, -1;
  // i * sigma_y
  Eigen::Matrix2cd iy;
  iy << 0, 1, -1, 0;
  return {id, x, z, iy};
}

DensityMatrix dephase(const DensityMatrix& rho, const DephasingParams& params, double t) {
  require_time(t, "dephasing time");
  detail::require(rho.dim() == 2, "dephasing acts on a single qubit");
  Eigen::MatrixXcd out = rho.matrix();
  const double decay = std::exp(-params.gamma() * t);
  out(0, 1) *= decay;
  out(1, 0) *= decay;
  return DensityMatrix(std::move(out));
}

double fidelity_to_pure(const Eigen::VectorXcd& psi, const DensityMatrix& rho) {
  detail::require(psi.size() == rho.dim(), "state and density matrix dimensions differ");
  const Complex overlap = psi.adjoint() * rho.matrix() * psi;
  return overlap.real();
}

double fidelity_to_pure(const PureQubit& psi, const DensityMatrix& rho) {
  return fidelity_to_pure(Eigen::VectorXcd(psi.ket()), rho);
}

double single_qubit_fidelity(const PureQubit& q, const DephasingParams& params, double t) {
  require_time(t, "storage time");
  const double a = q.weight0();
  const double b = q.weight1();
  return a * a + 2.0 * std::exp(-params.gamma() * t) * a * b + b * b;
}

double inverse_fidelity_time(const PureQubit& q, const DephasingParams& params, double f) {
  const double a = q.weight0();
  const double b = q.weight1();
  const double coherent = 2.0 * a * b;
  const double floor = a * a + b * b;
  detail::require(coherent > 0.0, "qubit has no coherence; fidelity is constant and has no inverse");
  detail::require(params.gamma() > 0.0, "dephasing rate is zero; fidelity is constant");
  detail::require(f > floor && f <= 1.0 + kStateTol, "fidelity outside the attainable range (floor, 1]");
  return std::log(coherent / (f - floor)) / params.gamma();
}

double bell_fidelity(const DephasingParams& params, double t) {
  require_time(t, "storage time");
  return 0.5 * (1.0 + std::exp(-2.0 * params.gamma() * t));
}

DensityMatrix werner_state(double f) {
  detail::require(f >= 0.25 - kStateTol && f <= 1.0 + kStateTol, "Werner fidelity must lie in [1/4, 1]");
  const Eigen::Vector4cd phi = bell_phi_plus();
  Eigen::MatrixXcd m = (1.0 - f) / 3.0 * Eigen::Matrix4cd::Identity() + (4.0 * f - 1.0) / 3.0 * phi * phi.adjoint();
  return DensityMatrix(std::move(m));
}

DensityMatrix teleport_channel(const DensityMatrix& werner, const DensityMatrix& rho) {
  detail::require(werner.dim() == 4, "teleportation resource must be a two-qubit state");
  detail::require(rho.dim() == 2, "teleported state must be a single qubit");
  const auto basis = bell_basis();
  const auto corrections = teleport_corrections();
  Eigen::MatrixXcd out = Eigen::Matrix2cd::Zero();
  for (std::size_t i = 0; i < 4; ++i) {
    const double weight = fidelity_to_pure(Eigen::VectorXcd(basis[i]), werner);
    out += weight * corrections[i] * rho.matrix() * corrections[i].adjoint();
  }
  return DensityMatrix(std::move(out));
}

double teleported_fidelity(const PureQubit& q, double t1, double t2, const DephasingParams& params) {
  require_time(t1, "request storage time");
  require_time(t2, "pair storage time");
  // With the Pauli twirl sum_P P rho P = 2I, the channel reduces to
  // F_w * f0 + (1 - F_w)/3 * (2 - f0), f0 the fidelity before teleportation.
  const double f0 = single_qubit_fidelity(q, params, t1);
  const double pair = std::exp(-2.0 * params.gamma() * t2);
  return f0 * (1.0 + 2.0 * pair) / 3.0 + (1.0 - pair) / 3.0;
}

double teleported_fidelity_matrix(const PureQubit& q, double t1, double t2, const DephasingParams& params) {
  const DensityMatrix stored = dephase(DensityMatrix::from_ket(q.ket()), params, t1);
  const DensityMatrix resource = werner_state(bell_fidelity(params, t2));
  return fidelity_to_pure(q, teleport_channel(resource, stored));
}

FidelityCurve curve_request(const PureQubit& q, const DephasingParams& params) {
  const double a = q.weight0();
  const double b = q.weight1();
  return {a * a + b * b, 2.0 * a * b, params.gamma()};
}

FidelityCurve curve_epr(const PureQubit& q, const DephasingParams& params) {
  // teleported_fidelity at t1 = 0: the stored request is intact (f0 = 1).
  const double fresh = single_qubit_fidelity(q, params, 0.0);
  return {(fresh + 1.0) / 3.0, (2.0 * fresh - 1.0) / 3.0, 2.0 * params.gamma()};
}

double expected_fidelity(const FidelityCurve& curve, const std::function<double(double)>& laplace) {
  const double transform = laplace(curve.decay_rate());
  detail::require(std::isfinite(transform) && transform >= -1e-12 && transform <= 1.0 + 1e-10,
                  "Laplace transform value outside [0, 1]");
  return curve.constant() + curve.amplitude() * transform;
}

}  // namespace telesched::qmath

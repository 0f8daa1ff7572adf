#include "telesched/markov.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "telesched/error.hpp"

namespace telesched::markov {
namespace {

constexpr double kUnitLoadSwitch = 1e-9;

bool near_unit(double load) { return std::abs(load - 1.0) < kUnitLoadSwitch; }

// Normalized weights load^i / sum_{k<count} load^k for i in [0, count),
// evaluated from whichever end keeps every power <= 1.
std::vector<double> truncated_geometric(double load, int count) {
  std::vector<double> w(static_cast<std::size_t>(count));
  if (near_unit(load)) {
    for (auto& x : w) x = 1.0 / count;
    return w;
  }
  const bool descending = load > 1.0;
  const double ratio = descending ? 1.0 / load : load;
  const double log_ratio = std::log(ratio);
  // (1 - r) / (1 - r^count) without cancellation near r = 1
  const double head = std::expm1(log_ratio) / std::expm1(count * log_ratio);
  for (int i = 0; i < count; ++i) {
    const int power = descending ? count - 1 - i : i;
    w[static_cast<std::size_t>(i)] = head * std::exp(power * log_ratio);
  }
  return w;
}

// sum_{i=0}^{m} load^i as log; m may be kUnboundedBuffer (requires load < 1).
double log_geometric_sum(double load, int m) {
  if (m == kUnboundedBuffer) return -std::log1p(-load);
  if (near_unit(load)) return std::log(static_cast<double>(m) + 1.0);
  const double log_load = std::log(load);
  const double terms = static_cast<double>(m) + 1.0;
  if (load < 1.0) return std::log(std::expm1(terms * log_load) / std::expm1(log_load));
  // load > 1: factor out load^m
  const double inv = -log_load;
  return m * log_load + std::log(std::expm1(terms * inv) / std::expm1(inv));
}

}  // namespace

void DoubleQueueConfig::validate() const {
  detail::require(std::isfinite(lambda_e) && lambda_e > 0.0, "lambda_e must be a finite rate > 0");
  detail::require(std::isfinite(lambda_r) && lambda_r > 0.0, "lambda_r must be a finite rate > 0");
  detail::require(buf_e >= 0 && buf_r >= 0, "buffer sizes must be >= 0");
  detail::require(static_cast<long long>(buf_e) + buf_r >= 1, "buf_e + buf_r must be >= 1");
  detail::require(std::isfinite(gamma_r) && gamma_r >= 0.0, "gamma_r must be finite and >= 0");
  detail::require(std::isfinite(gamma_e) && gamma_e >= 0.0, "gamma_e must be finite and >= 0");
  if (request_unbounded() && epr_unbounded())
    throw StabilityError("both buffers unbounded: the occupancy chain has no steady state");
  if (request_unbounded() && load() >= 1.0)
    throw StabilityError("unbounded request buffer requires load < 1");
  if (epr_unbounded() && load() <= 1.0)
    throw StabilityError("unbounded EPR buffer requires load > 1");
}

OccupancyDistribution::OccupancyDistribution(int buf_e, int buf_r, std::vector<double> probabilities)
    : buf_e_(buf_e), buf_r_(buf_r), probabilities_(std::move(probabilities)) {
  detail::require(static_cast<long long>(buf_e) + buf_r + 1 == static_cast<long long>(probabilities_.size()),
                  "occupancy distribution size does not match the buffers");
  double total = 0.0;
  for (double p : probabilities_) {
    detail::ensure(p >= 0.0, "occupancy probability is negative");
    total += p;
  }
  detail::ensure(std::abs(total - 1.0) <= 1e-12, "occupancy probabilities do not sum to 1");
}

double OccupancyDistribution::operator[](int n) const {
  detail::require(n >= min_state() && n <= max_state(), "occupancy state out of range");
  return probabilities_[static_cast<std::size_t>(n + buf_e_)];
}

OccupancyDistribution stationary_distribution(const DoubleQueueConfig& cfg) {
  cfg.validate();
  detail::require(!cfg.request_unbounded() && !cfg.epr_unbounded(),
                  "stationary_distribution needs finite buffers; use buffering_probabilities");
  return {cfg.buf_e, cfg.buf_r, truncated_geometric(cfg.load(), cfg.buf_e + cfg.buf_r + 1)};
}

OccupancyDistribution numeric_stationary(const DoubleQueueConfig& cfg) {
  cfg.validate();
  detail::require(!cfg.request_unbounded() && !cfg.epr_unbounded(), "numeric solve needs finite buffers");
  const int size = cfg.buf_e + cfg.buf_r + 1;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i) {
    if (i + 1 < size) {
      q(i, i + 1) = cfg.lambda_r;
      q(i, i) -= cfg.lambda_r;
    }
    if (i > 0) {
      q(i, i - 1) = cfg.lambda_e;
      q(i, i) -= cfg.lambda_e;
    }
  }
  // pi Q = 0 with the last balance equation replaced by normalization
  Eigen::MatrixXd a = q.transpose();
  a.row(size - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
  rhs(size - 1) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  detail::ensure(lu.isInvertible(), "generator system is singular");
  const Eigen::VectorXd pi = lu.solve(rhs);
  std::vector<double> p(pi.data(), pi.data() + size);
  double total = 0.0;
  for (auto& x : p) {
    if (x < 0.0 && x > -1e-14) x = 0.0;
    total += x;
  }
  for (auto& x : p) x /= total;
  return {cfg.buf_e, cfg.buf_r, std::move(p)};
}

BufferingProbabilities buffering_probabilities(const DoubleQueueConfig& cfg) {
  cfg.validate();
  const double load = cfg.load();
  // pi_n proportional to load^(n + buf_e); split the mass at n = 0.
  //   epr side:     sum_{n=-B_e}^{0}  = S(B_e)
  //   request side: sum_{n=0}^{B_r}   = load^{B_e} S(B_r)
  //   total:        S(B_e + B_r)
  // where S(m) = sum_{i=0}^{m} load^i. An unbounded side is summed
  // relative to the opposite end so that S stays finite.
  if (cfg.epr_unbounded()) {
    // Mirror: measure from the request end with load' = 1/load.
    DoubleQueueConfig mirrored = cfg;
    std::swap(mirrored.lambda_e, mirrored.lambda_r);
    std::swap(mirrored.buf_e, mirrored.buf_r);
    const auto m = buffering_probabilities(mirrored);
    return {m.p_r, m.p_e};
  }
  const double log_load = near_unit(load) ? 0.0 : std::log(load);
  const double log_epr = log_geometric_sum(load, cfg.buf_e);
  const double log_req = cfg.buf_e * log_load + log_geometric_sum(load, cfg.buf_r);
  double log_total = 0.0;
  if (cfg.request_unbounded()) {
    log_total = log_geometric_sum(load, kUnboundedBuffer);
  } else {
    log_total = log_geometric_sum(load, cfg.buf_e + cfg.buf_r);
  }
  return {std::exp(log_epr - log_total), std::exp(log_req - log_total)};
}

double service_probability(double load, int buf) {
  detail::require(std::isfinite(load) && load > 0.0, "load must be a finite value > 0");
  detail::require(buf >= 1, "service probability needs a buffer of size >= 1");
  if (buf == kUnboundedBuffer) {
    if (load >= 1.0) throw StabilityError("unbounded buffer requires load < 1");
    return 1.0;
  }
  if (near_unit(load)) return static_cast<double>(buf) / (buf + 1.0);
  // load < 1: (1 - r^B)/(1 - r^{B+1}); load > 1: s (1 - s^B)/(1 - s^{B+1}), s = 1/load
  const bool inverted = load > 1.0;
  const double log_r = inverted ? -std::log(load) : std::log(load);
  const double ratio = std::expm1(buf * log_r) / std::expm1((buf + 1.0) * log_r);
  return inverted ? ratio / load : ratio;
}

}  // namespace telesched::markov

#pragma once

// Steady state of the double-queue birth-death chain. State n in
// [-buf_e, buf_r]: n > 0 requests are buffered, n < 0 EPR pairs are
// buffered. Requests move the chain up at rate lambda_r, EPR pairs move it
// down at rate lambda_e.

#include <limits>
#include <span>
#include <vector>

namespace telesched::markov {

/// Sentinel for an unbounded buffer on one side of the double queue.
inline constexpr int kUnboundedBuffer = std::numeric_limits<int>::max();

struct DoubleQueueConfig {
  double lambda_e = 1.0;  // EPR generation rate
  double lambda_r = 1.0;  // request arrival rate
  int buf_e = 1;
  int buf_r = 1;
  double gamma_r = 0.0;  // request memory dephasing rate
  double gamma_e = 0.0;  // EPR memory dephasing rate

  double load() const { return lambda_r / lambda_e; }
  bool request_unbounded() const { return buf_r == kUnboundedBuffer; }
  bool epr_unbounded() const { return buf_e == kUnboundedBuffer; }
  /// Throws ValidationError (or StabilityError for an unstable unbounded side).
  void validate() const;
};

class OccupancyDistribution {
 public:
  OccupancyDistribution(int buf_e, int buf_r, std::vector<double> probabilities);

  int min_state() const { return -buf_e_; }
  int max_state() const { return buf_r_; }
  /// pi_n for n in [min_state, max_state].
  double operator[](int n) const;
  std::span<const double> probabilities() const { return probabilities_; }

 private:
  int buf_e_;
  int buf_r_;
  std::vector<double> probabilities_;
};

/// Closed-form geometric solution; uniform when load == 1.
OccupancyDistribution stationary_distribution(const DoubleQueueConfig& cfg);

/// Solves pi Q = 0, sum pi = 1 on the explicit generator matrix.
OccupancyDistribution numeric_stationary(const DoubleQueueConfig& cfg);

struct BufferingProbabilities {
  double p_e = 0.0;  // arriving EPR pair finds no request waiting
  double p_r = 0.0;  // arriving request finds no EPR pair waiting
};

/// Supports one unbounded side when the chain is positive recurrent.
BufferingProbabilities buffering_probabilities(const DoubleQueueConfig& cfg);

/// Probability that a buffered arrival is eventually served in a pushout
/// buffer of size buf whose own arrivals come at `load` times the opposite
/// stream's rate: (1 - load^B) / (1 - load^(B+1)). Returns 1 for an
/// unbounded buffer with load < 1.
double service_probability(double load, int buf);

}  // namespace telesched::markov

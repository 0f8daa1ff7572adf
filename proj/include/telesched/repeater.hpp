#pragma once

// A single repeater between two end nodes. Each side generates EPR halves
// at rate mu; a swap consumes one pair from each side, so the node is a
// double queue at load 1 in which both phases decohere like a Bell pair.

#include "telesched/laplace.hpp"
#include "telesched/markov.hpp"
#include "telesched/qmath.hpp"

namespace telesched::repeater {

struct RepeaterConfig {
  double mu = 1.0;     // generation rate per side
  double gamma = 0.0;  // memory dephasing rate
  int buf = 1;         // buffer per side
  laplace::Discipline disc_a = laplace::Discipline::lifo_po;
  laplace::Discipline disc_b = laplace::Discipline::lifo_po;
  void validate() const;
};

struct DoubleQueueModel {
  markov::DoubleQueueConfig config;
  qmath::FidelityCurve curve_a;
  qmath::FidelityCurve curve_b;
};

/// lambda_e = lambda_r = mu; both curves (1/2, 1/2, 2 gamma).
DoubleQueueModel to_double_queue(const RepeaterConfig& rc);

/// 1 - E[F] of the swapped pair, in [0, 1/2].
double mean_infidelity(const RepeaterConfig& rc);

/// Probability a buffered half is eventually swapped: B / (B + 1) at load 1.
double service_probability(const RepeaterConfig& rc);

}  // namespace telesched::repeater

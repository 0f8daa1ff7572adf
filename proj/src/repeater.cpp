#include "telesched/repeater.hpp"

#include <cmath>

#include "telesched/error.hpp"

namespace telesched::repeater {

void RepeaterConfig::validate() const {
  detail::require(std::isfinite(mu) && mu > 0.0, "mu must be finite and > 0");
  detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and >= 0");
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "repeater buffer must be finite and >= 1");
}

DoubleQueueModel to_double_queue(const RepeaterConfig& rc) {
  rc.validate();
  markov::DoubleQueueConfig cfg;
  cfg.lambda_e = rc.mu;
  cfg.lambda_r = rc.mu;
  cfg.buf_e = rc.buf;
  cfg.buf_r = rc.buf;
  cfg.gamma_e = rc.gamma;
  cfg.gamma_r = rc.gamma;
  // a Bell pair that waited t: (1 + exp(-2 gamma t)) / 2
  const qmath::FidelityCurve bell(0.5, 0.5, 2.0 * rc.gamma);
  return {cfg, bell, bell};
}

double mean_infidelity(const RepeaterConfig& rc) {
  const auto model = to_double_queue(rc);
  const double f = laplace::phase_conditioned_mean(model.config, rc.disc_a, rc.disc_b, model.curve_a, model.curve_b);
  return 1.0 - f;
}

double service_probability(const RepeaterConfig& rc) {
  rc.validate();
  return markov::service_probability(1.0, rc.buf);
}

}  // namespace telesched::repeater

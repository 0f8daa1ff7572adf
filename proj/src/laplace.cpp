#include "telesched/laplace.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include "telesched/error.hpp"
#include "telesched/special.hpp"

namespace telesched::laplace {
namespace {

void require_stable(double own, double serving) {
  detail::require(std::isfinite(own) && own > 0.0 && std::isfinite(serving) && serving > 0.0,
                  "rates must be finite and > 0");
  if (own >= serving)
    throw StabilityError("infinite buffer is only stable when its arrival rate is below the serving rate");
}

void require_rate_s(double s) { detail::require(std::isfinite(s) && s >= 0.0, "Laplace argument must be >= 0"); }

// pi_n for the single-queue view, n = 0..buf, proportional to load^n.
Eigen::VectorXd arrival_occupancy(int buf, const QueueRates& rates) {
  markov::DoubleQueueConfig single;
  single.lambda_r = rates.arrival;
  single.lambda_e = rates.service;
  single.buf_e = 0;
  single.buf_r = buf;
  const auto dist = markov::stationary_distribution(single);
  const auto p = dist.probabilities();
  return Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
}

double lifo_po_value(int buf, const QueueRates& rates, int k, double s) {
  if (k <= 0) return 1.0;
  if (k > buf) return 0.0;
  const double a = rates.arrival;
  const double mu = rates.service;
  const double total = a + mu + s;
  // (a+mu+s)^2 - 4 a mu, rearranged to stay positive
  const double disc = (a - mu) * (a - mu) + s * s + 2.0 * s * (a + mu);
  const double root = std::sqrt(disc);
  const double small = 2.0 * mu / (total + root);
  const double large = (total + root) / (2.0 * a);
  const double log_ratio = std::log(small) - std::log(large);
  const double lead = std::pow(small, k);
  if (log_ratio == 0.0) return lead * (buf + 1.0 - k) / (buf + 1.0);
  return lead * std::expm1((buf + 1.0 - k) * log_ratio) / std::expm1((buf + 1.0) * log_ratio);
}

}  // namespace

Discipline parse_discipline(std::string_view name) {
  std::string key;
  for (char c : name) key.push_back(c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (key == "fifo") return Discipline::fifo;
  if (key == "lifo") return Discipline::lifo;
  if (key == "fifo-po") return Discipline::fifo_po;
  if (key == "lifo-po") return Discipline::lifo_po;
  throw ValidationError("unknown discipline '" + std::string(name) + "' (expected fifo, lifo, fifo-po, lifo-po)");
}

std::string discipline_name(Discipline d) {
  switch (d) {
    case Discipline::fifo: return "fifo";
    case Discipline::lifo: return "lifo";
    case Discipline::fifo_po: return "fifo-po";
    case Discipline::lifo_po: return "lifo-po";
  }
  return "?";
}

DisciplineId DisciplineId::fifo_po(int buf) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "fifo-po needs a finite buffer >= 1");
  return {Discipline::fifo_po, buf};
}

DisciplineId DisciplineId::lifo_po(int buf) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "lifo-po needs a finite buffer >= 1");
  return {Discipline::lifo_po, buf};
}

DisciplineId DisciplineId::with_buffer(Discipline kind, int buf) {
  switch (kind) {
    case Discipline::fifo_po: return fifo_po(buf);
    case Discipline::lifo_po: return lifo_po(buf);
    default: return {kind, buf};
  }
}

std::string DisciplineId::name() const {
  if (buffer == markov::kUnboundedBuffer) return discipline_name(kind);
  return discipline_name(kind) + "(" + std::to_string(buffer) + ")";
}

void QueueRates::validate() const {
  detail::require(std::isfinite(arrival) && arrival > 0.0, "arrival rate must be finite and > 0");
  detail::require(std::isfinite(service) && service > 0.0, "service rate must be finite and > 0");
}

QueueRates request_rates(const markov::DoubleQueueConfig& cfg) { return {cfg.lambda_r, cfg.lambda_e}; }
QueueRates epr_rates(const markov::DoubleQueueConfig& cfg) { return {cfg.lambda_e, cfg.lambda_r}; }

WaitTransform::WaitTransform(DisciplineId id, std::function<double(double)> joint, double served_mass,
                             bool conditioned)
    : id_(id), joint_(std::move(joint)), served_mass_(served_mass), conditioned_(conditioned) {
  detail::require(static_cast<bool>(joint_), "transform evaluator is empty");
  detail::require(served_mass_ > 0.0 && served_mass_ <= 1.0 + 1e-12, "service probability must lie in (0, 1]");
}

double WaitTransform::operator()(double s) const { return conditioned_ ? conditioned(s) : joint(s); }

double WaitTransform::joint(double s) const {
  require_rate_s(s);
  return joint_(s);
}

double WaitTransform::conditioned(double s) const { return joint(s) / served_mass_; }

WaitTransform WaitTransform::as_joint() const { return {id_, joint_, served_mass_, false}; }
WaitTransform WaitTransform::as_conditioned() const { return {id_, joint_, served_mass_, true}; }

double fifo_inf_wait_pdf(double lambda_r, double lambda_e, double t) {
  require_stable(lambda_r, lambda_e);
  detail::require(t >= 0.0, "wait time must be >= 0");
  const double rate = lambda_e - lambda_r;
  return rate * std::exp(-rate * t);
}

WaitTransform fifo_inf_laplace(double lambda_r, double lambda_e) {
  require_stable(lambda_r, lambda_e);
  const double rate = lambda_e - lambda_r;
  return {DisciplineId::fifo_inf(), [rate](double s) { return rate / (rate + s); }, 1.0};
}

double lifo_inf_busy_pdf(double lambda_r, double lambda_e, double t) {
  require_stable(lambda_r, lambda_e);
  detail::require(t >= 0.0, "wait time must be >= 0");
  if (t == 0.0) return lambda_e;
  const double z = 2.0 * t * std::sqrt(lambda_r * lambda_e);
  const double gap = std::sqrt(lambda_r) - std::sqrt(lambda_e);
  // exp(-(a+mu)t) I1(z) = exp(-t (sqrt a - sqrt mu)^2) * exp(-z) I1(z)
  const double root_load = std::sqrt(lambda_r / lambda_e);
  return std::exp(-t * gap * gap) * special::bessel_i1_scaled(z) / (t * root_load);
}

WaitTransform lifo_inf_laplace(double lambda_r, double lambda_e) {
  require_stable(lambda_r, lambda_e);
  return {DisciplineId::lifo_inf(),
          [a = lambda_r, mu = lambda_e](double s) {
            const double total = a + mu + s;
            const double disc = (a - mu) * (a - mu) + s * s + 2.0 * s * (a + mu);
            // (total - sqrt(disc)) / (2a), rationalized
            return 2.0 * mu / (total + std::sqrt(disc));
          },
          1.0};
}

Eigen::MatrixXd fifo_po_table(int buf, const QueueRates& rates, double s) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "fifo-po needs a finite buffer >= 1");
  rates.validate();
  require_rate_s(s);
  const double a = rates.arrival;
  const double mu = rates.service;
  const double denom = a + mu + s;
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(buf + 1, buf + 1);
  for (int j = 0; j <= buf; ++j) w(j, 0) = 1.0;
  for (int k = 1; k <= buf; ++k) {
    for (int j = buf - k; j >= 0; --j) {
      double on_arrival = 0.0;
      if (j + k < buf) {
        on_arrival = w(j + 1, k);
      } else if (k > 1) {
        // full: the head is pushed out, everyone moves up
        on_arrival = w(j + 1, k - 1);
      }
      w(j, k) = (a * on_arrival + mu * w(j, k - 1)) / denom;
    }
  }
  return w;
}

Eigen::VectorXd lifo_po_table(int buf, const QueueRates& rates, double s) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "lifo-po needs a finite buffer >= 1");
  rates.validate();
  require_rate_s(s);
  Eigen::VectorXd w(buf + 2);
  for (int k = 0; k <= buf + 1; ++k) w(k) = lifo_po_value(buf, rates, k, s);
  return w;
}

WaitTransform fifo_po_laplace(int buf, double lambda_r, double lambda_e) {
  const QueueRates rates{lambda_r, lambda_e};
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "fifo-po needs a finite buffer >= 1");
  rates.validate();
  const Eigen::VectorXd seen = arrival_occupancy(buf, rates);
  auto joint = [buf, rates, seen](double s) {
    const Eigen::MatrixXd w = fifo_po_table(buf, rates, s);
    double total = 0.0;
    // an arrival seeing n items enters behind them; a full buffer drops its head first
    for (int n = 0; n <= buf; ++n) total += seen(n) * w(0, std::min(n + 1, buf));
    return total;
  };
  return {DisciplineId::fifo_po(buf), joint, markov::service_probability(rates.load(), buf)};
}

WaitTransform lifo_po_laplace(int buf, double lambda_r, double lambda_e) {
  const QueueRates rates{lambda_r, lambda_e};
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "lifo-po needs a finite buffer >= 1");
  rates.validate();
  return {DisciplineId::lifo_po(buf), [buf, rates](double s) { return lifo_po_value(buf, rates, 1, s); },
          markov::service_probability(rates.load(), buf)};
}

PhaseType fifo_po_phase_type(int buf, const QueueRates& rates) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "fifo-po needs a finite buffer >= 1");
  rates.validate();
  // state (j, k), k >= 1, j + k <= B
  Eigen::MatrixXi index = Eigen::MatrixXi::Constant(buf + 1, buf + 1, -1);
  int count = 0;
  for (int k = 1; k <= buf; ++k)
    for (int j = 0; j + k <= buf; ++j) index(j, k) = count++;
  const double a = rates.arrival;
  const double mu = rates.service;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(count, count);
  Eigen::VectorXd exit = Eigen::VectorXd::Zero(count);
  for (int k = 1; k <= buf; ++k) {
    for (int j = 0; j + k <= buf; ++j) {
      const int from = index(j, k);
      gen(from, from) = -(a + mu);
      if (k == 1) {
        exit(from) = mu;
      } else {
        gen(from, index(j, k - 1)) += mu;
      }
      if (j + k < buf) {
        gen(from, index(j + 1, k)) += a;
      } else if (k > 1) {
        gen(from, index(j + 1, k - 1)) += a;
      }
    }
  }
  const Eigen::VectorXd seen = arrival_occupancy(buf, rates);
  Eigen::RowVectorXd initial = Eigen::RowVectorXd::Zero(count);
  for (int n = 0; n <= buf; ++n) initial(index(0, std::min(n + 1, buf))) += seen(n);
  return {initial, gen, exit};
}

PhaseType lifo_po_phase_type(int buf, const QueueRates& rates) {
  detail::require(buf >= 1 && buf != markov::kUnboundedBuffer, "lifo-po needs a finite buffer >= 1");
  rates.validate();
  const double a = rates.arrival;
  const double mu = rates.service;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(buf, buf);
  Eigen::VectorXd exit = Eigen::VectorXd::Zero(buf);
  for (int k = 0; k < buf; ++k) {
    gen(k, k) = -(a + mu);
    if (k > 0) gen(k, k - 1) = mu;
    if (k + 1 < buf) gen(k, k + 1) = a;
  }
  exit(0) = mu;
  Eigen::RowVectorXd initial = Eigen::RowVectorXd::Zero(buf);
  initial(0) = 1.0;
  return {initial, gen, exit};
}

WaitTransform phase_transform(const DisciplineId& id, const QueueRates& rates) {
  rates.validate();
  switch (id.kind) {
    case Discipline::fifo_po: return fifo_po_laplace(id.buffer, rates.arrival, rates.service);
    case Discipline::lifo_po: return lifo_po_laplace(id.buffer, rates.arrival, rates.service);
    case Discipline::fifo:
    case Discipline::lifo:
      detail::require(id.buffer == markov::kUnboundedBuffer,
                      "no analytic transform for " + discipline_name(id.kind) + " with a finite buffer");
      return id.kind == Discipline::fifo ? fifo_inf_laplace(rates.arrival, rates.service)
                                         : lifo_inf_laplace(rates.arrival, rates.service);
  }
  throw InvariantViolation("unhandled discipline");
}

double phase_wait_pdf(const DisciplineId& id, const QueueRates& rates, double t) {
  rates.validate();
  switch (id.kind) {
    case Discipline::fifo_po: {
      const auto pt = fifo_po_phase_type(id.buffer, rates);
      return pt.density(t) / pt.mass();
    }
    case Discipline::lifo_po: {
      const auto pt = lifo_po_phase_type(id.buffer, rates);
      return pt.density(t) / pt.mass();
    }
    case Discipline::fifo:
    case Discipline::lifo:
      detail::require(id.buffer == markov::kUnboundedBuffer,
                      "no analytic density for " + discipline_name(id.kind) + " with a finite buffer");
      return id.kind == Discipline::fifo ? fifo_inf_wait_pdf(rates.arrival, rates.service, t)
                                         : lifo_inf_busy_pdf(rates.arrival, rates.service, t);
  }
  throw InvariantViolation("unhandled discipline");
}

double fidelity_pdf_transform(const std::function<double(double)>& wait_pdf, const qmath::FidelityCurve& curve,
                              double x) {
  const double t = curve.time_at(x);
  return wait_pdf(t) / (curve.decay_rate() * (x - curve.constant()));
}

double fifo_inf_fidelity_pdf(double lambda_r, double lambda_e, const qmath::FidelityCurve& curve, double x) {
  require_stable(lambda_r, lambda_e);
  detail::require(curve.strictly_decreasing(), "curve is constant; fidelity has no density");
  detail::require(x > curve.constant() && x <= curve.initial(), "fidelity outside the attainable range of the curve");
  const double rate = lambda_e - lambda_r;
  const double r = curve.decay_rate();
  const double excess = x - curve.constant();
  return rate * std::pow(excess / curve.amplitude(), rate / r) / (r * excess);
}

namespace {

struct PhasePlan {
  bool active = false;
  double weight = 0.0;
  DisciplineId id;
  QueueRates rates;
};

void check_side(const DisciplineId& id, int cfg_buf, const char* side) {
  const std::string label(side);
  if (id.pushout()) {
    detail::require(id.buffer == cfg_buf, label + " discipline buffer does not match the configured buffer");
  } else {
    detail::require(cfg_buf == markov::kUnboundedBuffer,
                    label + " " + discipline_name(id.kind) +
                        " needs an unbounded buffer for analytic evaluation; use a pushout discipline");
  }
}

std::pair<PhasePlan, PhasePlan> plan_phases(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                                            const DisciplineId& disc_e) {
  cfg.validate();
  const auto buffered = markov::buffering_probabilities(cfg);
  PhasePlan req{false, 0.0, disc_r, request_rates(cfg)};
  PhasePlan epr{false, 0.0, disc_e, epr_rates(cfg)};
  if (cfg.buf_r > 0) {
    check_side(disc_r, cfg.buf_r, "request");
    req.active = true;
    req.weight = cfg.lambda_r * buffered.p_r * markov::service_probability(req.rates.load(), cfg.buf_r);
  }
  if (cfg.buf_e > 0) {
    check_side(disc_e, cfg.buf_e, "EPR");
    epr.active = true;
    epr.weight = cfg.lambda_e * buffered.p_e * markov::service_probability(epr.rates.load(), cfg.buf_e);
  }
  const double total = req.weight + epr.weight;
  detail::ensure(total > 0.0, "no buffered arrival can be served");
  req.weight /= total;
  epr.weight /= total;
  return {req, epr};
}

}  // namespace

PhaseWeights phase_weights(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                           const DisciplineId& disc_e) {
  const auto [req, epr] = plan_phases(cfg, disc_r, disc_e);
  return {req.weight, epr.weight};
}

double phase_conditioned_mean(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                              const DisciplineId& disc_e, const qmath::FidelityCurve& curve_r,
                              const qmath::FidelityCurve& curve_e) {
  const auto [req, epr] = plan_phases(cfg, disc_r, disc_e);
  double mean = 0.0;
  for (const auto* phase : {&req, &epr}) {
    if (!phase->active || phase->weight == 0.0) continue;
    const auto& curve = phase == &req ? curve_r : curve_e;
    const auto transform = phase_transform(phase->id, phase->rates);
    mean += phase->weight * qmath::expected_fidelity(curve, [&transform](double s) { return transform(s); });
  }
  return mean;
}

double phase_conditioned_mean(const markov::DoubleQueueConfig& cfg, Discipline disc_r, Discipline disc_e,
                              const qmath::FidelityCurve& curve_r, const qmath::FidelityCurve& curve_e) {
  const DisciplineId id_r = cfg.buf_r > 0 ? DisciplineId::with_buffer(disc_r, cfg.buf_r) : DisciplineId{disc_r, 0};
  const DisciplineId id_e = cfg.buf_e > 0 ? DisciplineId::with_buffer(disc_e, cfg.buf_e) : DisciplineId{disc_e, 0};
  return phase_conditioned_mean(cfg, id_r, id_e, curve_r, curve_e);
}

double phase_conditioned_pdf(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                             const DisciplineId& disc_e, const qmath::FidelityCurve& curve_r,
                             const qmath::FidelityCurve& curve_e, double x) {
  const auto [req, epr] = plan_phases(cfg, disc_r, disc_e);
  double density = 0.0;
  for (const auto* phase : {&req, &epr}) {
    if (!phase->active || phase->weight == 0.0) continue;
    const auto& curve = phase == &req ? curve_r : curve_e;
    detail::require(curve.strictly_decreasing(), "curve is constant; fidelity has no density");
    if (x <= curve.constant() || x > curve.initial()) continue;
    const PhasePlan& p = *phase;
    density += p.weight * fidelity_pdf_transform([&p](double t) { return phase_wait_pdf(p.id, p.rates, t); },
                                                 curve, x);
  }
  return density;
}

}  // namespace telesched::laplace

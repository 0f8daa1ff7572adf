#pragma once

// Wait-time distributions of a buffered item under the four buffer
// disciplines, their Laplace transforms, and the two-phase fidelity mixture
// of the double queue.
//
// A single-queue view is used throughout: items of one kind arrive at
// `arrival`, each arrival of the opposite kind serves one buffered item at
// `service`. For the request phase that is (lambda_r, lambda_e); for the EPR
// phase the roles swap.

#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "telesched/markov.hpp"
#include "telesched/phase_type.hpp"
#include "telesched/qmath.hpp"

namespace telesched::laplace {

enum class Discipline { fifo, lifo, fifo_po, lifo_po };

/// Case-insensitive: fifo, lifo, fifo-po, lifo-po (underscore accepted).
Discipline parse_discipline(std::string_view name);
std::string discipline_name(Discipline d);

/// A discipline together with its buffer. fifo/lifo are the infinite-buffer
/// variants (buffer == kUnboundedBuffer); the pushout variants need B >= 1.
struct DisciplineId {
  Discipline kind = Discipline::lifo_po;
  int buffer = markov::kUnboundedBuffer;

  static DisciplineId fifo_inf() { return {Discipline::fifo, markov::kUnboundedBuffer}; }
  static DisciplineId lifo_inf() { return {Discipline::lifo, markov::kUnboundedBuffer}; }
  static DisciplineId fifo_po(int buf);
  static DisciplineId lifo_po(int buf);
  /// Pairs a discipline with the buffer configured for its side.
  static DisciplineId with_buffer(Discipline kind, int buf);

  bool pushout() const { return kind == Discipline::fifo_po || kind == Discipline::lifo_po; }
  std::string name() const;
  bool operator==(const DisciplineId&) const = default;
};

struct QueueRates {
  double arrival = 1.0;  // own stream
  double service = 1.0;  // opposite stream
  double load() const { return arrival / service; }
  void validate() const;
};

QueueRates request_rates(const markov::DoubleQueueConfig& cfg);
QueueRates epr_rates(const markov::DoubleQueueConfig& cfg);

/// s -> E[exp(-s W); served] (joint) or E[exp(-s W) | served] (conditioned).
/// The joint transform equals the service probability at s = 0.
class WaitTransform {
 public:
  WaitTransform(DisciplineId id, std::function<double(double)> joint, double served_mass,
                bool conditioned = true);

  double operator()(double s) const;
  double joint(double s) const;
  double conditioned(double s) const;
  double served_mass() const { return served_mass_; }
  bool is_conditioned() const { return conditioned_; }
  const DisciplineId& discipline() const { return id_; }

  WaitTransform as_joint() const;
  WaitTransform as_conditioned() const;

 private:
  DisciplineId id_;
  std::function<double(double)> joint_;
  double served_mass_;
  bool conditioned_;
};

// Infinite buffers. Arguments are (own arrival rate, serving rate) and
// require own < serving.
double fifo_inf_wait_pdf(double lambda_r, double lambda_e, double t);
WaitTransform fifo_inf_laplace(double lambda_r, double lambda_e);
/// M/M/1 busy-period density; t = 0 returns the limit lambda_e.
double lifo_inf_busy_pdf(double lambda_r, double lambda_e, double t);
WaitTransform lifo_inf_laplace(double lambda_r, double lambda_e);

// Finite pushout buffers; any load.
WaitTransform fifo_po_laplace(int buf, double lambda_r, double lambda_e);
WaitTransform lifo_po_laplace(int buf, double lambda_r, double lambda_e);

/// W*(j, k, s) for a FIFO-PO item at position k (1 = head) with j items
/// behind it; entry (j, k) for j + k <= B, zero elsewhere.
Eigen::MatrixXd fifo_po_table(int buf, const QueueRates& rates, double s);
/// W*(k, s) for a LIFO-PO item at stack depth k = 0..B+1 (closed form).
Eigen::VectorXd lifo_po_table(int buf, const QueueRates& rates, double s);

/// Absorbing-chain form of the pushout waits, for densities.
PhaseType fifo_po_phase_type(int buf, const QueueRates& rates);
PhaseType lifo_po_phase_type(int buf, const QueueRates& rates);

/// Conditioned transform of one phase.
WaitTransform phase_transform(const DisciplineId& id, const QueueRates& rates);
/// Conditioned wait density of one phase.
double phase_wait_pdf(const DisciplineId& id, const QueueRates& rates, double t);

/// Density of F(W) at x given the density of W: f_W(t(x)) / (r (x - c)).
double fidelity_pdf_transform(const std::function<double(double)>& wait_pdf,
                              const qmath::FidelityCurve& curve, double x);
/// Closed form of the above for the infinite FIFO wait.
double fifo_inf_fidelity_pdf(double lambda_r, double lambda_e, const qmath::FidelityCurve& curve,
                             double x);

/// Share of served matches in which the request (resp. EPR pair) waited:
/// proportional to lambda_i p_i P_{s,i}.
struct PhaseWeights {
  double request = 0.0;
  double epr = 0.0;
};

PhaseWeights phase_weights(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                           const DisciplineId& disc_e);

double phase_conditioned_mean(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                              const DisciplineId& disc_e, const qmath::FidelityCurve& curve_r,
                              const qmath::FidelityCurve& curve_e);
/// Convenience: buffers taken from cfg.
double phase_conditioned_mean(const markov::DoubleQueueConfig& cfg, Discipline disc_r,
                              Discipline disc_e, const qmath::FidelityCurve& curve_r,
                              const qmath::FidelityCurve& curve_e);

double phase_conditioned_pdf(const markov::DoubleQueueConfig& cfg, const DisciplineId& disc_r,
                             const DisciplineId& disc_e, const qmath::FidelityCurve& curve_r,
                             const qmath::FidelityCurve& curve_e, double x);

}  // namespace telesched::laplace

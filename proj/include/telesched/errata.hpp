#pragma once

// Numeric witnesses for formulas that are easy to get wrong when copied from
// the literature: each pairs a corrected expression with an independent
// reference and with the commonly printed variant.

#include <cstdint>
#include <string>
#include <vector>

#include "telesched/laplace.hpp"
#include "telesched/qmath.hpp"

namespace telesched::errata {

// Printed variants, kept only to show that they disagree with the references.

/// (lambda_e - lambda_r) / (lambda_e - lambda_r - s)
double printed_fifo_laplace(double lambda_r, double lambda_e, double s);
/// (r1^k r2^B - r2^k r1^B) / (r2^B - r2^k), roots scaled by 1/(2 * own rate).
double printed_lifo_po(int buf, const laplace::QueueRates& rates, int k, double s);
/// Teleported fidelity with the ((a*b)^2 - (b*a)^2) term taken literally
/// (real part; the difference is purely imaginary).
double printed_teleported_fidelity(const qmath::PureQubit& q, double t1, double t2,
                                   const qmath::DephasingParams& params);
/// 1 + 2 (|a|^2 |b|^2 - (a*b)^2 - (b*a)^2), real part.
double printed_c1(const qmath::PureQubit& q);

struct FifoLaplaceRow {
  double s = 0.0;
  double corrected = 0.0;
  double printed = 0.0;
  double quadrature = 0.0;
  double simulated = 0.0;
  double simulated_stderr = 0.0;
};

struct PushoutRow {
  std::string discipline;
  int buffer = 0;
  double s = 0.0;
  double closed_form = 0.0;   // recursion (FIFO-PO) or re-derived closed form (LIFO-PO)
  double linear_solve = 0.0;  // absorbing-chain resolvent
  double printed = 0.0;       // LIFO-PO only; NaN otherwise
};

struct TeleportRow {
  double t1 = 0.0;
  double t2 = 0.0;
  double matrix = 0.0;
  double closed_form = 0.0;
  double printed = 0.0;
};

struct ServiceProbabilityRow {
  std::string side;
  double same_load = 0.0;  // single load lambda_r / lambda_e for both sides
  double per_phase = 0.0;  // the side's own arrival / serving ratio
  double simulated = 0.0;
  double simulated_stderr = 0.0;
};

struct EvidenceOptions {
  double lambda_e = 5.0;
  double lambda_r = 2.5;
  int buffer = 10;
  double gamma = 0.01;
  std::int64_t events = 1'000'000;
  std::uint64_t seed = 1;
};

struct Evidence {
  EvidenceOptions options;
  std::vector<FifoLaplaceRow> fifo;
  std::vector<PushoutRow> pushout;
  std::vector<TeleportRow> teleport;
  double printed_c1_plus = 0.0;
  double oracle_c1_plus = 0.0;
  std::vector<ServiceProbabilityRow> service;

  // verdicts
  bool fifo_corrected_matches = false;  // vs quadrature (1e-8) and simulation (3 sigma)
  bool fifo_printed_rejected = false;   // printed form off by > 3 sigma somewhere
  bool pushout_matches = false;         // closed forms vs linear solve (1e-10)
  bool lifo_printed_rejected = false;
  bool teleport_matches = false;
  bool teleport_printed_rejected = false;
  bool per_phase_matches = false;
  bool same_load_rejected = false;
};

Evidence collect_evidence(const EvidenceOptions& opt);
std::string format_evidence(const Evidence& ev);

}  // namespace telesched::errata

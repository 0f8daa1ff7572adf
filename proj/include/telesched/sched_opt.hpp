#pragma once

// Optimality machinery for buffer scheduling: weak supermajorization of wait
// vectors, the elementary transforms that move along it, the LIFO-PO
// no-crossing properties of a schedule, and an executable interchange
// argument that rewrites any work-conserving schedule of a single buffer
// into the LIFO-PO one without ever leaving the majorization order.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "telesched/rng.hpp"
#include "telesched/sim.hpp"

namespace telesched::sched_opt {

/// Waits in R_+^{n-m} x {inf}^m; +inf marks an item that was never served.
class ExtendedWaitVector {
 public:
  ExtendedWaitVector() = default;
  explicit ExtendedWaitVector(std::vector<double> entries);

  std::size_t size() const { return entries_.size(); }
  std::size_t infinite_count() const;
  std::size_t finite_count() const { return size() - infinite_count(); }
  double operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<double>& entries() const { return entries_; }
  /// Finite entries ascending, then the infinities.
  std::vector<double> sorted() const;
  std::string to_string() const;

 private:
  std::vector<double> entries_;
};

/// x <_w y: every ascending prefix sum of x (k = 1..n-m) is >= that of y.
/// Requires equal n and m.
bool weakly_supermajorized_by(const ExtendedWaitVector& x, const ExtendedWaitVector& y, double tol = 1e-12);

/// Entries i, j -> lam x_i + (1-lam) x_j, (1-lam) x_i + lam x_j (0-based).
ExtendedWaitVector t_transform(const ExtendedWaitVector& x, std::size_t i, std::size_t j, double lam);
/// Exchanges entries i and j.
ExtendedWaitVector swap_entries(const ExtendedWaitVector& x, std::size_t i, std::size_t j);
/// Entry j scaled by alpha in [0, 1].
ExtendedWaitVector s_scale(const ExtendedWaitVector& x, std::size_t j, double alpha);

/// sum phi(x_i) <= sum phi(y_i) over finite entries (within tol).
bool convex_order_check(const ExtendedWaitVector& x, const ExtendedWaitVector& y,
                        const std::function<double(double)>& phi, double tol = 1e-12);

// ---------------------------------------------------------------------------
// No-crossing properties of a schedule

struct TimedItem {
  std::int64_t id = 0;
  double arrival = 0.0;
  double departure = 0.0;  // +inf when still present at the end
  bool served = false;
};

/// Rule 1: k, j served, a_k < a_j < d_k < d_j.
/// Rule 2: k served, j discarded, a_k < a_j < d_k.
/// Rule 3: k, j discarded, a_k < a_j <= d_j < d_k.
struct NoCrossingViolation {
  int rule = 0;
  std::int64_t k = 0;
  std::int64_t j = 0;
};

struct NoCrossingReport {
  std::array<std::int64_t, 3> counts{};
  std::vector<NoCrossingViolation> examples;
  std::int64_t total() const { return counts[0] + counts[1] + counts[2]; }
  bool clean() const { return total() == 0; }
};

/// O(n log n) count of every violating pair, with up to max_examples listed.
NoCrossingReport check_no_crossing(std::span<const TimedItem> items, std::size_t max_examples = 10);

/// Items of one kind that passed through the buffer (matched-on-arrival
/// records are skipped; records left in system count as discarded at +inf).
std::vector<TimedItem> timed_items(const sim::SimTrace& trace, sim::Kind kind);

struct TraceReport {
  NoCrossingReport request;
  NoCrossingReport epr;
  bool clean() const { return request.clean() && epr.clean(); }
};

TraceReport lifo_po_trace_properties(const sim::SimTrace& trace, std::size_t max_examples = 10);

// ---------------------------------------------------------------------------
// Single-buffer instances

/// Items arrive at `arrivals`; each service instant serves one buffered item
/// if any is present (it is lost otherwise). At most `buffer` items wait.
struct BufferInstance {
  std::vector<double> arrivals;
  std::vector<double> service_times;
  int buffer = 1;
  void validate() const;
};

/// Per-item outcome of running a policy on an instance.
struct Assignment {
  std::vector<double> departures;  // +inf: still present at the end
  std::vector<bool> served;
  bool operator==(const Assignment&) const = default;
};

/// Index into `present` (item ids, oldest first) to serve.
using ServeChoice = std::function<std::size_t(std::span<const int> present, double now)>;
/// Index into `present` to discard when `arriving` meets a full buffer, or
/// present.size() to discard the arriving item.
using EvictChoice = std::function<std::size_t(std::span<const int> present, int arriving, double now)>;

Assignment realize(const BufferInstance& inst, const ServeChoice& serve, const EvictChoice& evict);
Assignment realize_lifo_po(const BufferInstance& inst);
Assignment realize_random(const BufferInstance& inst, rng::Stream& rng);

/// Calls visit once per distinct decision sequence (every work-conserving
/// policy's behaviour on the instance). Returns the number visited.
std::int64_t enumerate_policies(const BufferInstance& inst, const std::function<void(const Assignment&)>& visit);

/// Throws ValidationError unless some work-conserving policy produces `a`.
void check_realizable(const BufferInstance& inst, const Assignment& a);

ExtendedWaitVector wait_vector(const BufferInstance& inst, const Assignment& a);
std::vector<TimedItem> timed_items(const BufferInstance& inst, const Assignment& a);

/// Random instance: Poisson arrivals and service instants on a common clock.
BufferInstance random_instance(rng::Stream& rng, int n_arrivals, double arrival_rate, double service_rate,
                               int buffer);

// ---------------------------------------------------------------------------
// Interchange argument

struct InterchangeStep {
  int rule = 0;  // which no-crossing rule was repaired
  int k = 0;     // older item
  int j = 0;     // newer item
  /// Rule 1: T-transform weight lam with before = T(after);
  /// rule 2: scale alpha with after_j = alpha * before_k; rule 3: NaN.
  double coefficient = 0.0;
  bool majorized = false;  // before <_w after
};

struct ProofTrace {
  std::vector<ExtendedWaitVector> chain;  // w^{pi_0}, ..., w^{pi_h}
  std::vector<InterchangeStep> steps;
  Assignment final_assignment;
  bool reached_lifo_po = false;
  std::string to_text() const;
};

/// Repairs violations one at a time (earliest older item first) until none
/// remain; each rewrite is checked for realizability and for
/// w_before <_w w_after.
ProofTrace interchange_argument(const BufferInstance& inst, const Assignment& start, int max_steps = 100000);

}  // namespace telesched::sched_opt

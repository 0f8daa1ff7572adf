#pragma once

// Discrete-event simulator of the double queue. Requests and EPR pairs
// arrive as independent Poisson streams; an arrival that finds an item of
// the other kind waiting is matched at once (teleportation), otherwise it is
// buffered on its own side. At most one side is ever nonempty.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "telesched/laplace.hpp"
#include "telesched/markov.hpp"
#include "telesched/qmath.hpp"

namespace telesched::sim {

enum class Kind { request, epr };
enum class Outcome { served, pushed_out, in_system };
enum class Phase { none, request_waited, epr_waited };

const char* to_string(Kind k);
const char* to_string(Outcome o);
const char* to_string(Phase p);

inline constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct RequestRecord {
  std::int64_t id = 0;
  Kind kind = Kind::request;
  double arrival = 0.0;
  double departure = kUnset;  // unset while in system
  Outcome outcome = Outcome::in_system;
  double wait = kUnset;
  Phase phase = Phase::none;  // set for served records
  std::int64_t partner = -1;  // id of the matched record
  bool buffered = false;      // entered its buffer (vs. matched or rejected on arrival)
};

struct BufferedItem {
  std::int64_t id = 0;
  double arrival = 0.0;
};

/// Picks the buffered item (index into oldest-first contents) to serve.
using SelectFn = std::function<std::size_t(std::span<const BufferedItem> contents, double now)>;
/// Called when an arrival meets a full buffer; returns the index to evict,
/// or contents.size() to reject the arriving item.
using EvictFn = std::function<std::size_t(std::span<const BufferedItem> contents,
                                          const BufferedItem& arriving, double now)>;

enum class Order { fifo, lifo };
enum class Overflow { drop_newest, pushout_oldest };

struct SidePolicy {
  Order order = Order::lifo;
  Overflow overflow = Overflow::pushout_oldest;
  SelectFn select;  // overrides order when set
  EvictFn evict;    // overrides overflow when set

  /// fifo/lifo drop the arriving item on overflow; the -po variants push out the oldest.
  static SidePolicy from(laplace::Discipline d);
};

struct PolicySpec {
  SidePolicy request;
  SidePolicy epr;
  static PolicySpec from(laplace::Discipline disc_r, laplace::Discipline disc_e);
};

struct SimCounters {
  std::int64_t arrivals[2] = {0, 0};
  std::int64_t served[2] = {0, 0};
  std::int64_t pushed_out[2] = {0, 0};
  std::int64_t in_system[2] = {0, 0};
};

/// Occupancy cap for an unbounded buffer; the run stops when reached.
inline constexpr std::size_t kStabilityGuard = 1'000'000;

struct SimTrace {
  markov::DoubleQueueConfig config;
  std::uint64_t seed = 0;
  std::vector<RequestRecord> records;  // indexed by id, arrival order
  SimCounters counters;
  double horizon = 0.0;   // time of the last event
  bool truncated = false; // stability guard hit
  /// Time spent in each occupancy state n (requests - EPR pairs).
  std::map<int, double> occupancy_time;
  /// Occupancy state seen by each arrival just before it.
  std::map<int, std::int64_t> arrival_seen;
};

/// Rates may be zero for one stream (degenerate runs); buffers as in cfg.
/// Throws InvariantViolation if the one-side-empty or capacity invariants
/// ever fail.
SimTrace run(const markov::DoubleQueueConfig& cfg, const PolicySpec& policy, std::int64_t n_arrivals,
             std::uint64_t seed);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

struct EstimateOptions {
  double warmup_fraction = 0.05;
  int batches = 20;
};

/// Batch-means estimate of the mean of `values` (in time order).
Estimate batch_means(std::span<const double> values, const EstimateOptions& opt = {});

struct FidelityEstimate {
  Estimate overall;
  Estimate request_phase;  // matches where the request waited
  Estimate epr_phase;      // matches where the EPR pair waited
};

/// Average over served matches (in service order) of the waiting side's
/// curve at its wait.
FidelityEstimate estimate_mean_fidelity(const SimTrace& trace, const qmath::FidelityCurve& curve_r,
                                        const qmath::FidelityCurve& curve_e,
                                        const EstimateOptions& opt = {});

/// Served fraction among buffered arrivals of `kind` (in arrival order,
/// records still in system excluded).
Estimate estimate_service_probability(const SimTrace& trace, Kind kind, const EstimateOptions& opt = {});

/// Waits of records of `kind` with the given outcome, in arrival order.
/// buffered_only drops items matched or rejected on arrival.
std::vector<double> wait_samples(const SimTrace& trace, Kind kind, Outcome outcome, bool buffered_only = true);

/// Time-average occupancy distribution.
std::map<int, double> empirical_occupancy(const SimTrace& trace);
/// Occupancy distribution seen by arrivals.
std::map<int, double> arrival_occupancy(const SimTrace& trace);
/// Fraction of arrivals of each kind that were buffered.
double buffered_fraction(const SimTrace& trace, Kind kind);

/// CSV header `id,kind,arrival,departure,outcome,wait,phase`.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace telesched::sim

#include "telesched/sim.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "telesched/csv.hpp"
#include "telesched/error.hpp"
#include "telesched/rng.hpp"

namespace telesched::sim {
namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();
// stream ids; one per arrival kind so policies see common random numbers
constexpr std::uint64_t kRequestStream = 1;
constexpr std::uint64_t kEprStream = 2;

int index_of(Kind k) { return k == Kind::request ? 0 : 1; }

void validate_for_sim(const markov::DoubleQueueConfig& cfg, std::int64_t n_arrivals) {
  detail::require(n_arrivals >= 1, "need at least one arrival");
  detail::require(std::isfinite(cfg.lambda_e) && cfg.lambda_e >= 0.0, "lambda_e must be finite and >= 0");
  detail::require(std::isfinite(cfg.lambda_r) && cfg.lambda_r >= 0.0, "lambda_r must be finite and >= 0");
  detail::require(cfg.lambda_e + cfg.lambda_r > 0.0, "at least one arrival stream must have a positive rate");
  detail::require(cfg.buf_e >= 0 && cfg.buf_r >= 0, "buffer sizes must be >= 0");
  detail::require(static_cast<long long>(cfg.buf_e) + cfg.buf_r >= 1, "buf_e + buf_r must be >= 1");
}

class Runner {
 public:
  Runner(const markov::DoubleQueueConfig& cfg, const PolicySpec& policy, std::uint64_t seed)
      : cfg_(cfg), policy_(policy), req_rng_(seed, kRequestStream), epr_rng_(seed, kEprStream) {
    trace_.config = cfg;
    trace_.seed = seed;
  }

  SimTrace finish(std::int64_t n_arrivals) {
    trace_.records.reserve(static_cast<std::size_t>(std::min<std::int64_t>(n_arrivals, 50'000'000)));
    double next_req = cfg_.lambda_r > 0.0 ? req_rng_.exponential(cfg_.lambda_r) : kNever;
    double next_epr = cfg_.lambda_e > 0.0 ? epr_rng_.exponential(cfg_.lambda_e) : kNever;
    for (std::int64_t i = 0; i < n_arrivals; ++i) {
      // ties go to the request
      const bool is_req = next_req <= next_epr;
      const double now = is_req ? next_req : next_epr;
      advance(now);
      arrive(is_req ? Kind::request : Kind::epr, now);
      check_invariants();
      if (is_req) {
        next_req += req_rng_.exponential(cfg_.lambda_r);
      } else {
        next_epr += epr_rng_.exponential(cfg_.lambda_e);
      }
      if (trace_.truncated) break;
    }
    for (auto* side : {&requests_, &eprs_}) {
      for (const auto& item : *side) {
        auto& rec = trace_.records[static_cast<std::size_t>(item.id)];
        ++trace_.counters.in_system[index_of(rec.kind)];
      }
    }
    trace_.horizon = clock_;
    return std::move(trace_);
  }

 private:
  int state() const { return static_cast<int>(requests_.size()) - static_cast<int>(eprs_.size()); }

  void advance(double now) {
    trace_.occupancy_time[state()] += now - clock_;
    clock_ = now;
  }

  std::vector<BufferedItem>& buffer_of(Kind k) { return k == Kind::request ? requests_ : eprs_; }
  const SidePolicy& policy_of(Kind k) const { return k == Kind::request ? policy_.request : policy_.epr; }
  int capacity_of(Kind k) const { return k == Kind::request ? cfg_.buf_r : cfg_.buf_e; }

  void arrive(Kind kind, double now) {
    ++trace_.arrival_seen[state()];
    const auto id = static_cast<std::int64_t>(trace_.records.size());
    RequestRecord rec;
    rec.id = id;
    rec.kind = kind;
    rec.arrival = now;
    trace_.records.push_back(rec);
    ++trace_.counters.arrivals[index_of(kind)];

    const Kind other = kind == Kind::request ? Kind::epr : Kind::request;
    auto& waiting = buffer_of(other);
    if (!waiting.empty()) {
      match(id, other, select(other, now), now);
      return;
    }
    auto& own = buffer_of(kind);
    const int cap = capacity_of(kind);
    const bool unbounded = cap == markov::kUnboundedBuffer;
    if (unbounded || static_cast<long long>(own.size()) < cap) {
      own.push_back({id, now});
      trace_.records[static_cast<std::size_t>(id)].buffered = true;
      if (unbounded && own.size() >= kStabilityGuard && !trace_.truncated) {
        trace_.truncated = true;
        std::cerr << "warning: unbounded buffer reached " << kStabilityGuard
                  << " items; stopping the run early (unstable load?)\n";
      }
      return;
    }
    const std::size_t victim = evict(kind, {id, now}, now);
    if (victim == own.size()) {
      remove(id, now);  // rejected on arrival, never buffered
      return;
    }
    remove(own[victim].id, now);
    own.erase(own.begin() + static_cast<std::ptrdiff_t>(victim));
    own.push_back({id, now});
    trace_.records[static_cast<std::size_t>(id)].buffered = true;
  }

  std::size_t select(Kind side, double now) {
    const auto& buf = buffer_of(side);
    const auto& pol = policy_of(side);
    std::size_t pick = 0;
    if (pol.select) {
      pick = pol.select(std::span<const BufferedItem>(buf), now);
    } else {
      pick = pol.order == Order::fifo ? 0 : buf.size() - 1;
    }
    detail::ensure(pick < buf.size(), "selection hook returned an out-of-range index");
    return pick;
  }

  std::size_t evict(Kind side, const BufferedItem& arriving, double now) {
    const auto& buf = buffer_of(side);
    const auto& pol = policy_of(side);
    if (buf.empty()) return 0;  // zero-size buffer: reject
    std::size_t pick = 0;
    if (pol.evict) {
      pick = pol.evict(std::span<const BufferedItem>(buf), arriving, now);
    } else {
      pick = pol.overflow == Overflow::pushout_oldest ? 0 : buf.size();
    }
    detail::ensure(pick <= buf.size(), "eviction hook returned an out-of-range index");
    return pick;
  }

  void match(std::int64_t arriving_id, Kind waiting_kind, std::size_t index, double now) {
    auto& waiting = buffer_of(waiting_kind);
    const auto partner_id = waiting[index].id;
    waiting.erase(waiting.begin() + static_cast<std::ptrdiff_t>(index));
    const Phase phase = waiting_kind == Kind::request ? Phase::request_waited : Phase::epr_waited;
    auto& a = trace_.records[static_cast<std::size_t>(arriving_id)];
    auto& w = trace_.records[static_cast<std::size_t>(partner_id)];
    for (auto* r : {&a, &w}) {
      r->departure = now;
      r->wait = now - r->arrival;
      r->outcome = Outcome::served;
      r->phase = phase;
      ++trace_.counters.served[index_of(r->kind)];
    }
    a.partner = partner_id;
    w.partner = arriving_id;
  }

  void remove(std::int64_t id, double now) {
    auto& r = trace_.records[static_cast<std::size_t>(id)];
    r.departure = now;
    r.wait = now - r.arrival;
    r.outcome = Outcome::pushed_out;
    ++trace_.counters.pushed_out[index_of(r.kind)];
  }

  void check_invariants() const {
    detail::ensure(requests_.empty() || eprs_.empty(), "both buffers are nonempty");
    if (cfg_.buf_r != markov::kUnboundedBuffer)
      detail::ensure(static_cast<long long>(requests_.size()) <= cfg_.buf_r, "request buffer over capacity");
    if (cfg_.buf_e != markov::kUnboundedBuffer)
      detail::ensure(static_cast<long long>(eprs_.size()) <= cfg_.buf_e, "EPR buffer over capacity");
  }

  markov::DoubleQueueConfig cfg_;
  const PolicySpec& policy_;
  rng::Stream req_rng_;
  rng::Stream epr_rng_;
  std::vector<BufferedItem> requests_;  // oldest first
  std::vector<BufferedItem> eprs_;
  double clock_ = 0.0;
  SimTrace trace_;
};

}  // namespace

const char* to_string(Kind k) { return k == Kind::request ? "request" : "epr"; }

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::served: return "served";
    case Outcome::pushed_out: return "pushed_out";
    case Outcome::in_system: return "in_system";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::none: return "";
    case Phase::request_waited: return "request_waited";
    case Phase::epr_waited: return "epr_waited";
  }
  return "?";
}

SidePolicy SidePolicy::from(laplace::Discipline d) {
  using laplace::Discipline;
  SidePolicy p;
  p.order = (d == Discipline::fifo || d == Discipline::fifo_po) ? Order::fifo : Order::lifo;
  p.overflow = (d == Discipline::fifo_po || d == Discipline::lifo_po) ? Overflow::pushout_oldest : Overflow::drop_newest;
  return p;
}

PolicySpec PolicySpec::from(laplace::Discipline disc_r, laplace::Discipline disc_e) {
  return {SidePolicy::from(disc_r), SidePolicy::from(disc_e)};
}

SimTrace run(const markov::DoubleQueueConfig& cfg, const PolicySpec& policy, std::int64_t n_arrivals,
             std::uint64_t seed) {
  validate_for_sim(cfg, n_arrivals);
  Runner runner(cfg, policy, seed);
  return runner.finish(n_arrivals);
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "id,kind,arrival,departure,outcome,wait,phase\n";
  for (const auto& r : trace.records) {
    out << r.id << ',' << to_string(r.kind) << ',' << csv::format_number(r.arrival) << ','
        << csv::format_number(r.departure) << ',' << to_string(r.outcome) << ',' << csv::format_number(r.wait)
        << ',' << to_string(r.phase) << '\n';
  }
}

}  // namespace telesched::sim

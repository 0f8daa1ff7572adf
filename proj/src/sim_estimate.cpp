#include <algorithm>
#include <cmath>
#include <numeric>

#include "telesched/error.hpp"
#include "telesched/sim.hpp"

namespace telesched::sim {

Estimate batch_means(std::span<const double> values, const EstimateOptions& opt) {
  detail::require(opt.batches >= 2, "batch means needs at least 2 batches");
  detail::require(opt.warmup_fraction >= 0.0 && opt.warmup_fraction < 1.0, "warm-up fraction must lie in [0, 1)");
  const auto skip = static_cast<std::size_t>(std::floor(opt.warmup_fraction * static_cast<double>(values.size())));
  const auto kept = values.subspan(skip);
  detail::require(!kept.empty(), "no samples left after warm-up");
  Estimate est;
  est.samples = static_cast<std::int64_t>(kept.size());
  est.mean = std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
  const auto batches = static_cast<std::size_t>(opt.batches);
  if (kept.size() < batches) {
    // too few samples for batching: plain standard error
    if (kept.size() < 2) {
      est.std_error = std::numeric_limits<double>::quiet_NaN();
      return est;
    }
    double ss = 0.0;
    for (double v : kept) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(kept.size() - 1) / static_cast<double>(kept.size()));
    return est;
  }
  const std::size_t per_batch = kept.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = kept.begin() + static_cast<std::ptrdiff_t>(b * per_batch);
    // the last batch absorbs the remainder
    const auto last = b + 1 == batches ? kept.end() : first + static_cast<std::ptrdiff_t>(per_batch);
    means[b] = std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
  }
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  est.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  return est;
}

FidelityEstimate estimate_mean_fidelity(const SimTrace& trace, const qmath::FidelityCurve& curve_r,
                                        const qmath::FidelityCurve& curve_e, const EstimateOptions& opt) {
  // one entry per match, taken from the waiting side's record; records are
  // in arrival order, so sort the matches by service time
  struct Match {
    double time;
    double fidelity;
    bool request_waited;
  };
  std::vector<Match> matches;
  for (const auto& r : trace.records) {
    if (r.outcome != Outcome::served || !r.buffered) continue;
    const bool req = r.phase == Phase::request_waited;
    if ((req && r.kind != Kind::request) || (!req && r.kind != Kind::epr)) continue;
    matches.push_back({r.departure, req ? curve_r(r.wait) : curve_e(r.wait), req});
  }
  detail::require(!matches.empty(), "trace has no served match");
  std::stable_sort(matches.begin(), matches.end(), [](const Match& a, const Match& b) { return a.time < b.time; });
  std::vector<double> all;
  std::vector<double> req;
  std::vector<double> epr;
  all.reserve(matches.size());
  for (const auto& m : matches) {
    all.push_back(m.fidelity);
    (m.request_waited ? req : epr).push_back(m.fidelity);
  }
  FidelityEstimate out;
  out.overall = batch_means(all, opt);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  out.request_phase = req.empty() ? Estimate{nan, nan, 0} : batch_means(req, opt);
  out.epr_phase = epr.empty() ? Estimate{nan, nan, 0} : batch_means(epr, opt);
  return out;
}

Estimate estimate_service_probability(const SimTrace& trace, Kind kind, const EstimateOptions& opt) {
  std::vector<double> served;
  for (const auto& r : trace.records) {
    if (r.kind != kind || !r.buffered || r.outcome == Outcome::in_system) continue;
    served.push_back(r.outcome == Outcome::served ? 1.0 : 0.0);
  }
  detail::require(!served.empty(), std::string("no buffered ") + to_string(kind) + " arrivals in trace");
  return batch_means(served, opt);
}

std::vector<double> wait_samples(const SimTrace& trace, Kind kind, Outcome outcome, bool buffered_only) {
  std::vector<double> waits;
  for (const auto& r : trace.records) {
    if (r.kind != kind || r.outcome != outcome) continue;
    if (buffered_only && !r.buffered) continue;
    waits.push_back(r.wait);
  }
  return waits;
}

std::map<int, double> empirical_occupancy(const SimTrace& trace) {
  double total = 0.0;
  for (const auto& [n, t] : trace.occupancy_time) total += t;
  detail::require(total > 0.0, "trace spans no time");
  std::map<int, double> out;
  for (const auto& [n, t] : trace.occupancy_time) out[n] = t / total;
  return out;
}

std::map<int, double> arrival_occupancy(const SimTrace& trace) {
  std::int64_t total = 0;
  for (const auto& [n, c] : trace.arrival_seen) total += c;
  detail::require(total > 0, "trace has no arrivals");
  std::map<int, double> out;
  for (const auto& [n, c] : trace.arrival_seen) out[n] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

double buffered_fraction(const SimTrace& trace, Kind kind) {
  std::int64_t arrivals = 0;
  std::int64_t buffered = 0;
  for (const auto& r : trace.records) {
    if (r.kind != kind) continue;
    ++arrivals;
    if (r.buffered) ++buffered;
  }
  detail::require(arrivals > 0, "no arrivals of this kind");
  return static_cast<double>(buffered) / static_cast<double>(arrivals);
}

}  // namespace telesched::sim

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "telesched/csv.hpp"
#include "telesched/error.hpp"
#include "telesched/sched_opt.hpp"

namespace telesched::sched_opt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Event {
  double time;
  bool arrival;
  int item;  // arrival index, -1 for a service instant
};

std::vector<Event> merged_events(const BufferInstance& inst) {
  std::vector<Event> ev;
  ev.reserve(inst.arrivals.size() + inst.service_times.size());
  for (std::size_t i = 0; i < inst.arrivals.size(); ++i) ev.push_back({inst.arrivals[i], true, static_cast<int>(i)});
  for (double t : inst.service_times) ev.push_back({t, false, -1});
  std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
  return ev;
}

struct State {
  std::vector<int> present;  // oldest first
  Assignment out;
};

State empty_state(const BufferInstance& inst) {
  State s;
  s.out.departures.assign(inst.arrivals.size(), kInf);
  s.out.served.assign(inst.arrivals.size(), false);
  return s;
}

void apply_arrival(State& s, const BufferInstance& inst, const Event& e, std::size_t victim) {
  if (static_cast<int>(s.present.size()) < inst.buffer) {
    s.present.push_back(e.item);
    return;
  }
  if (victim == s.present.size()) {
    s.out.departures[static_cast<std::size_t>(e.item)] = e.time;
    return;
  }
  s.out.departures[static_cast<std::size_t>(s.present[victim])] = e.time;
  s.present.erase(s.present.begin() + static_cast<std::ptrdiff_t>(victim));
  s.present.push_back(e.item);
}

void apply_service(State& s, const Event& e, std::size_t pick) {
  const int item = s.present[pick];
  s.out.departures[static_cast<std::size_t>(item)] = e.time;
  s.out.served[static_cast<std::size_t>(item)] = true;
  s.present.erase(s.present.begin() + static_cast<std::ptrdiff_t>(pick));
}

void dfs(const BufferInstance& inst, const std::vector<Event>& ev, std::size_t next, State state,
         const std::function<void(const Assignment&)>& visit, std::int64_t& count) {
  while (next < ev.size()) {
    const auto& e = ev[next];
    const std::size_t size = state.present.size();
    if (e.arrival && static_cast<int>(size) >= inst.buffer) {
      for (std::size_t v = 0; v <= size; ++v) {
        State branch = state;
        apply_arrival(branch, inst, e, v);
        dfs(inst, ev, next + 1, std::move(branch), visit, count);
      }
      return;
    }
    if (!e.arrival && size > 1) {
      for (std::size_t p = 0; p < size; ++p) {
        State branch = state;
        apply_service(branch, e, p);
        dfs(inst, ev, next + 1, std::move(branch), visit, count);
      }
      return;
    }
    // forced move
    if (e.arrival) {
      apply_arrival(state, inst, e, 0);
    } else if (size == 1) {
      apply_service(state, e, 0);
    }
    ++next;
  }
  ++count;
  visit(state.out);
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// First (k, j), k older, breaking a no-crossing rule; rule 0 when none.
NoCrossingViolation first_violation(const BufferInstance& inst, const Assignment& a) {
  const int n = static_cast<int>(inst.arrivals.size());
  for (int k = 0; k < n; ++k) {
    const double ak = inst.arrivals[static_cast<std::size_t>(k)];
    const double dk = a.departures[static_cast<std::size_t>(k)];
    const bool sk = a.served[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < n; ++j) {
      const double aj = inst.arrivals[static_cast<std::size_t>(j)];
      const double dj = a.departures[static_cast<std::size_t>(j)];
      const bool sj = a.served[static_cast<std::size_t>(j)];
      if (!(ak < aj)) continue;
      if (sk && sj && aj < dk && dk < dj) return {1, k, j};
      if (sk && !sj && aj < dk) return {2, k, j};
      if (!sk && !sj && aj <= dj && dj < dk) return {3, k, j};
    }
  }
  return {0, 0, 0};
}

}  // namespace

void BufferInstance::validate() const {
  detail::require(buffer >= 1, "instance buffer must be >= 1");
  detail::require(!arrivals.empty(), "instance needs at least one arrival");
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    detail::require(std::isfinite(arrivals[i]) && arrivals[i] >= 0.0, "arrival times must be finite and >= 0");
    if (i) detail::require(arrivals[i - 1] < arrivals[i], "arrival times must be strictly increasing");
  }
  for (std::size_t i = 0; i < service_times.size(); ++i) {
    detail::require(std::isfinite(service_times[i]) && service_times[i] >= 0.0, "service times must be finite and >= 0");
    if (i) detail::require(service_times[i - 1] < service_times[i], "service times must be strictly increasing");
    detail::require(!std::binary_search(arrivals.begin(), arrivals.end(), service_times[i]),
                    "service instants must not coincide with arrivals");
  }
}

Assignment realize(const BufferInstance& inst, const ServeChoice& serve, const EvictChoice& evict) {
  inst.validate();
  State s = empty_state(inst);
  for (const auto& e : merged_events(inst)) {
    if (e.arrival) {
      std::size_t victim = 0;
      if (static_cast<int>(s.present.size()) >= inst.buffer) {
        victim = evict(std::span<const int>(s.present), e.item, e.time);
        detail::ensure(victim <= s.present.size(), "eviction choice out of range");
      }
      apply_arrival(s, inst, e, victim);
    } else if (!s.present.empty()) {
      const std::size_t pick = serve(std::span<const int>(s.present), e.time);
      detail::ensure(pick < s.present.size(), "service choice out of range");
      apply_service(s, e, pick);
    }
  }
  return s.out;
}

Assignment realize_lifo_po(const BufferInstance& inst) {
  return realize(
      inst, [](std::span<const int> present, double) { return present.size() - 1; },
      [](std::span<const int>, int, double) { return std::size_t{0}; });
}

Assignment realize_random(const BufferInstance& inst, rng::Stream& rng) {
  return realize(
      inst, [&rng](std::span<const int> present, double) { return static_cast<std::size_t>(rng.below(present.size())); },
      [&rng](std::span<const int> present, int, double) {
        return static_cast<std::size_t>(rng.below(present.size() + 1));
      });
}

std::int64_t enumerate_policies(const BufferInstance& inst, const std::function<void(const Assignment&)>& visit) {
  inst.validate();
  std::int64_t count = 0;
  dfs(inst, merged_events(inst), 0, empty_state(inst), visit, count);
  return count;
}

void check_realizable(const BufferInstance& inst, const Assignment& a) {
  inst.validate();
  const std::size_t n = inst.arrivals.size();
  detail::require(a.departures.size() == n && a.served.size() == n, "assignment size does not match the instance");
  std::vector<int> present;
  auto leaving = [&](double t, int extra) {
    std::vector<int> who;
    for (int i : present)
      if (a.departures[static_cast<std::size_t>(i)] == t) who.push_back(i);
    if (extra >= 0 && a.departures[static_cast<std::size_t>(extra)] == t) who.push_back(extra);
    return who;
  };
  for (const auto& e : merged_events(inst)) {
    if (e.arrival) {
      const bool full = static_cast<int>(present.size()) >= inst.buffer;
      const auto who = leaving(e.time, e.item);
      if (!full) {
        detail::require(who.empty(), "an item leaves at an arrival instant while the buffer has room");
        present.push_back(e.item);
        continue;
      }
      detail::require(who.size() == 1, "a full-buffer arrival must discard exactly one item");
      detail::require(!a.served[static_cast<std::size_t>(who[0])], "an item is served at an arrival instant");
      present.push_back(e.item);
      present.erase(std::find(present.begin(), present.end(), who[0]));
    } else {
      const auto who = leaving(e.time, -1);
      if (present.empty()) continue;
      detail::require(who.size() == 1, "a service instant must serve exactly one buffered item");
      detail::require(a.served[static_cast<std::size_t>(who[0])], "an item is discarded at a service instant");
      present.erase(std::find(present.begin(), present.end(), who[0]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool still = std::find(present.begin(), present.end(), static_cast<int>(i)) != present.end();
    if (still) {
      detail::require(a.departures[i] == kInf && !a.served[i], "an item departs at a time no event explains");
    } else {
      detail::require(std::isfinite(a.departures[i]), "a departed item has no departure time");
    }
  }
}

ExtendedWaitVector wait_vector(const BufferInstance& inst, const Assignment& a) {
  std::vector<double> w(inst.arrivals.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = a.served[i] ? a.departures[i] - inst.arrivals[i] : kInf;
  return ExtendedWaitVector(std::move(w));
}

std::vector<TimedItem> timed_items(const BufferInstance& inst, const Assignment& a) {
  std::vector<TimedItem> out(inst.arrivals.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {static_cast<std::int64_t>(i), inst.arrivals[i], a.departures[i], static_cast<bool>(a.served[i])};
  return out;
}

BufferInstance random_instance(rng::Stream& rng, int n_arrivals, double arrival_rate, double service_rate,
                               int buffer) {
  detail::require(n_arrivals >= 1, "instance needs at least one arrival");
  detail::require(arrival_rate > 0.0 && service_rate > 0.0, "instance rates must be > 0");
  BufferInstance inst;
  inst.buffer = buffer;
  double t = 0.0;
  for (int i = 0; i < n_arrivals; ++i) {
    t += rng.exponential(arrival_rate);
    inst.arrivals.push_back(t);
  }
  // service instants over the arrival window plus a short tail
  const double end = t + static_cast<double>(buffer) / service_rate;
  double s = rng.exponential(service_rate);
  while (s < end) {
    if (!std::binary_search(inst.arrivals.begin(), inst.arrivals.end(), s)) inst.service_times.push_back(s);
    s += rng.exponential(service_rate);
  }
  return inst;
}

std::string ProofTrace::to_text() const {
  std::ostringstream out;
  out << "w0 = " << (chain.empty() ? std::string("[]") : chain.front().to_string()) << '\n';
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    out << "step " << i + 1 << ": rule " << s.rule << " k=" << s.k << " j=" << s.j;
    if (s.rule != 3) out << (s.rule == 1 ? " lambda=" : " alpha=") << csv::format_number(s.coefficient);
    out << " majorized=" << yes_no(s.majorized) << '\n';
    out << "w" << i + 1 << " = " << chain[i + 1].to_string() << '\n';
  }
  out << "lifo-po reached: " << yes_no(reached_lifo_po) << " after " << steps.size() << " steps\n";
  return out.str();
}

ProofTrace interchange_argument(const BufferInstance& inst, const Assignment& start, int max_steps) {
  check_realizable(inst, start);
  ProofTrace proof;
  Assignment cur = start;
  proof.chain.push_back(wait_vector(inst, cur));
  for (int step = 0;; ++step) {
    const auto v = first_violation(inst, cur);
    if (v.rule == 0) break;
    detail::ensure(step < max_steps, "interchange argument did not terminate within the step cap");
    const auto k = static_cast<std::size_t>(v.k);
    const auto j = static_cast<std::size_t>(v.j);
    const double ak = inst.arrivals[k];
    const double aj = inst.arrivals[j];
    const double dk = cur.departures[k];
    const double dj = cur.departures[j];
    Assignment next = cur;
    InterchangeStep rec;
    rec.rule = static_cast<int>(v.rule);
    rec.k = static_cast<int>(v.k);
    rec.j = static_cast<int>(v.j);
    switch (v.rule) {
      case 1:
        // serve j at d_k and k at d_j
        next.departures[k] = dj;
        next.departures[j] = dk;
        rec.coefficient = (aj - ak) / ((aj - ak) + (dj - dk));
        break;
      case 2:
        // j takes k's service; k is discarded when j was
        next.departures[j] = dk;
        next.served[j] = true;
        next.departures[k] = dj;
        next.served[k] = false;
        rec.coefficient = (dk - aj) / (dk - ak);
        break;
      default:
        next.departures[k] = dj;
        next.departures[j] = dk;
        rec.coefficient = std::numeric_limits<double>::quiet_NaN();
        break;
    }
    check_realizable(inst, next);
    const auto& before = proof.chain.back();
    auto after = wait_vector(inst, next);
    rec.majorized = weakly_supermajorized_by(before, after);
    if (v.rule == 1) {
      // the old pair is the T-transform of the new one
      const auto back = t_transform(after, k, j, rec.coefficient);
      detail::ensure(std::abs(back[k] - before[k]) <= 1e-9 * std::max(1.0, before[k]) &&
                         std::abs(back[j] - before[j]) <= 1e-9 * std::max(1.0, before[j]),
                     "rule 1 rewrite is not a T-transform");
    } else if (v.rule == 2) {
      const auto scaled = swap_entries(s_scale(before, k, rec.coefficient), k, j);
      detail::ensure(std::abs(scaled[j] - after[j]) <= 1e-9 * std::max(1.0, after[j]),
                     "rule 2 rewrite is not a scaling");
    }
    proof.steps.push_back(rec);
    proof.chain.push_back(std::move(after));
    cur = std::move(next);
  }
  proof.final_assignment = cur;
  proof.reached_lifo_po = cur == realize_lifo_po(inst);
  return proof;
}

}  // namespace telesched::sched_opt

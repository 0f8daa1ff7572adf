#include "telesched/sched_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "telesched/csv.hpp"
#include "telesched/error.hpp"

namespace telesched::sched_opt {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    ++total_;
  }
  // number of inserted positions < i
  std::int64_t prefix(std::size_t i) const {
    std::int64_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }
  std::int64_t total() const { return total_; }

 private:
  std::vector<std::int64_t> tree_;
  std::int64_t total_ = 0;
};

void require_finite_entry(const ExtendedWaitVector& x, std::size_t i) {
  detail::require(i < x.size(), "index out of range");
  detail::require(std::isfinite(x[i]), "transform index points at an infinite entry");
}

}  // namespace

ExtendedWaitVector::ExtendedWaitVector(std::vector<double> entries) : entries_(std::move(entries)) {
  for (double v : entries_)
    detail::require(!std::isnan(v) && (v >= 0.0 || v == kInf), "wait entries must be >= 0 or +inf");
}

std::size_t ExtendedWaitVector::infinite_count() const {
  return static_cast<std::size_t>(std::count(entries_.begin(), entries_.end(), kInf));
}

std::vector<double> ExtendedWaitVector::sorted() const {
  auto s = entries_;
  std::sort(s.begin(), s.end());  // +inf sorts last
  return s;
}

std::string ExtendedWaitVector::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i) out += ", ";
    out += csv::format_number(entries_[i]);
  }
  return out + "]";
}

bool weakly_supermajorized_by(const ExtendedWaitVector& x, const ExtendedWaitVector& y, double tol) {
  detail::require(x.size() == y.size(), "vectors differ in length");
  detail::require(x.infinite_count() == y.infinite_count(), "vectors differ in their number of infinite entries");
  const auto xs = x.sorted();
  const auto ys = y.sorted();
  const std::size_t finite = x.finite_count();
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t k = 0; k < finite; ++k) {
    sx += xs[k];
    sy += ys[k];
    if (sx < sy - tol * std::max(1.0, std::abs(sy))) return false;
  }
  return true;
}

ExtendedWaitVector t_transform(const ExtendedWaitVector& x, std::size_t i, std::size_t j, double lam) {
  require_finite_entry(x, i);
  require_finite_entry(x, j);
  detail::require(lam >= 0.0 && lam <= 1.0, "T-transform weight must lie in [0, 1]");
  auto e = x.entries();
  e[i] = lam * x[i] + (1.0 - lam) * x[j];
  e[j] = (1.0 - lam) * x[i] + lam * x[j];
  return ExtendedWaitVector(std::move(e));
}

ExtendedWaitVector swap_entries(const ExtendedWaitVector& x, std::size_t i, std::size_t j) {
  detail::require(i < x.size() && j < x.size(), "index out of range");
  auto e = x.entries();
  std::swap(e[i], e[j]);
  return ExtendedWaitVector(std::move(e));
}

ExtendedWaitVector s_scale(const ExtendedWaitVector& x, std::size_t j, double alpha) {
  require_finite_entry(x, j);
  detail::require(alpha >= 0.0 && alpha <= 1.0, "scale must lie in [0, 1]");
  auto e = x.entries();
  e[j] *= alpha;
  return ExtendedWaitVector(std::move(e));
}

bool convex_order_check(const ExtendedWaitVector& x, const ExtendedWaitVector& y,
                        const std::function<double(double)>& phi, double tol) {
  double sx = 0.0;
  double sy = 0.0;
  for (double v : x.entries())
    if (std::isfinite(v)) sx += phi(v);
  for (double v : y.entries())
    if (std::isfinite(v)) sy += phi(v);
  return sx <= sy + tol * std::max(1.0, std::abs(sy));
}

NoCrossingReport check_no_crossing(std::span<const TimedItem> items, std::size_t max_examples) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return items[l].arrival < items[r].arrival || (items[l].arrival == items[r].arrival && items[l].id < items[r].id);
  });
  std::vector<double> coords;
  coords.reserve(items.size());
  for (const auto& it : items) coords.push_back(it.departure);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  auto pos = [&](double d) {
    return static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), d) - coords.begin());
  };
  auto below = [&](double x) {  // coordinates < x
    return static_cast<std::size_t>(std::lower_bound(coords.begin(), coords.end(), x) - coords.begin());
  };
  auto at_most = [&](double x) {  // coordinates <= x
    return static_cast<std::size_t>(std::upper_bound(coords.begin(), coords.end(), x) - coords.begin());
  };

  Fenwick served(coords.size());
  Fenwick discarded(coords.size());
  NoCrossingReport report;
  std::size_t done = 0;  // order[0, done) arrived earlier
  auto record_examples = [&](int rule, const TimedItem& j, auto&& matches) {
    for (std::size_t p = 0; p < done; ++p) {
      if (report.examples.size() >= max_examples) return;
      const auto& k = items[order[p]];
      if (k.arrival < j.arrival && matches(k)) report.examples.push_back({rule, k.id, j.id});
    }
  };

  // items with equal arrival never pair up (a_k < a_j is strict), so a
  // whole group is queried before any of it is inserted
  for (std::size_t start = 0; start < order.size();) {
    std::size_t stop = start;
    while (stop < order.size() && items[order[stop]].arrival == items[order[start]].arrival) ++stop;
    for (std::size_t g = start; g < stop; ++g) {
      const auto& j = items[order[g]];
      if (j.served) {
        // rule 1: earlier served k with a_j < d_k < d_j
        const auto c = served.prefix(below(j.departure)) - served.prefix(at_most(j.arrival));
        if (c > 0) {
          report.counts[0] += c;
          if (report.examples.size() < max_examples)
            record_examples(1, j, [&](const TimedItem& k) {
              return k.served && j.arrival < k.departure && k.departure < j.departure;
            });
        }
      } else {
        // rule 2: earlier served k still present at a_j
        const auto c2 = served.total() - served.prefix(at_most(j.arrival));
        // rule 3: earlier discarded k that outlives j
        const auto c3 = discarded.total() - discarded.prefix(at_most(j.departure));
        report.counts[1] += c2;
        report.counts[2] += c3;
        if (c2 > 0 && report.examples.size() < max_examples)
          record_examples(2, j, [&](const TimedItem& k) { return k.served && j.arrival < k.departure; });
        if (c3 > 0 && report.examples.size() < max_examples)
          record_examples(3, j, [&](const TimedItem& k) { return !k.served && j.departure < k.departure; });
      }
    }
    for (std::size_t g = start; g < stop; ++g) {
      const auto& j = items[order[g]];
      (j.served ? served : discarded).add(pos(j.departure));
    }
    done = stop;
    start = stop;
  }
  return report;
}

std::vector<TimedItem> timed_items(const sim::SimTrace& trace, sim::Kind kind) {
  std::vector<TimedItem> out;
  for (const auto& r : trace.records) {
    if (r.kind != kind) continue;
    if (!r.buffered && r.outcome == sim::Outcome::served) continue;  // matched on arrival
    TimedItem it;
    it.id = r.id;
    it.arrival = r.arrival;
    it.served = r.outcome == sim::Outcome::served;
    it.departure = r.outcome == sim::Outcome::in_system ? kInf : r.departure;
    out.push_back(it);
  }
  return out;
}

TraceReport lifo_po_trace_properties(const sim::SimTrace& trace, std::size_t max_examples) {
  const auto req = timed_items(trace, sim::Kind::request);
  const auto epr = timed_items(trace, sim::Kind::epr);
  return {check_no_crossing(req, max_examples), check_no_crossing(epr, max_examples)};
}

}  // namespace telesched::sched_opt

#include "telesched/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "telesched/csv.hpp"
#include "telesched/error.hpp"
#include "telesched/repeater.hpp"
#include "telesched/rng.hpp"
#include "telesched/sim.hpp"

namespace telesched::sweep {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

bool infinite(laplace::Discipline d) { return d == laplace::Discipline::fifo || d == laplace::Discipline::lifo; }

int worker_count(int requested, std::size_t jobs, int cap) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n = std::min(n, cap);
  return std::max(1, std::min<int>(n, static_cast<int>(jobs)));
}

std::vector<int> buffer_list(const SweepSpec& spec) {
  if (!spec.buffers.empty()) return spec.buffers;
  return {spec.buf_r};
}

double safe_service_probability(double load, int buf) {
  if (buf == 0) return 0.0;
  return markov::service_probability(load, buf);
}

}  // namespace

Param parse_param(std::string_view name) {
  const auto key = lower(name);
  if (key == "load") return Param::load;
  if (key == "mu") return Param::mu;
  if (key == "buffer") return Param::buffer;
  throw ValidationError("unknown sweep parameter '" + std::string(name) + "' (expected load, mu, buffer)");
}

Scale parse_scale(std::string_view name) {
  const auto key = lower(name);
  if (key == "linear" || key == "lin") return Scale::linear;
  if (key == "log") return Scale::log;
  throw ValidationError("unknown grid scale '" + std::string(name) + "' (expected linear, log)");
}

void Grid::validate() const {
  detail::require(points >= 2, "grid needs at least 2 points");
  detail::require(std::isfinite(min) && std::isfinite(max) && min < max, "grid needs finite min < max");
  if (scale == Scale::log) detail::require(min > 0.0, "log grid needs min > 0");
}

std::vector<double> Grid::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / (points - 1);
    if (scale == Scale::linear) {
      v[static_cast<std::size_t>(i)] = min + f * (max - min);
    } else {
      v[static_cast<std::size_t>(i)] = std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
    }
  }
  v.back() = max;
  return v;
}

std::string pair_label(const DisciplinePair& p) {
  return laplace::discipline_name(p.first) + "/" + laplace::discipline_name(p.second);
}

void SweepSpec::validate() const {
  grid.validate();
  detail::require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be finite and >= 0");
  detail::require(std::isfinite(lambda_e) && lambda_e > 0.0, "lambda_e must be finite and > 0");
  detail::require(std::isfinite(lambda_r) && lambda_r > 0.0, "lambda_r must be finite and > 0");
  detail::require(!pairs.empty(), "at least one discipline pair is needed");
  detail::require(events >= 1, "events must be >= 1");
  for (int b : buffers) detail::require(b >= 1, "preset buffers must be >= 1");
  if (buffers.empty()) {
    detail::require(buf_e >= 0 && buf_r >= 0, "buffer sizes must be >= 0");
  }
  switch (param) {
    case Param::load: detail::require(grid.min > 0.0, "load grid must be > 0"); break;
    case Param::buffer:
      detail::require(grid.min >= 1.0, "buffer grid must start at >= 1");
      detail::require(buffers.empty(), "a buffer sweep cannot also list fixed buffers");
      break;
    case Param::mu: detail::require(grid.min > 0.0, "mu grid must be > 0"); break;
  }
  for (const auto& p : pairs) {
    detail::require(!(infinite(p.first) && infinite(p.second)),
                    "fifo/lifo on both sides leaves no finite buffer; use a pushout discipline on one side");
    if (!buffers.empty() || param == Param::buffer) continue;
    if (infinite(p.second)) detail::require(buf_r >= 1, "request buffer must be >= 1 when the EPR side is unbounded");
    if (infinite(p.first)) detail::require(buf_e >= 1, "EPR buffer must be >= 1 when the request side is unbounded");
    if (!infinite(p.first) && !infinite(p.second)) detail::require(buf_e + buf_r >= 1, "buf_e + buf_r must be >= 1");
  }
}

SweepSpec preset(std::string_view name) {
  using laplace::Discipline;
  const auto key = lower(name);
  SweepSpec s;
  s.gamma = 0.01;
  s.lambda_e = 5.0;
  if (key == "fig3") {
    s.param = Param::load;
    s.grid = {0.05, 1.0, 20, Scale::linear};
    s.buf_e = s.buf_r = 10;
    s.pairs = {{Discipline::lifo_po, Discipline::lifo_po},
               {Discipline::fifo_po, Discipline::lifo_po},
               {Discipline::fifo_po, Discipline::fifo_po}};
  } else if (key == "fig4") {
    s.param = Param::load;
    s.grid = {0.1, 2.0, 20, Scale::linear};
    s.buffers = {2, 5, 10};
    s.pairs = {{Discipline::lifo_po, Discipline::lifo_po}, {Discipline::fifo_po, Discipline::lifo_po}};
  } else if (key == "fig5") {
    s.param = Param::load;
    s.grid = {0.1, 2.0, 20, Scale::linear};
    s.buffers = {2, 5, 10};
    s.pairs = {{Discipline::lifo_po, Discipline::lifo_po}};
  } else if (key == "fig6") {
    s.param = Param::mu;
    s.grid = {0.1, 100.0, 13, Scale::log};
    s.buffers = {2, 5, 10};
    s.pairs = {{Discipline::lifo_po, Discipline::lifo_po}};
  } else {
    throw ValidationError("unknown preset '" + std::string(name) + "' (expected fig3, fig4, fig5, fig6)");
  }
  return s;
}

std::vector<Point> expand(const SweepSpec& spec) {
  spec.validate();
  detail::require(spec.param != Param::mu, "a mu sweep is only defined for the repeater");
  const auto xs = spec.grid.values();
  const auto bufs = buffer_list(spec);
  const bool multi = !spec.buffers.empty();
  std::vector<Point> points;
  for (const auto& pair : spec.pairs) {
    for (std::size_t bi = 0; bi < bufs.size(); ++bi) {
      for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        Point p;
        p.x = xs[xi];
        p.pair = pair;
        p.label = pair_label(pair) + (multi ? "@B" + std::to_string(bufs[bi]) : std::string());
        auto& c = p.config;
        c.lambda_e = spec.lambda_e;
        c.lambda_r = spec.param == Param::load ? p.x * spec.lambda_e : spec.lambda_r;
        c.buf_e = multi ? bufs[bi] : spec.buf_e;
        c.buf_r = multi ? bufs[bi] : spec.buf_r;
        if (spec.param == Param::buffer) c.buf_e = c.buf_r = static_cast<int>(std::lround(p.x));
        if (infinite(pair.first)) c.buf_r = markov::kUnboundedBuffer;
        if (infinite(pair.second)) c.buf_e = markov::kUnboundedBuffer;
        c.gamma_r = c.gamma_e = spec.gamma;
        p.seed = rng::derive_seed(spec.seed, bi * xs.size() + xi);
        points.push_back(std::move(p));
      }
    }
  }
  return points;
}

qmath::FidelityCurve request_curve(double gamma) {
  return qmath::curve_request(qmath::PureQubit::plus(), qmath::DephasingParams(gamma));
}

qmath::FidelityCurve epr_curve(double gamma) {
  return qmath::curve_epr(qmath::PureQubit::plus(), qmath::DephasingParams(gamma));
}

double default_analytic(const markov::DoubleQueueConfig& cfg, const DisciplinePair& pair,
                        const qmath::FidelityCurve& curve_r, const qmath::FidelityCurve& curve_e) {
  return laplace::phase_conditioned_mean(cfg, pair.first, pair.second, curve_r, curve_e);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);
      }
    }
  };
  const int count = std::max(1, threads);
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<AnalyzeRow> analyze(const SweepSpec& spec) {
  const auto points = expand(spec);
  const auto curve_r = request_curve(spec.gamma);
  const auto curve_e = epr_curve(spec.gamma);
  std::vector<AnalyzeRow> rows(points.size());
  parallel_for(points.size(), worker_count(spec.threads, points.size(), 64), [&](std::size_t i) {
    const auto& p = points[i];
    auto& row = rows[i];
    row.x = p.x;
    row.label = p.label;
    try {
      row.mean_fidelity = default_analytic(p.config, p.pair, curve_r, curve_e);
      row.p_serve_r = safe_service_probability(p.config.load(), p.config.buf_r);
      row.p_serve_e = safe_service_probability(1.0 / p.config.load(), p.config.buf_e);
    } catch (const StabilityError& e) {
      row.mean_fidelity = row.p_serve_r = row.p_serve_e = kNaN;
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<SimulateRow> simulate(const SweepSpec& spec) {
  const auto points = expand(spec);
  const auto curve_r = request_curve(spec.gamma);
  const auto curve_e = epr_curve(spec.gamma);
  std::vector<SimulateRow> rows(points.size());
  // traces are large; keep a handful in memory at once
  parallel_for(points.size(), worker_count(spec.threads, points.size(), 4), [&](std::size_t i) {
    const auto& p = points[i];
    const auto trace =
        sim::run(p.config, sim::PolicySpec::from(p.pair.first, p.pair.second), spec.events, p.seed);
    auto& row = rows[i];
    row.x = p.x;
    row.label = p.label;
    const auto fid = sim::estimate_mean_fidelity(trace, curve_r, curve_e);
    row.mean_fidelity = fid.overall.mean;
    row.mean_fidelity_stderr = fid.overall.std_error;
    auto serve = [&](sim::Kind k, double& mean, double& se) {
      try {
        const auto est = sim::estimate_service_probability(trace, k);
        mean = est.mean;
        se = est.std_error;
      } catch (const ValidationError&) {
        mean = se = kNaN;  // no buffered arrival of this kind
      }
    };
    serve(sim::Kind::request, row.p_serve_r, row.p_serve_r_stderr);
    serve(sim::Kind::epr, row.p_serve_e, row.p_serve_e_stderr);
  });
  return rows;
}

std::vector<CompareRow> compare(const SweepSpec& spec, const CompareOptions& opt) {
  detail::require(opt.abs_tolerance >= 0.0 && opt.sigmas >= 0.0, "tolerances must be >= 0");
  detail::require(static_cast<bool>(opt.analytic), "no analytic evaluator given");
  const auto points = expand(spec);
  const auto curve_r = request_curve(spec.gamma);
  const auto curve_e = epr_curve(spec.gamma);
  std::vector<CompareRow> rows(points.size());
  parallel_for(points.size(), worker_count(spec.threads, points.size(), 4), [&](std::size_t i) {
    const auto& p = points[i];
    auto& row = rows[i];
    row.x = p.x;
    row.label = p.label;
    try {
      row.analytic = opt.analytic(p.config, p.pair, curve_r, curve_e);
    } catch (const StabilityError&) {
      row.analytic = kNaN;
    }
    const auto trace =
        sim::run(p.config, sim::PolicySpec::from(p.pair.first, p.pair.second), spec.events, p.seed);
    const auto fid = sim::estimate_mean_fidelity(trace, curve_r, curve_e);
    row.simulated = fid.overall.mean;
    row.std_error = fid.overall.std_error;
    row.tolerance = std::max(opt.abs_tolerance, opt.sigmas * row.std_error);
    row.pass = std::abs(row.analytic - row.simulated) <= row.tolerance;
  });
  return rows;
}

std::vector<RepeaterRow> repeater(const SweepSpec& spec) {
  spec.validate();
  detail::require(spec.param == Param::mu, "the repeater sweep runs over mu");
  const auto xs = spec.grid.values();
  const auto bufs = buffer_list(spec);
  for (int b : bufs) detail::require(b >= 1, "repeater buffer must be >= 1");
  const auto& pair = spec.pairs.front();
  std::vector<RepeaterRow> rows(xs.size() * bufs.size());
  parallel_for(rows.size(), worker_count(spec.threads, rows.size(), 64), [&](std::size_t i) {
    const int b = bufs[i / xs.size()];
    const double mu = xs[i % xs.size()];
    repeater::RepeaterConfig rc{mu, spec.gamma, b, pair.first, pair.second};
    rows[i] = {mu, b, repeater::mean_infidelity(rc), repeater::service_probability(rc)};
  });
  return rows;
}

std::string format_analyze(const std::vector<AnalyzeRow>& rows) {
  std::ostringstream out;
  out << "x,discipline_pair,mean_fidelity,p_serve_r,p_serve_e\n";
  for (const auto& r : rows)
    out << csv::join_row({csv::format_number(r.x), r.label, csv::format_number(r.mean_fidelity),
                          csv::format_number(r.p_serve_r), csv::format_number(r.p_serve_e)})
        << '\n';
  return out.str();
}

std::string format_simulate(const std::vector<SimulateRow>& rows) {
  std::ostringstream out;
  out << "x,discipline_pair,mean_fidelity,p_serve_r,p_serve_e,mean_fidelity_stderr,p_serve_r_stderr,"
         "p_serve_e_stderr\n";
  for (const auto& r : rows)
    out << csv::join_row({csv::format_number(r.x), r.label, csv::format_number(r.mean_fidelity),
                          csv::format_number(r.p_serve_r), csv::format_number(r.p_serve_e),
                          csv::format_number(r.mean_fidelity_stderr), csv::format_number(r.p_serve_r_stderr),
                          csv::format_number(r.p_serve_e_stderr)})
        << '\n';
  return out.str();
}

std::string format_compare(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "x,discipline_pair,analytic,simulated,stderr,tolerance,within\n";
  for (const auto& r : rows)
    out << csv::join_row({csv::format_number(r.x), r.label, csv::format_number(r.analytic),
                          csv::format_number(r.simulated), csv::format_number(r.std_error),
                          csv::format_number(r.tolerance), r.pass ? "yes" : "no"})
        << '\n';
  return out.str();
}

std::string format_repeater(const std::vector<RepeaterRow>& rows) {
  std::ostringstream out;
  out << "mu,buffer,mean_infidelity,p_serve\n";
  for (const auto& r : rows)
    out << csv::join_row({csv::format_number(r.mu), std::to_string(r.buffer), csv::format_number(r.mean_infidelity),
                          csv::format_number(r.p_serve)})
        << '\n';
  return out.str();
}

}  // namespace telesched::sweep

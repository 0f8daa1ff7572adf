// telesched: fidelity of teleportation under buffer-management disciplines.
//
//   telesched analyze  --preset fig3
//   telesched simulate --preset fig5 --events 1000000 --seed 7 --output fig5.csv
//   telesched compare  --preset fig3
//   telesched repeater --preset fig6
//
// Exit codes: 0 ok, 1 invalid input, 2 compare tolerance breached,
// 3 internal invariant violated.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "telesched/csv.hpp"
#include "telesched/errata.hpp"
#include "telesched/error.hpp"
#include "telesched/sim.hpp"
#include "telesched/sweep.hpp"

namespace {

using namespace telesched;

struct Flags {
  std::string preset;
  std::string sweep_param;
  double gamma = 0.0;
  double lambda_e = 0.0;
  double lambda_r = 0.0;
  int buf_e = 0;
  int buf_r = 0;
  std::string disc_r;
  std::string disc_e;
  std::uint64_t seed = 0;
  std::int64_t events = 0;
  double grid_min = 0.0;
  double grid_max = 0.0;
  int grid_points = 0;
  std::string grid_scale;
  std::string output;
  int threads = 0;
  double abs_tol = 0.005;
  double sigmas = 3.0;
  bool no_errata = false;
  std::string trace;
};

struct Given {
  CLI::Option* preset;
  CLI::Option* sweep_param;
  CLI::Option* gamma;
  CLI::Option* lambda_e;
  CLI::Option* lambda_r;
  CLI::Option* buf_e;
  CLI::Option* buf_r;
  CLI::Option* disc_r;
  CLI::Option* disc_e;
  CLI::Option* seed;
  CLI::Option* events;
  CLI::Option* grid_min;
  CLI::Option* grid_max;
  CLI::Option* grid_points;
  CLI::Option* grid_scale;
  CLI::Option* threads;
};

bool has(const CLI::Option* o) { return o->count() > 0; }

sweep::SweepSpec build_spec(const Flags& f, const Given& g, bool repeater_mode) {
  sweep::SweepSpec spec;
  if (has(g.preset)) {
    spec = sweep::preset(f.preset);
  } else if (repeater_mode) {
    spec.param = sweep::Param::mu;
    spec.grid = {0.1, 100.0, 13, sweep::Scale::log};
  } else {
    spec.grid = {0.1, 1.0, 10, sweep::Scale::linear};
  }
  if (has(g.sweep_param)) spec.param = sweep::parse_param(f.sweep_param);
  if (has(g.gamma)) spec.gamma = f.gamma;
  if (has(g.lambda_e)) spec.lambda_e = f.lambda_e;
  if (has(g.lambda_r)) spec.lambda_r = f.lambda_r;
  if (has(g.buf_e) || has(g.buf_r)) spec.buffers.clear();
  if (has(g.buf_e)) spec.buf_e = f.buf_e;
  if (has(g.buf_r)) spec.buf_r = f.buf_r;
  if (has(g.disc_r) || has(g.disc_e)) {
    auto pair = spec.pairs.front();
    if (has(g.disc_r)) pair.first = laplace::parse_discipline(f.disc_r);
    if (has(g.disc_e)) pair.second = laplace::parse_discipline(f.disc_e);
    spec.pairs = {pair};
  }
  if (has(g.seed)) spec.seed = f.seed;
  if (has(g.events)) spec.events = f.events;
  if (has(g.grid_min)) spec.grid.min = f.grid_min;
  if (has(g.grid_max)) spec.grid.max = f.grid_max;
  if (has(g.grid_points)) spec.grid.points = f.grid_points;
  if (has(g.grid_scale)) spec.grid.scale = sweep::parse_scale(f.grid_scale);
  if (has(g.threads)) spec.threads = f.threads;
  if (repeater_mode) {
    detail::require(spec.param == sweep::Param::mu, "the repeater subcommand sweeps mu");
  } else {
    detail::require(spec.param != sweep::Param::mu, "mu sweeps belong to the repeater subcommand");
  }
  spec.validate();
  return spec;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  csv::write_file_atomic(path, content);
}

int run_compare(const sweep::SweepSpec& spec, const Flags& f) {
  sweep::CompareOptions opt;
  opt.abs_tolerance = f.abs_tol;
  opt.sigmas = f.sigmas;
  const auto rows = sweep::compare(spec, opt);
  std::string report = sweep::format_compare(rows);
  if (!f.no_errata) {
    errata::EvidenceOptions ev;
    ev.lambda_e = spec.lambda_e;
    ev.lambda_r = spec.lambda_r < spec.lambda_e ? spec.lambda_r : 0.5 * spec.lambda_e;
    ev.buffer = spec.buffers.empty() ? std::max(1, spec.buf_r) : spec.buffers.back();
    if (ev.buffer == markov::kUnboundedBuffer) ev.buffer = 10;
    ev.gamma = spec.gamma;
    ev.events = std::max<std::int64_t>(spec.events, 1000);
    ev.seed = spec.seed;
    report += "\n" + errata::format_evidence(errata::collect_evidence(ev));
  }
  emit(f.output, report);
  std::size_t failed = 0;
  for (const auto& r : rows)
    if (!r.pass) ++failed;
  if (failed > 0) {
    std::cerr << "compare: " << failed << " of " << rows.size() << " points outside tolerance\n";
    return 2;
  }
  return 0;
}

void write_first_trace(const sweep::SweepSpec& spec, const std::string& path) {
  const auto points = sweep::expand(spec);
  const auto& p = points.front();
  const auto trace = sim::run(p.config, sim::PolicySpec::from(p.pair.first, p.pair.second), spec.events, p.seed);
  std::ostringstream out;
  sim::write_trace_csv(out, trace);
  csv::write_file_atomic(path, out.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teleportation fidelity under buffer-management disciplines"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");

  Flags f;
  Given g{};
  g.preset = app.add_option("--preset", f.preset, "fig3 | fig4 | fig5 | fig6");
  g.sweep_param = app.add_option("--sweep", f.sweep_param, "swept parameter: load | mu | buffer");
  g.gamma = app.add_option("--gamma", f.gamma, "memory dephasing rate");
  g.lambda_e = app.add_option("--lambda_e,--lambda-e", f.lambda_e, "EPR generation rate");
  g.lambda_r = app.add_option("--lambda_r,--lambda-r", f.lambda_r, "request arrival rate (fixed-load sweeps)");
  g.buf_e = app.add_option("--buf_e,--buf-e", f.buf_e, "EPR buffer size");
  g.buf_r = app.add_option("--buf_r,--buf-r", f.buf_r, "request buffer size");
  g.disc_r = app.add_option("--disc_r,--disc-r", f.disc_r, "request discipline: fifo | lifo | fifo-po | lifo-po");
  g.disc_e = app.add_option("--disc_e,--disc-e", f.disc_e, "EPR discipline: fifo | lifo | fifo-po | lifo-po");
  g.seed = app.add_option("--seed", f.seed, "base seed for simulation");
  g.events = app.add_option("--events", f.events, "arrivals simulated per grid point");
  g.grid_min = app.add_option("--grid_min,--grid-min", f.grid_min, "first grid value");
  g.grid_max = app.add_option("--grid_max,--grid-max", f.grid_max, "last grid value");
  g.grid_points = app.add_option("--grid_points,--grid-points", f.grid_points, "number of grid values");
  g.grid_scale = app.add_option("--grid_scale,--grid-scale", f.grid_scale, "linear | log");
  app.add_option("--output,-o", f.output, "output file (default stdout)");
  g.threads = app.add_option("--threads", f.threads, "worker threads (default: all cores)");
  app.add_option("--abs_tol,--abs-tol", f.abs_tol, "compare: absolute tolerance floor")->capture_default_str();
  app.add_option("--sigmas", f.sigmas, "compare: tolerance in standard errors")->capture_default_str();
  app.add_flag("--no-errata", f.no_errata, "compare: skip the errata evidence section");
  app.add_option("--trace", f.trace, "simulate: also write the first point's event trace as CSV");

  auto* analyze = app.add_subcommand("analyze", "analytic mean fidelity and service probabilities");
  auto* simulate = app.add_subcommand("simulate", "simulated estimates with standard errors");
  auto* compare = app.add_subcommand("compare", "analytic vs simulated, plus errata evidence");
  auto* repeater = app.add_subcommand("repeater", "single-repeater infidelity over mu");
  for (auto* sub : {analyze, simulate, compare, repeater}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const bool repeater_mode = repeater->parsed();
    const auto spec = build_spec(f, g, repeater_mode);
    if (analyze->parsed()) {
      const auto rows = sweep::analyze(spec);
      for (const auto& r : rows)
        if (!r.error.empty()) std::cerr << "note: x=" << r.x << " " << r.label << ": " << r.error << '\n';
      emit(f.output, sweep::format_analyze(rows));
    } else if (simulate->parsed()) {
      if (!f.trace.empty()) write_first_trace(spec, f.trace);
      emit(f.output, sweep::format_simulate(sweep::simulate(spec)));
    } else if (compare->parsed()) {
      return run_compare(spec, f);
    } else {
      emit(f.output, sweep::format_repeater(sweep::repeater(spec)));
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const StabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

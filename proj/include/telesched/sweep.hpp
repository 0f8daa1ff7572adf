#pragma once

// Parameter sweeps behind the command-line tool: analytic evaluation,
// simulation, their comparison, and the repeater curve. Every function here
// validates the whole spec before computing anything.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "telesched/laplace.hpp"
#include "telesched/markov.hpp"
#include "telesched/qmath.hpp"

namespace telesched::sweep {

enum class Param { load, mu, buffer };
enum class Scale { linear, log };

Param parse_param(std::string_view name);
Scale parse_scale(std::string_view name);

struct Grid {
  double min = 0.1;
  double max = 1.0;
  int points = 10;
  Scale scale = Scale::linear;
  void validate() const;
  std::vector<double> values() const;
};

using DisciplinePair = std::pair<laplace::Discipline, laplace::Discipline>;  // (request, EPR)

/// "lifo-po/fifo-po" style label, request side first.
std::string pair_label(const DisciplinePair& p);

struct SweepSpec {
  Param param = Param::load;
  Grid grid;
  double gamma = 0.01;
  double lambda_e = 5.0;
  double lambda_r = 2.5;  // used when the load is not swept
  int buf_e = 10;
  int buf_r = 10;
  std::vector<DisciplinePair> pairs{{laplace::Discipline::lifo_po, laplace::Discipline::lifo_po}};
  /// When nonempty, every value is run as buf_e = buf_r = b and labels get "@B<b>".
  std::vector<int> buffers;
  std::uint64_t seed = 1;
  std::int64_t events = 200'000;
  int threads = 0;  // 0: hardware concurrency
  void validate() const;
};

/// fig3, fig4, fig5, fig6.
SweepSpec preset(std::string_view name);

/// One evaluation point of a sweep.
struct Point {
  double x = 0.0;
  std::string label;
  markov::DoubleQueueConfig config;
  DisciplinePair pair;
  std::uint64_t seed = 0;  // shared by every pair at the same (buffer, x)
};

std::vector<Point> expand(const SweepSpec& spec);

/// |+> request curve and matching EPR curve at rate gamma.
qmath::FidelityCurve request_curve(double gamma);
qmath::FidelityCurve epr_curve(double gamma);

struct AnalyzeRow {
  double x = 0.0;
  std::string label;
  double mean_fidelity = 0.0;
  double p_serve_r = 0.0;
  double p_serve_e = 0.0;
  std::string error;  // set when the point has no steady state
};

struct SimulateRow {
  double x = 0.0;
  std::string label;
  double mean_fidelity = 0.0;
  double p_serve_r = 0.0;
  double p_serve_e = 0.0;
  double mean_fidelity_stderr = 0.0;
  double p_serve_r_stderr = 0.0;
  double p_serve_e_stderr = 0.0;
};

struct CompareRow {
  double x = 0.0;
  std::string label;
  double analytic = 0.0;
  double simulated = 0.0;
  double std_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RepeaterRow {
  double mu = 0.0;
  int buffer = 0;
  double mean_infidelity = 0.0;
  double p_serve = 0.0;
};

/// Analytic mean fidelity of one point; replaceable for negative controls.
using AnalyticFn = std::function<double(const markov::DoubleQueueConfig&, const DisciplinePair&,
                                        const qmath::FidelityCurve& curve_r, const qmath::FidelityCurve& curve_e)>;
double default_analytic(const markov::DoubleQueueConfig& cfg, const DisciplinePair& pair,
                        const qmath::FidelityCurve& curve_r, const qmath::FidelityCurve& curve_e);

std::vector<AnalyzeRow> analyze(const SweepSpec& spec);
std::vector<SimulateRow> simulate(const SweepSpec& spec);

struct CompareOptions {
  double abs_tolerance = 0.005;
  double sigmas = 3.0;
  AnalyticFn analytic = default_analytic;
};

std::vector<CompareRow> compare(const SweepSpec& spec, const CompareOptions& opt = {});
std::vector<RepeaterRow> repeater(const SweepSpec& spec);

std::string format_analyze(const std::vector<AnalyzeRow>& rows);
std::string format_simulate(const std::vector<SimulateRow>& rows);
std::string format_compare(const std::vector<CompareRow>& rows);
std::string format_repeater(const std::vector<RepeaterRow>& rows);

/// Runs fn(i) for i in [0, n) on `threads` workers; results are index-keyed
/// so output order never depends on scheduling. Rethrows the first error.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace telesched::sweep

#ifndef OSAQ_EXPERIMENT_HPP
#define OSAQ_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osaq/metrics.hpp"
#include "osaq/model.hpp"
#include "osaq/simulator.hpp"
#include "osaq/solver.hpp"

namespace osaq {

enum class SolverChoice { Direct, Ldqbd, Both };

std::string to_string(SolverChoice choice);

/// Parses "direct" | "ldqbd" | "both"; throws config_error otherwise.
SolverChoice parse_solver_choice(const std::string& text);

/// Analytic results for one parameter point. With SolverChoice::Both the
/// metrics and residual come from the direct solve and `disagreement`
/// carries the max-norm gap between the two stationary vectors; otherwise
/// disagreement is NaN.
struct PointResult {
    ModelParams params;
    int states = 0;
    MetricsReport metrics;
    double residual = 0.0;
    double disagreement = 0.0;
    std::optional<SimEstimates> sim;
};

PointResult solve_point(const ModelParams& params, SolverChoice choice);

/// One sweep axis: one or more parameter names advancing in lockstep over a
/// shared value list (a plain axis has a single name).
struct SweepAxis {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
};

/// A parameter study: base point, cartesian axes, solver choice and
/// (optional) per-point simulation settings.
struct SweepSpec {
    ModelParams base;
    std::vector<SweepAxis> axes;
    SolverChoice solver = SolverChoice::Direct;
    bool simulate = false;
    double horizon = 10000.0;
    double warmup = -1.0; // < 0 means one tenth of the horizon
    int replications = 100;
    std::uint64_t seed = 1;
    std::string output; // empty: standard output
};

/// Resolved simulation settings for one point of the sweep.
SimConfig make_sim_config(const SweepSpec& spec, const ModelParams& params);

/// Line-based config: `key = value` assignments, `sweep name = v1, v2, ...`
/// axes, `sweep (a,b) = (x,y), ...` paired axes, `#` comments. Throws
/// config_error carrying the offending line number.
SweepSpec parse_sweep_config(std::istream& in);

/// Cartesian expansion in axis order (first axis outermost). Throws
/// config_error if the product exceeds 10^4 points, parameter_error if a
/// point is invalid.
std::vector<ModelParams> expand_sweep(const SweepSpec& spec);

/// Number formatting used in every CSV: six significant digits, lowercase
/// scientific below 1e-4.
std::string fmt_g6(double value);

void write_header(std::ostream& os, SolverChoice choice, bool with_sim);
void write_point_row(std::ostream& os, const PointResult& point, SolverChoice choice,
                     const SimConfig* sim_config);

/// Expands, solves (and simulates, if configured) every point, then writes
/// the CSV. Points may be computed on `jobs` threads; the output is
/// identical regardless.
void run_sweep(const SweepSpec& spec, std::ostream& os, int jobs = 1);

/// A named CSV produced by a bundled parameter study.
struct FigureOutput {
    std::string filename;
    SweepSpec spec;
};

/// Bundled studies: ids 2 and 3 sweep the arrival rates over several
/// (M, N) layouts with and without an orbit; id 4 sweeps the retrial rate
/// over several orbit sizes. Throws config_error for other ids.
std::vector<FigureOutput> figure_presets(int id);

} // namespace osaq

#endif

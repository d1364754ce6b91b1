#ifndef OSAQ_METRICS_HPP
#define OSAQ_METRICS_HPP

#include "osaq/model.hpp"
#include "osaq/solver.hpp"

namespace osaq {

/// Secondary-user performance metrics. The dropping probability comes in two
/// variants that are both reported everywhere: `paper` evaluates the
/// boundary-state closed form literally, `exact` accumulates the actual drop
/// event rates (blocked arrivals plus preemption overflow, weighted by the
/// number of customers lost). The two need not coincide.
struct MetricsReport {
    double p_drop_paper = 0.0;
    double p_drop_exact = 0.0;
    double throughput_paper = 0.0;
    double throughput_exact = 0.0;
    double mean_orbit = 0.0;
    double su_utilization = 0.0;
    double pu_blocking = 0.0;
};

/// Literal closed form: sum of full-system boundary probabilities plus
/// (lambda_p/lambda_s) times the full-orbit preemption-state sum; states
/// with negative SU occupancy count as zero.
double dropping_probability_paper(const StationaryDistribution& pi, const StateSpace& space);

/// Exact rate balance: (blocked-arrival rate + expected SUs dropped per unit
/// time by preemption overflow) / lambda_s.
double dropping_probability_exact(const StationaryDistribution& pi, const StateSpace& space);

/// lambda_s * (1 - p_drop).
double throughput(double p_drop, const ModelParams& params);

/// Fills every field of the report from one stationary distribution.
MetricsReport compute_metrics(const StationaryDistribution& pi, const StateSpace& space);

} // namespace osaq

#endif

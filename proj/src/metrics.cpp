#include "osaq/metrics.hpp"

#include <algorithm>

#include "osaq/errors.hpp"

namespace osaq {

namespace {

void require_arrivals(const StateSpace& space) {
    if (!(space.params().lambda_s > 0.0))
        throw parameter_error("lambda_s: dropping probability undefined without SU arrivals");
}

double prob_at(const StationaryDistribution& pi, const StateSpace& space, int i, int j, int k) {
    if (j < 0)
        return 0.0; // nonexistent boundary state in the literal formula
    return pi.probabilities[space.index_of({i, j, k}) - 1];
}

} // namespace

double dropping_probability_paper(const StationaryDistribution& pi, const StateSpace& space) {
    require_arrivals(space);
    const ModelParams& p = space.params();
    double blocked = 0.0;
    double preempt_states = 0.0;
    for (int i = 0; i <= p.M; ++i) {
        const int full_j = (p.M - i) * p.N;
        blocked += prob_at(pi, space, i, full_j, p.L);
        for (int l = 1; l <= p.N; ++l)
            preempt_states += prob_at(pi, space, i, full_j - l, p.L);
    }
    return blocked + (p.lambda_p / p.lambda_s) * preempt_states;
}

double dropping_probability_exact(const StationaryDistribution& pi, const StateSpace& space) {
    require_arrivals(space);
    const ModelParams& p = space.params();

    double blocked_rate = 0.0; // SU arrivals finding sub-bands and orbit full
    double overflow_rate = 0.0; // SUs squeezed out of a full orbit by preemption
    for (int m = 0; m < space.size(); ++m) {
        const SystemState& s = space.states()[m];
        const double prob = pi.probabilities[m];
        if (s.j == (p.M - s.i) * p.N && s.k == p.L)
            blocked_rate += p.lambda_s * prob;
        if (s.i < p.M) {
            const int excess = s.j - (p.M - s.i - 1) * p.N;
            if (excess > 0) {
                const int dropped = std::max(0, excess + s.k - p.L);
                if (dropped > 0)
                    overflow_rate += p.lambda_p * dropped * prob;
            }
        }
    }
    return (blocked_rate + overflow_rate) / p.lambda_s;
}

double throughput(double p_drop, const ModelParams& params) {
    return params.lambda_s * (1.0 - p_drop);
}

MetricsReport compute_metrics(const StationaryDistribution& pi, const StateSpace& space) {
    const ModelParams& p = space.params();
    MetricsReport r;
    r.p_drop_paper = dropping_probability_paper(pi, space);
    r.p_drop_exact = dropping_probability_exact(pi, space);
    r.throughput_paper = throughput(r.p_drop_paper, p);
    r.throughput_exact = throughput(r.p_drop_exact, p);

    double mean_orbit = 0.0, mean_busy = 0.0, blocking = 0.0;
    for (int m = 0; m < space.size(); ++m) {
        const SystemState& s = space.states()[m];
        const double prob = pi.probabilities[m];
        mean_orbit += s.k * prob;
        mean_busy += s.j * prob;
        if (s.i == p.M)
            blocking += prob;
    }
    r.mean_orbit = mean_orbit;
    r.su_utilization = mean_busy / (static_cast<double>(p.M) * p.N);
    r.pu_blocking = blocking;
    return r;
}

} // namespace osaq

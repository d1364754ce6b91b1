#ifndef OSAQ_SIMULATOR_HPP
#define OSAQ_SIMULATOR_HPP

#include <cstdint>
#include <map>

#include "osaq/model.hpp"

namespace osaq {

/// Discrete-event run setup. Statistics are collected on [warmup, horizon];
/// the replication RNG stream is a pure function of (seed, rep_index).
struct SimConfig {
    ModelParams params;
    double horizon = 10000.0;
    double warmup = 1000.0;
    int replications = 100;
    std::uint64_t seed = 1;
    /// When set, tallies carry the time spent in each (i, j, k) state
    /// (post-warmup), for distribution-level comparisons.
    bool collect_occupancy = false;
};

/// Throws parameter_error unless horizon > 0, 0 <= warmup < horizon and
/// replications >= 1 (params are checked too).
void validate(const SimConfig& config);

struct ReplicationTallies {
    // Whole-run counters, from time zero.
    long long su_arrivals_total = 0;
    long long su_drops_total = 0;
    long long su_completions_total = 0;
    int su_in_service_at_end = 0;
    int su_in_orbit_at_end = 0;

    // Post-warmup counters.
    long long su_arrivals = 0;
    long long su_blocked_drops = 0;  // arrival with sub-bands and orbit full
    long long su_overflow_drops = 0; // preempted into a full orbit
    long long su_completions = 0;
    long long pu_arrivals = 0;
    long long pu_blocked = 0;
    long long retrial_successes = 0;

    // Post-warmup time integrals.
    double busy_sub_band_time = 0.0; // integral of j dt
    double orbit_time = 0.0;         // integral of k dt
    double pu_band_time = 0.0;       // integral of i dt

    std::map<SystemState, double> occupancy; // only if collect_occupancy

    double window = 0.0; // horizon - warmup

    double p_drop() const;       // (blocked + overflow) / arrivals; NaN if no arrivals
    double throughput() const;   // completions per unit time
    double mean_orbit() const;
    double pu_blocking() const;  // blocked fraction of PU arrivals; NaN if none
};

/// One independent replication. Deterministic: identical (config, rep_index)
/// give identical tallies. SUs to preempt are picked most-recent-first;
/// with exponential service times the choice does not affect any measured
/// statistic.
ReplicationTallies run_replication(const SimConfig& config, int rep_index);

/// Replication means with 95% normal-approximation confidence half-widths.
/// With a single replication the half-widths are NaN and ci_defined is
/// false.
struct SimEstimates {
    double p_drop_hat = 0.0;
    double p_drop_ci = 0.0;
    double throughput_hat = 0.0;
    double throughput_ci = 0.0;
    double mean_orbit_hat = 0.0;
    double mean_orbit_ci = 0.0;
    double pu_blocking_hat = 0.0;
    double pu_blocking_ci = 0.0;
    int replications = 0;
    bool ci_defined = false;
};

/// Runs all replications (optionally on `jobs` threads; 0 picks the
/// hardware count) and aggregates keyed by rep_index, so the result does
/// not depend on the degree of concurrency.
SimEstimates run_simulation(const SimConfig& config, int jobs = 1);

} // namespace osaq

#endif

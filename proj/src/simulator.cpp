#include "osaq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>
#include <vector>

#include "osaq/errors.hpp"
#include "parallel.hpp"

namespace osaq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Inverse-CDF exponential draw from explicit 53-bit uniforms, so streams are
// identical across standard libraries.
class RateClock {
public:
    explicit RateClock(std::uint64_t stream_seed) : rng_(stream_seed) {}

    double exp_after(double rate) {
        const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        return -std::log1p(-u) / rate;
    }

private:
    std::mt19937_64 rng_;
};

enum class EventKind : std::uint8_t { SuArrival, PuArrival, SuDeparture, PuDeparture, Retrial };

struct Event {
    double time;
    std::uint64_t seq; // tie-break, keeps event order total and deterministic
    EventKind kind;
    std::uint32_t token; // SU-service identity; unused otherwise
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
};

} // namespace

void validate(const SimConfig& config) {
    validate(config.params);
    if (!(std::isfinite(config.horizon) && config.horizon > 0.0))
        throw parameter_error("horizon: must be finite and > 0");
    if (!(std::isfinite(config.warmup) && config.warmup >= 0.0 && config.warmup < config.horizon))
        throw parameter_error("warmup: must satisfy 0 <= warmup < horizon");
    if (config.replications < 1)
        throw parameter_error("replications: must be >= 1");
}

double ReplicationTallies::p_drop() const {
    if (su_arrivals == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(su_blocked_drops + su_overflow_drops) /
           static_cast<double>(su_arrivals);
}

double ReplicationTallies::throughput() const {
    return static_cast<double>(su_completions) / window;
}

double ReplicationTallies::mean_orbit() const {
    return orbit_time / window;
}

double ReplicationTallies::pu_blocking() const {
    if (pu_arrivals == 0)
        return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(pu_blocked) / static_cast<double>(pu_arrivals);
}

ReplicationTallies run_replication(const SimConfig& config, int rep_index) {
    validate(config);
    const ModelParams& p = config.params;
    RateClock clock(splitmix64(splitmix64(config.seed) + static_cast<std::uint64_t>(rep_index)));

    std::priority_queue<Event, std::vector<Event>, EventAfter> calendar;
    std::uint64_t seq = 0;
    auto schedule = [&](double at, EventKind kind, std::uint32_t token = 0) {
        calendar.push({at, seq++, kind, token});
    };

    int pu_in_service = 0;
    int orbit = 0;
    std::vector<std::uint32_t> su_in_service; // token per SU holding a sub-band
    std::vector<char> token_alive;
    auto new_service_token = [&] {
        token_alive.push_back(1);
        return static_cast<std::uint32_t>(token_alive.size() - 1);
    };

    ReplicationTallies t;
    t.window = config.horizon - config.warmup;

    double now = 0.0;
    double last_change = 0.0;
    auto integrate_to = [&](double up_to) {
        const double a = std::max(last_change, config.warmup);
        const double b = std::min(up_to, config.horizon);
        if (b > a) {
            const double dt = b - a;
            const int j = static_cast<int>(su_in_service.size());
            t.busy_sub_band_time += j * dt;
            t.orbit_time += orbit * dt;
            t.pu_band_time += pu_in_service * dt;
            if (config.collect_occupancy)
                t.occupancy[{pu_in_service, j, orbit}] += dt;
        }
        last_change = up_to;
    };

    auto admit_su = [&] {
        const std::uint32_t token = new_service_token();
        su_in_service.push_back(token);
        schedule(now + clock.exp_after(p.mu_s), EventKind::SuDeparture, token);
    };

    schedule(clock.exp_after(p.lambda_s), EventKind::SuArrival);
    schedule(clock.exp_after(p.lambda_p), EventKind::PuArrival);

    while (!calendar.empty()) {
        const Event ev = calendar.top();
        calendar.pop();
        if (ev.time >= config.horizon)
            break;
        if (ev.kind == EventKind::SuDeparture && !token_alive[ev.token])
            continue; // cancelled by a preemption
        integrate_to(ev.time);
        now = ev.time;
        const bool counting = now >= config.warmup;

        switch (ev.kind) {
        case EventKind::SuArrival: {
            schedule(now + clock.exp_after(p.lambda_s), EventKind::SuArrival);
            t.su_arrivals_total += 1;
            if (counting)
                t.su_arrivals += 1;
            const int free_sub_bands =
                (p.M - pu_in_service) * p.N - static_cast<int>(su_in_service.size());
            if (free_sub_bands > 0) {
                admit_su();
            } else if (orbit < p.L) {
                orbit += 1;
                if (p.theta > 0.0)
                    schedule(now + clock.exp_after(p.theta), EventKind::Retrial);
            } else {
                t.su_drops_total += 1;
                if (counting)
                    t.su_blocked_drops += 1;
            }
            break;
        }
        case EventKind::PuArrival: {
            schedule(now + clock.exp_after(p.lambda_p), EventKind::PuArrival);
            if (counting)
                t.pu_arrivals += 1;
            if (pu_in_service == p.M) {
                t.pu_blocked += counting ? 1 : 0;
                break;
            }
            const int capacity_after = (p.M - pu_in_service - 1) * p.N;
            int excess = static_cast<int>(su_in_service.size()) - capacity_after;
            // Evict the most recently admitted SUs first.
            while (excess > 0) {
                const std::uint32_t token = su_in_service.back();
                su_in_service.pop_back();
                token_alive[token] = 0;
                if (orbit < p.L) {
                    orbit += 1;
                    if (p.theta > 0.0)
                        schedule(now + clock.exp_after(p.theta), EventKind::Retrial);
                } else {
                    t.su_drops_total += 1;
                    if (counting)
                        t.su_overflow_drops += 1;
                }
                --excess;
            }
            pu_in_service += 1;
            schedule(now + clock.exp_after(p.mu_p), EventKind::PuDeparture);
            break;
        }
        case EventKind::SuDeparture: {
            auto it = std::find(su_in_service.begin(), su_in_service.end(), ev.token);
            su_in_service.erase(it);
            t.su_completions_total += 1;
            if (counting)
                t.su_completions += 1;
            break;
        }
        case EventKind::PuDeparture: {
            pu_in_service -= 1;
            break;
        }
        case EventKind::Retrial: {
            const int free_sub_bands =
                (p.M - pu_in_service) * p.N - static_cast<int>(su_in_service.size());
            if (free_sub_bands > 0) {
                orbit -= 1;
                admit_su();
                if (counting)
                    t.retrial_successes += 1;
            } else {
                // Failed attempt; the customer keeps retrying.
                schedule(now + clock.exp_after(p.theta), EventKind::Retrial);
            }
            break;
        }
        }
    }
    integrate_to(config.horizon);
    t.su_in_service_at_end = static_cast<int>(su_in_service.size());
    t.su_in_orbit_at_end = orbit;
    return t;
}

namespace {

struct Series {
    double mean = 0.0;
    double half_width = 0.0;
};

Series summarize(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    Series s;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    s.mean = sum / n;
    if (n < 2) {
        s.half_width = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    double ss = 0.0;
    for (double v : values)
        ss += (v - s.mean) * (v - s.mean);
    const double sd = std::sqrt(ss / (n - 1));
    s.half_width = 1.96 * sd / std::sqrt(static_cast<double>(n));
    return s;
}

} // namespace

SimEstimates run_simulation(const SimConfig& config, int jobs) {
    validate(config);
    const int reps = config.replications;
    std::vector<ReplicationTallies> tallies(reps);
    detail::parallel_for(reps, jobs,
                         [&](int rep) { tallies[rep] = run_replication(config, rep); });

    std::vector<double> p_drop(reps), tput(reps), orbit(reps), blocking(reps);
    for (int rep = 0; rep < reps; ++rep) {
        p_drop[rep] = tallies[rep].p_drop();
        tput[rep] = tallies[rep].throughput();
        orbit[rep] = tallies[rep].mean_orbit();
        blocking[rep] = tallies[rep].pu_blocking();
    }

    SimEstimates est;
    est.replications = reps;
    est.ci_defined = reps >= 2;
    const Series sp = summarize(p_drop), st = summarize(tput), so = summarize(orbit),
                 sb = summarize(blocking);
    est.p_drop_hat = sp.mean;
    est.p_drop_ci = sp.half_width;
    est.throughput_hat = st.mean;
    est.throughput_ci = st.half_width;
    est.mean_orbit_hat = so.mean;
    est.mean_orbit_ci = so.half_width;
    est.pu_blocking_hat = sb.mean;
    est.pu_blocking_ci = sb.half_width;
    return est;
}

} // namespace osaq

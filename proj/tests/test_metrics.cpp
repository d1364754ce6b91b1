#include <doctest.h>

#include <cmath>

#include "osaq/generator.hpp"
#include "osaq/metrics.hpp"
#include "osaq/model.hpp"
#include "osaq/solver.hpp"

#include "oracles.hpp"

using namespace osaq;

namespace {

ModelParams make_params(int M, int N, int L) {
    ModelParams p;
    p.M = M;
    p.N = N;
    p.L = L;
    return p;
}

oracle::Scenario mirror(const ModelParams& p) {
    return {p.M, p.N, p.L, p.lambda_p, p.lambda_s, p.mu_p, p.mu_s, p.theta};
}

MetricsReport metrics_for(const ModelParams& p) {
    const StateSpace space = build_state_space(p);
    return compute_metrics(solve_direct(assemble_generator(space)), space);
}

} // namespace

TEST_CASE("hand-solved three-state metrics") {
    const ModelParams p = make_params(1, 1, 0);
    const MetricsReport m = metrics_for(p);

    // pi = (1/6, 1/2, 1/3); the two dropping variants genuinely differ.
    CHECK(std::abs(m.p_drop_paper - 76.0 / 90.0) <= 1e-12);
    CHECK(std::abs(m.p_drop_exact - 13.0 / 15.0) <= 1e-12);
    CHECK(m.p_drop_paper != m.p_drop_exact);
    CHECK(std::abs(m.throughput_exact - 0.2) <= 1e-12);
    CHECK(m.mean_orbit == 0.0);
    CHECK(std::abs(m.su_utilization - 0.5) <= 1e-12);
    CHECK(std::abs(m.pu_blocking - 1.0 / 3.0) <= 1e-12);
}

TEST_CASE("throughput identity is exact by construction") {
    CHECK(throughput(1.0, make_params(1, 1, 0)) == 0.0);
    const ModelParams p = make_params(3, 2, 5);
    CHECK(throughput(0.0, p) == p.lambda_s);

    const MetricsReport m = metrics_for(p);
    CHECK(m.throughput_paper == p.lambda_s * (1.0 - m.p_drop_paper));
    CHECK(m.throughput_exact == p.lambda_s * (1.0 - m.p_drop_exact));
}

TEST_CASE("all probability metrics stay within [0, 1]") {
    for (const auto& p : {make_params(1, 1, 0), make_params(2, 2, 2), make_params(3, 3, 10)}) {
        const MetricsReport m = metrics_for(p);
        for (double v : {m.p_drop_paper, m.p_drop_exact, m.su_utilization, m.pu_blocking}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(m.mean_orbit >= 0.0);
        CHECK(m.mean_orbit <= p.L);
    }
}

TEST_CASE("exact dropping probability matches the independent oracle") {
    ModelParams skew = make_params(2, 2, 3);
    skew.lambda_p = 0.4;
    skew.lambda_s = 2.0;
    skew.mu_p = 0.3;
    skew.mu_s = 0.6;
    skew.theta = 1.2;

    for (const auto& p : {make_params(2, 2, 2), skew}) {
        const MetricsReport m = metrics_for(p);
        CHECK(std::abs(m.p_drop_exact - oracle::drop_probability(mirror(p))) <= 1e-10);
    }
}

TEST_CASE("mean orbit occupancy matches the independent oracle") {
    const ModelParams p = make_params(3, 2, 4);
    const MetricsReport m = metrics_for(p);
    double expected = 0.0;
    for (const auto& [key, prob] : oracle::stationary(mirror(p)))
        expected += std::get<2>(key) * prob;
    CHECK(std::abs(m.mean_orbit - expected) <= 1e-10);
}

TEST_CASE("PU blocking equals the Erlang loss probability") {
    for (const auto& p : {make_params(2, 2, 2), make_params(3, 2, 10)}) {
        const MetricsReport m = metrics_for(p);
        const double erlang_b = oracle::erlang_loss(p.M, p.lambda_p / p.mu_p).back();
        CHECK(std::abs(m.pu_blocking - erlang_b) <= 1e-10);
    }
}

TEST_CASE("vanishing PU arrivals collapse the two dropping variants") {
    // The preemption terms of both variants carry a lambda_p factor; in the
    // lambda_p -> 0 limit each reduces to the same blocked-arrival sum.
    ModelParams p = make_params(2, 2, 2);
    p.lambda_p = 1e-12;
    const MetricsReport m = metrics_for(p);
    CHECK(std::abs(m.p_drop_paper - m.p_drop_exact) < 1e-9);
}

TEST_CASE("both dropping variants are reported on a larger chain") {
    const MetricsReport m = metrics_for(make_params(3, 2, 10));
    CHECK(m.p_drop_paper > 0.0);
    CHECK(m.p_drop_exact > 0.0);
    CHECK(m.p_drop_paper < 1.0);
    CHECK(m.p_drop_exact < 1.0);
}

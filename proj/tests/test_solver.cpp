#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "osaq/errors.hpp"
#include "osaq/generator.hpp"
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

StationaryDistribution direct_for(const ModelParams& p) {
    return solve_direct(assemble_generator(build_state_space(p)));
}

StationaryDistribution ldqbd_for(const ModelParams& p, LdqbdDetail* detail = nullptr) {
    const StateSpace space = build_state_space(p);
    return solve_ldqbd(extract_blocks(assemble_generator(space), space), detail);
}

} // namespace

TEST_CASE("hand-solved three-state chain, both methods") {
    const ModelParams p = make_params(1, 1, 0);
    const std::vector<double> expected{1.0 / 6.0, 1.0 / 2.0, 1.0 / 3.0};

    for (const auto& pi : {direct_for(p), ldqbd_for(p)}) {
        REQUIRE(pi.probabilities.size() == 3);
        for (int m = 0; m < 3; ++m)
            CHECK(std::abs(pi.probabilities[m] - expected[m]) <= 1e-12);
        CHECK(pi.residual <= 1e-12);
    }
}

TEST_CASE("symmetric two-state chain") {
    const RateMatrix q(2, {{0, 1, 0.7}, {1, 0, 0.7}});
    const StationaryDistribution pi = solve_direct(q);
    CHECK(std::abs(pi.probabilities[0] - 0.5) <= 1e-15);
    CHECK(std::abs(pi.probabilities[1] - 0.5) <= 1e-15);
}

TEST_CASE("stationary vector invariants") {
    for (const auto& p : {make_params(2, 2, 10), make_params(3, 2, 5)}) {
        for (const auto& pi : {direct_for(p), ldqbd_for(p)}) {
            double total = 0.0;
            for (double v : pi.probabilities) {
                CHECK(v >= 0.0);
                total += v;
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
            CHECK(pi.residual <= (pi.method == SolveMethod::Direct ? 1e-12 : 1e-10));
        }
    }
}

TEST_CASE("the two methods agree in max norm") {
    for (const auto& p : {make_params(1, 1, 0), make_params(2, 2, 2), make_params(3, 3, 10)}) {
        const StationaryDistribution a = direct_for(p);
        const StationaryDistribution b = ldqbd_for(p);
        double gap = 0.0;
        for (std::size_t m = 0; m < a.probabilities.size(); ++m)
            gap = std::max(gap, std::abs(a.probabilities[m] - b.probabilities[m]));
        CHECK(gap < 1e-10);
    }
}

TEST_CASE("direct solve matches an independent dense solve") {
    ModelParams skew = make_params(3, 2, 4);
    skew.lambda_p = 0.3;
    skew.lambda_s = 2.2;
    skew.mu_p = 0.7;
    skew.mu_s = 0.9;
    skew.theta = 0.8;

    for (const auto& p : {make_params(2, 2, 2), skew}) {
        const StateSpace space = build_state_space(p);
        const StationaryDistribution pi = solve_direct(assemble_generator(space));
        const auto reference = oracle::stationary(mirror(p));
        for (const auto& [key, value] : reference) {
            const auto [i, j, k] = key;
            const int m = space.index_of({i, j, k}) - 1;
            CHECK(std::abs(pi.probabilities[m] - value) <= 1e-10);
        }
    }
}

TEST_CASE("PU-level marginal is the Erlang loss distribution") {
    const ModelParams p = make_params(3, 2, 5);
    const StateSpace space = build_state_space(p);
    const StationaryDistribution pi = solve_direct(assemble_generator(space));
    const std::vector<double> erlang = oracle::erlang_loss(p.M, p.lambda_p / p.mu_p);

    std::vector<double> marginal(p.M + 1, 0.0);
    for (int m = 0; m < space.size(); ++m)
        marginal[space.states()[m].i] += pi.probabilities[m];
    for (int i = 0; i <= p.M; ++i)
        CHECK(std::abs(marginal[i] - erlang[i]) <= 1e-10);
}

TEST_CASE("rate matrices of the level recursion are nonnegative") {
    for (const auto& p : {make_params(2, 2, 2), make_params(3, 3, 10)}) {
        LdqbdDetail detail;
        ldqbd_for(p, &detail);
        REQUIRE(detail.R.size() == static_cast<std::size_t>(p.M) + 1);
        for (int i = 1; i <= p.M; ++i)
            CHECK(detail.R[i].minCoeff() >= -1e-12);
    }
}

TEST_CASE("theta = 0 leaves the orbit-free slice transient") {
    // With no retrials the orbit never drains; the recurrent class is the
    // k = L slice, which replicates the three-state chain one for one.
    ModelParams p = make_params(1, 1, 1);
    p.theta = 0.0;
    const StateSpace space = build_state_space(p);
    const StationaryDistribution pi = solve_direct(assemble_generator(space));

    CHECK(pi.probabilities[space.index_of({0, 0, 0}) - 1] == 0.0);
    CHECK(pi.probabilities[space.index_of({0, 1, 0}) - 1] == 0.0);
    CHECK(pi.probabilities[space.index_of({1, 0, 0}) - 1] == 0.0);
    CHECK(std::abs(pi.probabilities[space.index_of({0, 0, 1}) - 1] - 1.0 / 6.0) <= 1e-12);
    CHECK(std::abs(pi.probabilities[space.index_of({0, 1, 1}) - 1] - 1.0 / 2.0) <= 1e-12);
    CHECK(std::abs(pi.probabilities[space.index_of({1, 0, 1}) - 1] - 1.0 / 3.0) <= 1e-12);
    CHECK(pi.residual <= 1e-12);
}

TEST_CASE("multiple recurrent classes are refused with two witnesses") {
    // Two disconnected two-state loops.
    const RateMatrix q(4, {{0, 1, 1.0}, {1, 0, 1.0}, {2, 3, 1.0}, {3, 2, 1.0}});
    try {
        solve_direct(q);
        FAIL("expected solver_error");
    } catch (const solver_error& e) {
        CHECK(std::string(e.what()).find("mutually unreachable") != std::string::npos);
    }
}

TEST_CASE("direct solver refuses oversized systems") {
    const RateMatrix q = RateMatrix::from_parts(10000, {}, std::vector<double>(10000, 0.0));
    try {
        solve_direct(q);
        FAIL("expected solver_error");
    } catch (const solver_error& e) {
        CHECK(std::string(e.what()).find("10000") != std::string::npos);
    }
}

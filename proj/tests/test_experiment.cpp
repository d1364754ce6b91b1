#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "osaq/errors.hpp"
#include "osaq/experiment.hpp"

using namespace osaq;

namespace {

SweepSpec parse(const std::string& text) {
    std::istringstream in(text);
    return parse_sweep_config(in);
}

int error_line(const std::string& text) {
    try {
        parse(text);
    } catch (const config_error& e) {
        return e.line();
    }
    return -1;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ','))
        fields.push_back(field);
    return fields;
}

ModelParams hand_params() {
    ModelParams p;
    p.M = 1;
    p.N = 1;
    p.L = 0;
    return p;
}

} // namespace

TEST_CASE("config with a paired axis expands to the full grid in axis order") {
    const SweepSpec spec = parse("# three layouts under growing PU load\n"
                                 "L = 10\n"
                                 "theta = 2\n"
                                 "sweep (M,N) = (2,2), (3,2), (3,3)\n"
                                 "sweep lambda_p = 0.1, 0.2, 0.3, 0.4, 0.5\n"
                                 "solver = direct\n");
    REQUIRE(spec.axes.size() == 2);
    CHECK(spec.axes[0].names == std::vector<std::string>{"M", "N"});
    CHECK(spec.solver == SolverChoice::Direct);

    const std::vector<ModelParams> points = expand_sweep(spec);
    REQUIRE(points.size() == 15);
    CHECK(points[0].M == 2);
    CHECK(points[0].N == 2);
    CHECK(points[0].lambda_p == 0.1);
    CHECK(points[4].M == 2);
    CHECK(points[4].lambda_p == 0.5);
    CHECK(points[5].M == 3);
    CHECK(points[5].N == 2);
    CHECK(points[5].lambda_p == 0.1);
    CHECK(points[14].M == 3);
    CHECK(points[14].N == 3);
    CHECK(points[14].lambda_p == 0.5);
    for (const auto& p : points) {
        CHECK(p.L == 10);
        CHECK(p.theta == 2.0);
    }
}

TEST_CASE("simulation keys and output path are recognized") {
    const SweepSpec spec = parse("simulate = true\n"
                                 "horizon = 5000\n"
                                 "warmup = 250\n"
                                 "reps = 40\n"
                                 "seed = 9\n"
                                 "output = out.csv\n");
    CHECK(spec.simulate);
    CHECK(spec.horizon == 5000.0);
    CHECK(spec.warmup == 250.0);
    CHECK(spec.replications == 40);
    CHECK(spec.seed == 9);
    CHECK(spec.output == "out.csv");
}

TEST_CASE("malformed configs are rejected with the offending line") {
    CHECK(error_line("M = 2\nbogus = 3\n") == 2);
    CHECK(error_line("M = x\n") == 1);
    CHECK(error_line("\n\nM = 2.5\n") == 3);
    CHECK(error_line("sweep horizon = 1, 2\n") == 1);
    CHECK(error_line("sweep (M,N) = (2,2), (3)\n") == 1);
    CHECK(error_line("sweep M = 1, 2\nsweep M = 3\n") == 2);
    CHECK(error_line("just words\n") == 1);
    CHECK(error_line("solver = fastest\n") == 1);
    CHECK(error_line("simulate = yes\n") == 1);
    CHECK(error_line("seed = -1\n") == 1);
    CHECK(error_line("M = 2\nsweep theta =\n") == 2);
}

TEST_CASE("no axes means a single point at the base") {
    const SweepSpec spec = parse("M = 2\nN = 2\nL = 1\n");
    const std::vector<ModelParams> points = expand_sweep(spec);
    REQUIRE(points.size() == 1);
    CHECK(points[0].M == 2);
    CHECK(points[0].L == 1);
}

TEST_CASE("oversized products are refused") {
    SweepSpec spec;
    SweepAxis a, b;
    a.names = {"lambda_s"};
    b.names = {"theta"};
    for (int v = 1; v <= 101; ++v)
        a.values.push_back({0.01 * v});
    for (int v = 1; v <= 100; ++v)
        b.values.push_back({0.1 * v});
    spec.axes = {a, b};
    CHECK_THROWS_AS(expand_sweep(spec), config_error);
}

TEST_CASE("invalid points surface as parameter errors") {
    SweepSpec spec;
    SweepAxis a;
    a.names = {"lambda_p"};
    a.values = {{0.1}, {0.0}};
    spec.axes = {a};
    CHECK_THROWS_AS(expand_sweep(spec), parameter_error);
}

TEST_CASE("six-significant-digit formatting") {
    CHECK(fmt_g6(0.0) == "0");
    CHECK(fmt_g6(0.2) == "0.2");
    CHECK(fmt_g6(13.0 / 15.0) == "0.866667");
    CHECK(fmt_g6(76.0 / 90.0) == "0.844444");
    CHECK(fmt_g6(0.0001) == "0.0001");
    CHECK(fmt_g6(0.00005) == "5e-05");
    CHECK(fmt_g6(1234567.0) == "1.23457e+06");
    CHECK(fmt_g6(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("solver choice names round-trip") {
    for (auto c : {SolverChoice::Direct, SolverChoice::Ldqbd, SolverChoice::Both})
        CHECK(parse_solver_choice(to_string(c)) == c);
    CHECK_THROWS_AS(parse_solver_choice("fastest"), config_error);
}

TEST_CASE("solve_point carries disagreement only for the dual solve") {
    ModelParams p;
    p.M = 2;
    p.N = 2;
    p.L = 2;
    const PointResult both = solve_point(p, SolverChoice::Both);
    CHECK(both.states == 27);
    CHECK(both.disagreement >= 0.0);
    CHECK(both.disagreement < 1e-10);
    CHECK(std::isnan(solve_point(p, SolverChoice::Direct).disagreement));
}

TEST_CASE("sim config inherits a tenth of the horizon as default warmup") {
    SweepSpec spec;
    spec.horizon = 2000.0;
    CHECK(make_sim_config(spec, ModelParams{}).warmup == 200.0);
    spec.warmup = 50.0;
    CHECK(make_sim_config(spec, ModelParams{}).warmup == 50.0);
}

TEST_CASE("single-point sweep emits the hand-solved row") {
    SweepSpec spec;
    spec.base = hand_params();
    std::ostringstream out;
    run_sweep(spec, out);

    std::istringstream lines(out.str());
    std::string header, row, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK_FALSE(std::getline(lines, extra));

    CHECK(header ==
          "M,N,L,lambda_p,lambda_s,mu_p,mu_s,theta,states,p_drop_paper,p_drop_exact,"
          "throughput_paper,throughput_exact,mean_orbit,su_utilization,pu_blocking,solver,"
          "residual");
    const std::string prefix = "1,1,0,0.1,1.5,0.2,0.4,2,3,0.844444,0.866667,0.233333,0.2,0,"
                               "0.5,0.333333,direct,";
    REQUIRE(row.size() > prefix.size());
    CHECK(row.substr(0, prefix.size()) == prefix);
    CHECK(std::stod(row.substr(prefix.size())) <= 1e-12);
}

TEST_CASE("sweep output is byte-stable and independent of the worker count") {
    SweepSpec spec;
    spec.solver = SolverChoice::Both;
    SweepAxis theta, orbit;
    theta.names = {"theta"};
    theta.values = {{0.5}, {2.0}};
    orbit.names = {"L"};
    orbit.values = {{0.0}, {5.0}};
    spec.axes = {theta, orbit};

    std::ostringstream first, second, threaded;
    run_sweep(spec, first, 1);
    run_sweep(spec, second, 1);
    run_sweep(spec, threaded, 4);
    CHECK(first.str() == second.str());
    CHECK(first.str() == threaded.str());

    std::istringstream lines(first.str());
    std::string line;
    int rows = 0;
    REQUIRE(std::getline(lines, line));
    CHECK(split_csv(line).back() == "solver_disagreement");
    while (std::getline(lines, line)) {
        ++rows;
        const auto fields = split_csv(line);
        REQUIRE(fields.size() == 19);
        CHECK(std::stod(fields.back()) < 1e-10);
    }
    CHECK(rows == 4);
}

TEST_CASE("simulated sweeps append the estimate columns deterministically") {
    SweepSpec spec;
    spec.base = hand_params();
    spec.simulate = true;
    spec.horizon = 300.0;
    spec.replications = 5;
    spec.seed = 3;

    std::ostringstream first, second;
    run_sweep(spec, first, 1);
    run_sweep(spec, second, 2);
    CHECK(first.str() == second.str());

    std::istringstream lines(first.str());
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    const auto names = split_csv(header);
    const auto fields = split_csv(row);
    REQUIRE(names.size() == 28);
    REQUIRE(fields.size() == 28);
    CHECK(names[18] == "horizon");
    CHECK(fields[18] == "300");
    CHECK(names[19] == "warmup");
    CHECK(fields[19] == "30"); // defaulted to a tenth of the horizon
    CHECK(names[20] == "reps");
    CHECK(fields[20] == "5");
    CHECK(names[21] == "seed");
    CHECK(fields[21] == "3");
    CHECK(names.back() == "pu_blocking_hat");
    CHECK(std::stod(fields[22]) >= 0.0); // p_drop_hat parses
}

TEST_CASE("figure presets cover the bundled studies") {
    for (int id : {2, 3}) {
        const auto outputs = figure_presets(id);
        REQUIRE(outputs.size() == 2);
        const std::string tag = "fig" + std::to_string(id);
        CHECK(outputs[0].filename == tag + "_vs_lambda_p.csv");
        CHECK(outputs[1].filename == tag + "_vs_lambda_s.csv");
        CHECK(expand_sweep(outputs[0].spec).size() == 30);
        CHECK(expand_sweep(outputs[1].spec).size() == 36);
    }
    const auto retrial = figure_presets(4);
    REQUIRE(retrial.size() == 1);
    CHECK(retrial[0].filename == "fig4_vs_theta.csv");
    CHECK(retrial[0].spec.base.M == 3);
    CHECK(retrial[0].spec.base.N == 2);
    CHECK(expand_sweep(retrial[0].spec).size() == 21);

    CHECK_THROWS_AS(figure_presets(9), config_error);
    CHECK_THROWS_AS(figure_presets(0), config_error);
}

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "osaq/errors.hpp"
#include "osaq/experiment.hpp"
#include "osaq/generator.hpp"
#include "osaq/metrics.hpp"
#include "osaq/model.hpp"
#include "osaq/simulator.hpp"
#include "osaq/solver.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void add_param_options(CLI::App* cmd, osaq::ModelParams& p) {
    cmd->add_option("--M", p.M, "licensed bands")->required();
    cmd->add_option("--N", p.N, "sub-bands per band")->required();
    cmd->add_option("--L", p.L, "retrial orbit capacity")->required();
    cmd->add_option("--lambda-p", p.lambda_p, "PU arrival rate")->required();
    cmd->add_option("--lambda-s", p.lambda_s, "SU arrival rate")->required();
    cmd->add_option("--mu-p", p.mu_p, "PU service rate")->required();
    cmd->add_option("--mu-s", p.mu_s, "SU service rate")->required();
    cmd->add_option("--theta", p.theta, "per-customer retrial rate")->required();
}

int do_solve(const osaq::ModelParams& params, const std::string& solver_name,
             const std::string& dump_path) {
    const osaq::SolverChoice choice = osaq::parse_solver_choice(solver_name);
    if (!dump_path.empty()) {
        const osaq::StateSpace space = osaq::build_state_space(params);
        std::ofstream dump(dump_path);
        if (!dump)
            return std::cerr << "error: cannot write " << dump_path << "\n", kExitFailure;
        osaq::dump_generator(osaq::assemble_generator(space), dump);
    }
    const osaq::PointResult r = osaq::solve_point(params, choice);
    osaq::write_header(std::cout, choice, false);
    osaq::write_point_row(std::cout, r, choice, nullptr);
    return 0;
}

int do_simulate(const osaq::ModelParams& params, const std::string& solver_name,
                double horizon, double warmup, int reps, std::uint64_t seed, int jobs) {
    const osaq::SolverChoice choice = osaq::parse_solver_choice(solver_name);
    osaq::SimConfig cfg;
    cfg.params = params;
    cfg.horizon = horizon;
    cfg.warmup = warmup < 0.0 ? horizon / 10.0 : warmup;
    cfg.replications = reps;
    cfg.seed = seed;

    osaq::PointResult r = osaq::solve_point(params, choice);
    r.sim = osaq::run_simulation(cfg, jobs);
    osaq::write_header(std::cout, choice, true);
    osaq::write_point_row(std::cout, r, choice, &cfg);
    return 0;
}

int do_sweep(const std::string& config_path, int jobs) {
    std::ifstream in(config_path);
    if (!in)
        throw osaq::config_error("cannot open config file '" + config_path + "'");
    const osaq::SweepSpec spec = osaq::parse_sweep_config(in);
    if (spec.output.empty()) {
        osaq::run_sweep(spec, std::cout, jobs);
    } else {
        std::ofstream out(spec.output);
        if (!out)
            return std::cerr << "error: cannot write " << spec.output << "\n", kExitFailure;
        osaq::run_sweep(spec, out, jobs);
    }
    return 0;
}

int do_figure(int id, const std::string& out_dir, bool simulate, double horizon, double warmup,
              int reps, std::uint64_t seed, int jobs) {
    std::vector<osaq::FigureOutput> outputs = osaq::figure_presets(id);
    std::filesystem::create_directories(out_dir);
    for (auto& fig : outputs) {
        fig.spec.simulate = simulate;
        fig.spec.horizon = horizon;
        fig.spec.warmup = warmup;
        fig.spec.replications = reps;
        fig.spec.seed = seed;
        const std::string path = out_dir + "/" + fig.filename;
        std::ofstream out(path);
        if (!out)
            return std::cerr << "error: cannot write " << path << "\n", kExitFailure;
        osaq::run_sweep(fig.spec, out, jobs);
        std::cout << "wrote " << path << "\n";
    }
    return 0;
}

bool check(const char* name, bool ok) {
    std::cout << name << ": " << (ok ? "PASS" : "FAIL") << "\n";
    return ok;
}

int do_validate() {
    using namespace osaq;
    bool all = true;

    const std::vector<ModelParams> configs = [] {
        std::vector<ModelParams> v;
        ModelParams a;
        a.M = 2, a.N = 2, a.L = 2;
        v.push_back(a);
        ModelParams b;
        b.M = 3, b.N = 2, b.L = 3;
        v.push_back(b);
        ModelParams c;
        c.M = 3, c.N = 3, c.L = 10;
        v.push_back(c);
        return v;
    }();

    for (const auto& params : configs) {
        const StateSpace space = build_state_space(params);
        const RateMatrix q = assemble_generator(space);
        const ValidationReport report = validate_generator(q);
        const std::string tag = "M=" + std::to_string(params.M) + ",N=" +
                                std::to_string(params.N) + ",L=" + std::to_string(params.L);

        all &= check(("generator well-formed (" + tag + ")").c_str(), report.pass());

        const QbdBlocks blocks = extract_blocks(q, space);
        const RateMatrix back = reassemble(blocks);
        all &= check(("block partition round-trip (" + tag + ")").c_str(),
                     back.entries() == q.entries() && back.diagonal() == q.diagonal());

        const RateMatrix closed = assemble_generator_closed_form(space);
        all &= check(("closed-form assembly identical (" + tag + ")").c_str(),
                     closed.entries() == q.entries() && closed.diagonal() == q.diagonal());

        const StationaryDistribution direct = solve_direct(q);
        const StationaryDistribution geometric = solve_ldqbd(blocks);
        double gap = 0.0;
        for (int m = 0; m < space.size(); ++m)
            gap = std::max(gap,
                           std::abs(direct.probabilities[m] - geometric.probabilities[m]));
        all &= check(("solver agreement <= 1e-10 (" + tag + ")").c_str(),
                     gap <= 1e-10 && direct.residual <= 1e-10 && geometric.residual <= 1e-10);
    }

    {
        ModelParams tiny;
        tiny.M = 1, tiny.N = 1, tiny.L = 0;
        const PointResult r = solve_point(tiny, SolverChoice::Both);
        all &= check("three-state reference point",
                     std::abs(r.metrics.p_drop_exact - 13.0 / 15.0) < 1e-12 &&
                         std::abs(r.metrics.p_drop_paper - 76.0 / 90.0) < 1e-12 &&
                         r.disagreement < 1e-12);
    }

    std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";
    return all ? 0 : kExitFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Overlay spectrum-access queueing toolkit: stationary analysis and "
                 "simulation of a multi-band system with a secondary-user retrial orbit"};
    app.require_subcommand(1);

    osaq::ModelParams params;
    std::string solver_name = "direct";
    std::string dump_path;
    double horizon = 10000.0;
    double warmup = -1.0;
    int reps = 100;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string config_path;
    std::string out_dir = ".";
    int figure_id = 0;
    bool with_sim = false;

    CLI::App* solve = app.add_subcommand("solve", "stationary metrics for one parameter point");
    add_param_options(solve, params);
    solve->add_option("--solver", solver_name, "direct|ldqbd|both")->capture_default_str();
    solve->add_option("--dump-q", dump_path, "write the generator as text");

    CLI::App* simulate = app.add_subcommand("simulate", "solve plus discrete-event estimates");
    add_param_options(simulate, params);
    simulate->add_option("--solver", solver_name, "direct|ldqbd|both")->capture_default_str();
    simulate->add_option("--horizon", horizon, "simulated time units")->capture_default_str();
    simulate->add_option("--warmup", warmup, "discarded initial time (default horizon/10)");
    simulate->add_option("--reps", reps, "independent replications")->capture_default_str();
    simulate->add_option("--seed", seed, "RNG seed")->capture_default_str();
    simulate->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter study from a config file");
    sweep->add_option("config", config_path, "sweep config path")->required();
    sweep->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    CLI::App* figure = app.add_subcommand("figure", "regenerate a bundled parameter study");
    figure->add_option("--id", figure_id, "study id (2, 3 or 4)")->required();
    figure->add_option("--out", out_dir, "output directory")->capture_default_str();
    figure->add_flag("--simulate", with_sim, "add simulation columns");
    figure->add_option("--horizon", horizon, "simulated time units")->capture_default_str();
    figure->add_option("--warmup", warmup, "discarded initial time (default horizon/10)");
    figure->add_option("--reps", reps, "independent replications")->capture_default_str();
    figure->add_option("--seed", seed, "RNG seed")->capture_default_str();
    figure->add_option("--jobs", jobs, "worker threads")->capture_default_str();

    CLI::App* validate_cmd = app.add_subcommand("validate", "generator/solver self-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*solve)
            return do_solve(params, solver_name, dump_path);
        if (*simulate)
            return do_simulate(params, solver_name, horizon, warmup, reps, seed, jobs);
        if (*sweep)
            return do_sweep(config_path, jobs);
        if (*figure)
            return do_figure(figure_id, out_dir, with_sim, horizon, warmup, reps, seed, jobs);
        if (*validate_cmd)
            return do_validate();
    } catch (const osaq::parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const osaq::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}

#include "osaq/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <string>

#include "osaq/errors.hpp"
#include "osaq/generator.hpp"
#include "parallel.hpp"

namespace osaq {

namespace {

const char* kModelFields[] = {"M", "N", "L", "lambda_p", "lambda_s", "mu_p", "mu_s", "theta"};

bool is_model_field(const std::string& name) {
    return std::find(std::begin(kModelFields), std::end(kModelFields), name) !=
           std::end(kModelFields);
}

bool is_integer_field(const std::string& name) {
    return name == "M" || name == "N" || name == "L";
}

void apply_model_field(ModelParams& p, const std::string& name, double value) {
    if (name == "M")
        p.M = static_cast<int>(std::llround(value));
    else if (name == "N")
        p.N = static_cast<int>(std::llround(value));
    else if (name == "L")
        p.L = static_cast<int>(std::llround(value));
    else if (name == "lambda_p")
        p.lambda_p = value;
    else if (name == "lambda_s")
        p.lambda_s = value;
    else if (name == "mu_p")
        p.mu_p = value;
    else if (name == "mu_s")
        p.mu_s = value;
    else if (name == "theta")
        p.theta = value;
    else
        throw config_error("unknown model parameter '" + name + "'");
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

double parse_number(const std::string& text, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw config_error("expected a number, got '" + text + "'", line);
    }
    if (used != text.size() || !std::isfinite(v))
        throw config_error("expected a number, got '" + text + "'", line);
    return v;
}

double parse_field_value(const std::string& name, const std::string& text, int line) {
    const double v = parse_number(text, line);
    if (is_integer_field(name) && v != std::floor(v))
        throw config_error(name + " must be an integer, got '" + text + "'", line);
    return v;
}

// Splits on commas that sit outside parentheses.
std::vector<std::string> split_top_level(const std::string& text) {
    std::vector<std::string> parts;
    std::string current;
    int depth = 0;
    for (char c : text) {
        if (c == '(')
            ++depth;
        else if (c == ')')
            --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(trim(current));
    return parts;
}

SweepAxis parse_axis(const std::string& key, const std::string& rhs, int line,
                     std::set<std::string>& swept) {
    SweepAxis axis;
    if (!key.empty() && key.front() == '(') {
        if (key.back() != ')')
            throw config_error("unterminated parameter tuple '" + key + "'", line);
        for (const auto& name : split_top_level(key.substr(1, key.size() - 2)))
            axis.names.push_back(name);
    } else {
        axis.names.push_back(key);
    }
    for (const auto& name : axis.names) {
        if (!is_model_field(name))
            throw config_error("only model parameters can be swept, got '" + name + "'", line);
        if (!swept.insert(name).second)
            throw config_error("parameter '" + name + "' is swept twice", line);
    }

    for (const auto& item : split_top_level(rhs)) {
        if (item.empty())
            throw config_error("empty value in sweep list", line);
        std::vector<double> tuple;
        if (axis.names.size() > 1 || (!item.empty() && item.front() == '(')) {
            if (item.front() != '(' || item.back() != ')')
                throw config_error("expected a (..) tuple, got '" + item + "'", line);
            const auto comps = split_top_level(item.substr(1, item.size() - 2));
            if (comps.size() != axis.names.size())
                throw config_error("tuple '" + item + "' does not match " +
                                       std::to_string(axis.names.size()) + " swept parameters",
                                   line);
            for (std::size_t c = 0; c < comps.size(); ++c)
                tuple.push_back(parse_field_value(axis.names[c], comps[c], line));
        } else {
            tuple.push_back(parse_field_value(axis.names[0], item, line));
        }
        axis.values.push_back(std::move(tuple));
    }
    if (axis.values.empty())
        throw config_error("sweep value list is empty", line);
    return axis;
}

} // namespace

std::string to_string(SolverChoice choice) {
    switch (choice) {
    case SolverChoice::Direct:
        return "direct";
    case SolverChoice::Ldqbd:
        return "ldqbd";
    case SolverChoice::Both:
        return "both";
    }
    return "?";
}

SolverChoice parse_solver_choice(const std::string& text) {
    if (text == "direct")
        return SolverChoice::Direct;
    if (text == "ldqbd")
        return SolverChoice::Ldqbd;
    if (text == "both")
        return SolverChoice::Both;
    throw config_error("solver must be direct, ldqbd or both, got '" + text + "'");
}

PointResult solve_point(const ModelParams& params, SolverChoice choice) {
    const StateSpace space = build_state_space(params);
    const RateMatrix q = assemble_generator(space);

    PointResult out;
    out.params = params;
    out.states = space.size();
    out.disagreement = std::numeric_limits<double>::quiet_NaN();

    std::optional<StationaryDistribution> direct, ldqbd;
    if (choice != SolverChoice::Ldqbd)
        direct = solve_direct(q);
    if (choice != SolverChoice::Direct)
        ldqbd = solve_ldqbd(extract_blocks(q, space));

    if (choice == SolverChoice::Both) {
        double gap = 0.0;
        for (int m = 0; m < space.size(); ++m)
            gap = std::max(gap,
                           std::abs(direct->probabilities[m] - ldqbd->probabilities[m]));
        out.disagreement = gap;
    }

    const StationaryDistribution& pi = direct ? *direct : *ldqbd;
    out.metrics = compute_metrics(pi, space);
    out.residual = pi.residual;
    return out;
}

SimConfig make_sim_config(const SweepSpec& spec, const ModelParams& params) {
    SimConfig cfg;
    cfg.params = params;
    cfg.horizon = spec.horizon;
    cfg.warmup = spec.warmup < 0.0 ? spec.horizon / 10.0 : spec.warmup;
    cfg.replications = spec.replications;
    cfg.seed = spec.seed;
    return cfg;
}

SweepSpec parse_sweep_config(std::istream& in) {
    SweepSpec spec;
    std::set<std::string> swept;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty())
            continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", line);
        std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (key.empty())
            throw config_error("missing key before '='", line);

        if (key.rfind("sweep", 0) == 0 &&
            (key.size() == 5 || std::isspace(static_cast<unsigned char>(key[5])) ||
             key[5] == '(')) {
            const std::string axis_key = trim(key.substr(5));
            if (axis_key.empty())
                throw config_error("sweep needs a parameter name", line);
            spec.axes.push_back(parse_axis(axis_key, value, line, swept));
            continue;
        }

        if (is_model_field(key)) {
            apply_model_field(spec.base, key, parse_field_value(key, value, line));
        } else if (key == "solver") {
            try {
                spec.solver = parse_solver_choice(value);
            } catch (const config_error& e) {
                throw config_error(e.what(), line);
            }
        } else if (key == "simulate") {
            if (value == "true" || value == "1")
                spec.simulate = true;
            else if (value == "false" || value == "0")
                spec.simulate = false;
            else
                throw config_error("simulate must be true or false", line);
        } else if (key == "horizon") {
            spec.horizon = parse_number(value, line);
        } else if (key == "warmup") {
            spec.warmup = parse_number(value, line);
        } else if (key == "reps") {
            const double v = parse_number(value, line);
            if (v != std::floor(v) || v < 1)
                throw config_error("reps must be a positive integer", line);
            spec.replications = static_cast<int>(v);
        } else if (key == "seed") {
            try {
                std::size_t used = 0;
                if (value.empty() || value[0] == '-')
                    throw std::invalid_argument(value); // stoull would wrap silently
                spec.seed = std::stoull(value, &used);
                if (used != value.size())
                    throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw config_error("seed must be an unsigned integer", line);
            }
        } else if (key == "output") {
            spec.output = value;
        } else {
            throw config_error("unknown key '" + key + "'", line);
        }
    }
    return spec;
}

std::vector<ModelParams> expand_sweep(const SweepSpec& spec) {
    long long total = 1;
    for (const auto& axis : spec.axes) {
        total *= static_cast<long long>(axis.values.size());
        if (total > 10000)
            throw config_error("sweep expands to more than 10000 points");
    }
    std::vector<ModelParams> points;
    points.reserve(static_cast<std::size_t>(total));
    for (long long index = 0; index < total; ++index) {
        ModelParams p = spec.base;
        long long rest = index;
        long long stride = total;
        for (const auto& axis : spec.axes) {
            stride /= static_cast<long long>(axis.values.size());
            const auto& tuple = axis.values[static_cast<std::size_t>(rest / stride)];
            rest %= stride;
            for (std::size_t c = 0; c < axis.names.size(); ++c)
                apply_model_field(p, axis.names[c], tuple[c]);
        }
        validate(p);
        points.push_back(p);
    }
    return points;
}

std::string fmt_g6(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

void write_header(std::ostream& os, SolverChoice choice, bool with_sim) {
    os << "M,N,L,lambda_p,lambda_s,mu_p,mu_s,theta,states,p_drop_paper,p_drop_exact,"
          "throughput_paper,throughput_exact,mean_orbit,su_utilization,pu_blocking,solver,"
          "residual";
    if (choice == SolverChoice::Both)
        os << ",solver_disagreement";
    if (with_sim)
        os << ",horizon,warmup,reps,seed,p_drop_hat,p_drop_ci,throughput_hat,throughput_ci,"
              "mean_orbit_hat,pu_blocking_hat";
    os << "\n";
}

void write_point_row(std::ostream& os, const PointResult& r, SolverChoice choice,
                     const SimConfig* sim_config) {
    const ModelParams& p = r.params;
    const MetricsReport& m = r.metrics;
    os << p.M << ',' << p.N << ',' << p.L << ',' << fmt_g6(p.lambda_p) << ','
       << fmt_g6(p.lambda_s) << ',' << fmt_g6(p.mu_p) << ',' << fmt_g6(p.mu_s) << ','
       << fmt_g6(p.theta) << ',' << r.states << ',' << fmt_g6(m.p_drop_paper) << ','
       << fmt_g6(m.p_drop_exact) << ',' << fmt_g6(m.throughput_paper) << ','
       << fmt_g6(m.throughput_exact) << ',' << fmt_g6(m.mean_orbit) << ','
       << fmt_g6(m.su_utilization) << ',' << fmt_g6(m.pu_blocking) << ','
       << to_string(choice) << ',' << fmt_g6(r.residual);
    if (choice == SolverChoice::Both)
        os << ',' << fmt_g6(r.disagreement);
    if (sim_config) {
        const SimEstimates& s = *r.sim;
        os << ',' << fmt_g6(sim_config->horizon) << ',' << fmt_g6(sim_config->warmup) << ','
           << s.replications << ',' << sim_config->seed << ',' << fmt_g6(s.p_drop_hat) << ','
           << fmt_g6(s.p_drop_ci) << ',' << fmt_g6(s.throughput_hat) << ','
           << fmt_g6(s.throughput_ci) << ',' << fmt_g6(s.mean_orbit_hat) << ','
           << fmt_g6(s.pu_blocking_hat);
    }
    os << "\n";
}

void run_sweep(const SweepSpec& spec, std::ostream& os, int jobs) {
    const std::vector<ModelParams> points = expand_sweep(spec);
    std::vector<PointResult> results(points.size());
    detail::parallel_for(static_cast<int>(points.size()), jobs, [&](int idx) {
        results[idx] = solve_point(points[idx], spec.solver);
        if (spec.simulate)
            results[idx].sim = run_simulation(make_sim_config(spec, points[idx]), 1);
    });

    write_header(os, spec.solver, spec.simulate);
    for (std::size_t idx = 0; idx < results.size(); ++idx) {
        const SimConfig cfg = make_sim_config(spec, results[idx].params);
        write_point_row(os, results[idx], spec.solver, spec.simulate ? &cfg : nullptr);
    }
}

namespace {

SweepAxis plain_axis(const std::string& name, std::vector<double> values) {
    SweepAxis axis;
    axis.names = {name};
    for (double v : values)
        axis.values.push_back({v});
    return axis;
}

SweepAxis layout_axis(std::vector<std::pair<double, double>> mn_pairs) {
    SweepAxis axis;
    axis.names = {"M", "N"};
    for (const auto& [m, n] : mn_pairs)
        axis.values.push_back({m, n});
    return axis;
}

ModelParams baseline_params() {
    ModelParams p;
    p.lambda_s = 1.5;
    p.lambda_p = 0.1;
    p.mu_s = 0.4;
    p.mu_p = 0.2;
    p.theta = 2.0;
    return p;
}

} // namespace

std::vector<FigureOutput> figure_presets(int id) {
    if (id != 2 && id != 3 && id != 4)
        throw config_error("unknown figure id " + std::to_string(id) + " (valid: 2, 3, 4)");

    std::vector<FigureOutput> outputs;
    const std::string tag = "fig" + std::to_string(id);
    if (id == 2 || id == 3) {
        // Dropping probability (2) and throughput (3) against the arrival
        // rates, for three band layouts, with and without an orbit.
        SweepSpec vs_lambda_p;
        vs_lambda_p.base = baseline_params();
        vs_lambda_p.axes.push_back(layout_axis({{2, 2}, {3, 2}, {3, 3}}));
        vs_lambda_p.axes.push_back(plain_axis("L", {0, 10}));
        vs_lambda_p.axes.push_back(plain_axis("lambda_p", {0.1, 0.2, 0.3, 0.4, 0.5}));
        outputs.push_back({tag + "_vs_lambda_p.csv", vs_lambda_p});

        SweepSpec vs_lambda_s = vs_lambda_p;
        vs_lambda_s.axes[2] = plain_axis("lambda_s", {0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
        outputs.push_back({tag + "_vs_lambda_s.csv", vs_lambda_s});
    } else {
        // Retrial-rate study for a fixed layout and several orbit sizes.
        SweepSpec vs_theta;
        vs_theta.base = baseline_params();
        vs_theta.base.M = 3;
        vs_theta.base.N = 2;
        vs_theta.axes.push_back(plain_axis("L", {2, 5, 10}));
        vs_theta.axes.push_back(plain_axis("theta", {0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}));
        outputs.push_back({tag + "_vs_theta.csv", vs_theta});
    }
    return outputs;
}

} // namespace osaq

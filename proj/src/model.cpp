#include "osaq/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "osaq/errors.hpp"

namespace osaq {

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok)
        throw parameter_error(std::string(field) + ": " + what);
}

} // namespace

void validate(const ModelParams& p) {
    require(p.M >= 1, "M", "must be >= 1");
    require(p.N >= 1, "N", "must be >= 1");
    require(p.L >= 0, "L", "must be >= 0");
    require(std::isfinite(p.lambda_p) && p.lambda_p > 0.0, "lambda_p", "must be finite and > 0");
    require(std::isfinite(p.lambda_s) && p.lambda_s > 0.0, "lambda_s", "must be finite and > 0");
    require(std::isfinite(p.mu_p) && p.mu_p > 0.0, "mu_p", "must be finite and > 0");
    require(std::isfinite(p.mu_s) && p.mu_s > 0.0, "mu_s", "must be finite and > 0");
    require(std::isfinite(p.theta) && p.theta >= 0.0, "theta", "must be finite and >= 0");
}

StateSpace::StateSpace(const ModelParams& params) : params_(params) {
    validate(params_);
    level_sizes_.reserve(params_.M + 1);
    level_offsets_.reserve(params_.M + 2);
    level_offsets_.push_back(0);
    for (int i = 0; i <= params_.M; ++i) {
        const int jmax = (params_.M - i) * params_.N;
        level_sizes_.push_back((jmax + 1) * (params_.L + 1));
        level_offsets_.push_back(level_offsets_.back() + level_sizes_.back());
        for (int j = 0; j <= jmax; ++j)
            for (int k = 0; k <= params_.L; ++k)
                states_.push_back({i, j, k});
    }
}

bool StateSpace::contains(const SystemState& s) const {
    return s.i >= 0 && s.i <= params_.M && s.j >= 0 &&
           s.j <= (params_.M - s.i) * params_.N && s.k >= 0 && s.k <= params_.L;
}

int StateSpace::index_of(const SystemState& s) const {
    if (!contains(s))
        throw std::out_of_range("state (" + std::to_string(s.i) + "," + std::to_string(s.j) +
                                "," + std::to_string(s.k) + ") is not in the state space");
    return level_offsets_[s.i] + s.j * (params_.L + 1) + s.k + 1;
}

SystemState StateSpace::state_of(int m) const {
    if (m < 1 || m > size())
        throw std::out_of_range("ordinal " + std::to_string(m) + " outside 1.." +
                                std::to_string(size()));
    return states_[m - 1];
}

StateSpace build_state_space(const ModelParams& params) {
    return StateSpace(params);
}

std::vector<Transition> transitions_from(const ModelParams& p, const SystemState& s) {
    if (s.i < 0 || s.i > p.M || s.j < 0 || s.j > (p.M - s.i) * p.N || s.k < 0 || s.k > p.L)
        throw std::out_of_range("transitions_from: state not in the state space");

    const int free_sub_bands = (p.M - s.i) * p.N - s.j;
    std::vector<Transition> out;
    out.reserve(6);

    // SU arrival: admit, orbit, or (silently) drop.
    if (free_sub_bands > 0) {
        out.push_back({s, {s.i, s.j + 1, s.k}, p.lambda_s, TransitionKind::SuArrivalAdmit, 0});
    } else if (s.k < p.L) {
        out.push_back({s, {s.i, s.j, s.k + 1}, p.lambda_s, TransitionKind::SuArrivalToOrbit, 0});
    }

    // PU arrival; blocked and lost at i = M.
    if (s.i < p.M) {
        const int capacity_after = (p.M - s.i - 1) * p.N;
        if (s.j <= capacity_after) {
            out.push_back({s, {s.i + 1, s.j, s.k}, p.lambda_p, TransitionKind::PuArrivalNoPreempt, 0});
        } else {
            const int l = s.j - capacity_after; // 1 <= l <= N
            const int k_after = std::min(s.k + l, p.L);
            const int dropped = s.k + l - k_after;
            out.push_back({s, {s.i + 1, s.j - l, k_after}, p.lambda_p,
                           TransitionKind::PuArrivalPreempt, dropped});
        }
    }

    if (s.j >= 1)
        out.push_back({s, {s.i, s.j - 1, s.k}, s.j * p.mu_s, TransitionKind::SuServiceEnd, 0});

    if (s.i >= 1)
        out.push_back({s, {s.i - 1, s.j, s.k}, s.i * p.mu_p, TransitionKind::PuServiceEnd, 0});

    // Retrial succeeds only when a sub-band is free; otherwise no event.
    if (s.k >= 1 && free_sub_bands > 0 && p.theta > 0.0)
        out.push_back({s, {s.i, s.j + 1, s.k - 1}, s.k * p.theta, TransitionKind::RetrialSuccess, 0});

    return out;
}

} // namespace osaq

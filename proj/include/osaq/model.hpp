#ifndef OSAQ_MODEL_HPP
#define OSAQ_MODEL_HPP

#include <cstdint>
#include <vector>

namespace osaq {

/// Scenario parameters for the overlay spectrum-access model: M licensed
/// bands of N sub-bands each, a retrial orbit of capacity L, Poisson
/// arrivals (lambda_p, lambda_s), exponential services (mu_p, mu_s) and a
/// per-orbit-customer retrial rate theta.
struct ModelParams {
    int M = 1;
    int N = 1;
    int L = 0;
    double lambda_p = 0.1;
    double lambda_s = 1.5;
    double mu_p = 0.2;
    double mu_s = 0.4;
    double theta = 2.0;
};

/// Throws parameter_error naming the offending field if params are outside
/// the admissible domain (M,N >= 1, L >= 0, rates positive, theta >= 0,
/// everything finite).
void validate(const ModelParams& params);

/// One point of the chain: i bands held by primary users, j sub-bands held
/// by secondary users, k secondaries waiting in the orbit.
/// Feasibility requires j <= (M - i) * N.
struct SystemState {
    int i = 0;
    int j = 0;
    int k = 0;

    friend bool operator==(const SystemState&, const SystemState&) = default;

    /// Lexicographic (i, j, k).
    friend auto operator<=>(const SystemState&, const SystemState&) = default;
};

/// Full lexicographic enumeration of the feasible states, with O(1)
/// bidirectional maps between states and 1-based ordinals.
class StateSpace {
public:
    explicit StateSpace(const ModelParams& params);

    const ModelParams& params() const { return params_; }
    const std::vector<SystemState>& states() const { return states_; }

    /// Number of states at PU-level i: ((M - i) * N + 1) * (L + 1).
    const std::vector<int>& level_sizes() const { return level_sizes_; }

    /// 0-based ordinal of the first state of each level, plus a trailing
    /// total count.
    const std::vector<int>& level_offsets() const { return level_offsets_; }

    int size() const { return static_cast<int>(states_.size()); }

    bool contains(const SystemState& s) const;

    /// 1-based position of s in the lexicographic enumeration.
    /// Throws std::out_of_range if s is not a feasible state.
    int index_of(const SystemState& s) const;

    /// Inverse of index_of. Throws std::out_of_range unless 1 <= m <= size().
    SystemState state_of(int m) const;

private:
    ModelParams params_;
    std::vector<SystemState> states_;
    std::vector<int> level_sizes_;
    std::vector<int> level_offsets_;
};

StateSpace build_state_space(const ModelParams& params);

enum class TransitionKind {
    SuArrivalAdmit,
    SuArrivalToOrbit,
    PuArrivalNoPreempt,
    PuArrivalPreempt,
    SuServiceEnd,
    PuServiceEnd,
    RetrialSuccess,
};

/// One outgoing rate of the chain. su_dropped counts secondaries lost on
/// this transition; it is nonzero only for preemptions that overflow the
/// orbit.
struct Transition {
    SystemState from;
    SystemState to;
    double rate = 0.0;
    TransitionKind kind = TransitionKind::SuArrivalAdmit;
    int su_dropped = 0;
};

/// Emits every outgoing transition of state s under the model dynamics:
///   - SU arrival: seizes a free sub-band, else joins the orbit, else is
///     dropped (dropped arrivals are self-loops and produce no transition);
///   - PU arrival (i < M): takes a free band, preempting the
///     l = j - (M-i-1)*N excess secondaries when the remaining capacity is
///     short; preempted SUs go to the orbit, overflow beyond L is dropped;
///     arrivals at i = M are blocked and lost;
///   - service completions at rates j*mu_s and i*mu_p;
///   - retrial at rate k*theta when a sub-band is free (failed retrials are
///     silent).
/// Throws std::out_of_range if s is infeasible.
std::vector<Transition> transitions_from(const ModelParams& params, const SystemState& s);

} // namespace osaq

#endif

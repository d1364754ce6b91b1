#ifndef OSAQ_SOLVER_HPP
#define OSAQ_SOLVER_HPP

#include <vector>

#include <Eigen/Dense>

#include "osaq/generator.hpp"

namespace osaq {

enum class SolveMethod { Direct, Ldqbd };

/// Stationary probability vector aligned with the StateSpace ordering.
/// residual is the achieved max |(pi*Q)_m|.
struct StationaryDistribution {
    std::vector<double> probabilities;
    double residual = 0.0;
    SolveMethod method = SolveMethod::Direct;
};

/// Solves pi*Q = 0, sum(pi) = 1 by Grassmann-Taksar-Heyman state
/// elimination on the dense expansion. States outside the recurrent class
/// get probability zero. Throws solver_error for matrices of 10^4 states or
/// more (capacity refusal) and for chains with more than one recurrent
/// class, naming two mutually unreachable states.
StationaryDistribution solve_direct(const RateMatrix& Q);

/// Intermediate rate matrices of the level recursion, exposed for
/// diagnostics; R[i] links level i-1 to level i.
struct LdqbdDetail {
    std::vector<Eigen::MatrixXd> R;
};

/// Matrix-geometric solve on the level blocks: R_M = -D_M * A_M^{-1},
/// R_i = -D_i * (A_i + R_{i+1} C_{i+1})^{-1} backwards, the boundary vector
/// from the null space of (A_0 + R_1 C_1), then Pi_i = Pi_{i-1} R_i and a
/// global normalization. Throws solver_error on a singular level system.
StationaryDistribution solve_ldqbd(const QbdBlocks& blocks, LdqbdDetail* detail = nullptr);

} // namespace osaq

#endif

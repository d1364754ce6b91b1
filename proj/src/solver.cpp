#include "osaq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "osaq/errors.hpp"

namespace osaq {

namespace {

constexpr int kDirectCapacity = 10000;

struct SccResult {
    std::vector<int> component; // component id per vertex
    int count = 0;
};

// Iterative Tarjan; component ids are assigned in reverse topological order.
SccResult strongly_connected_components(int n, const std::vector<std::vector<int>>& adj) {
    SccResult res;
    res.component.assign(n, -1);
    std::vector<int> disc(n, -1), low(n, 0), stack;
    std::vector<char> on_stack(n, 0);
    std::vector<std::pair<int, int>> frames; // (vertex, next child index)
    int timer = 0;

    for (int start = 0; start < n; ++start) {
        if (disc[start] != -1)
            continue;
        frames.emplace_back(start, 0);
        while (!frames.empty()) {
            const int v = frames.back().first;
            int& child = frames.back().second;
            if (child == 0) {
                disc[v] = low[v] = timer++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            if (child < static_cast<int>(adj[v].size())) {
                const int w = adj[v][child++];
                if (disc[w] == -1)
                    frames.emplace_back(w, 0);
                else if (on_stack[w])
                    low[v] = std::min(low[v], disc[w]);
            } else {
                if (low[v] == disc[v]) {
                    while (true) {
                        const int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        res.component[w] = res.count;
                        if (w == v)
                            break;
                    }
                    ++res.count;
                }
                frames.pop_back();
                if (!frames.empty()) {
                    const int parent = frames.back().first;
                    low[parent] = std::min(low[parent], low[v]);
                }
            }
        }
    }
    return res;
}

// GTH elimination over the recurrent states only; `members` is ascending.
std::vector<double> gth(const RateMatrix& Q, const std::vector<int>& members) {
    const int r = static_cast<int>(members.size());
    std::vector<int> local(Q.dim(), -1);
    for (int idx = 0; idx < r; ++idx)
        local[members[idx]] = idx;

    std::vector<double> W(static_cast<std::size_t>(r) * r, 0.0);
    for (const auto& e : Q.entries()) {
        const int a = local[e.row], b = local[e.col];
        if (a >= 0 && b >= 0)
            W[static_cast<std::size_t>(a) * r + b] += e.rate;
    }

    for (int k = r - 1; k >= 1; --k) {
        double* wk = &W[static_cast<std::size_t>(k) * r];
        double s = 0.0;
        for (int j = 0; j < k; ++j)
            s += wk[j];
        if (!(s > 0.0))
            throw solver_error("state elimination stalled at state " +
                               std::to_string(members[k] + 1) +
                               " (no rate toward earlier states)");
        const double inv = 1.0 / s;
        for (int i = 0; i < k; ++i) {
            double* wi = &W[static_cast<std::size_t>(i) * r];
            wi[k] *= inv;
            const double f = wi[k];
            if (f != 0.0)
                for (int j = 0; j < k; ++j)
                    if (j != i)
                        wi[j] += f * wk[j];
        }
    }

    std::vector<double> pi(r, 0.0);
    pi[0] = 1.0;
    for (int k = 1; k < r; ++k) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i)
            acc += pi[i] * W[static_cast<std::size_t>(i) * r + k];
        pi[k] = acc;
    }
    double total = 0.0;
    for (double v : pi)
        total += v;
    for (double& v : pi)
        v /= total;
    return pi;
}

double max_abs(const std::vector<double>& v) {
    double worst = 0.0;
    for (double x : v)
        worst = std::max(worst, std::abs(x));
    return worst;
}

} // namespace

StationaryDistribution solve_direct(const RateMatrix& Q) {
    const int n = Q.dim();
    if (n >= kDirectCapacity)
        throw solver_error("direct solver refuses " + std::to_string(n) +
                           " states (dense capacity limit " +
                           std::to_string(kDirectCapacity) + ")");
    if (n == 0)
        throw solver_error("empty generator");

    std::vector<std::vector<int>> adj(n);
    for (const auto& e : Q.entries())
        if (e.rate > 0.0)
            adj[e.row].push_back(e.col);
    const SccResult scc = strongly_connected_components(n, adj);

    // Recurrent classes are the components no edge leaves.
    std::vector<char> closed(scc.count, 1);
    for (const auto& e : Q.entries())
        if (e.rate > 0.0 && scc.component[e.row] != scc.component[e.col])
            closed[scc.component[e.row]] = 0;

    std::vector<int> closed_ids;
    for (int c = 0; c < scc.count; ++c)
        if (closed[c])
            closed_ids.push_back(c);
    if (closed_ids.size() > 1) {
        int first = -1, second = -1;
        for (int v = 0; v < n && second < 0; ++v) {
            if (scc.component[v] == closed_ids[0] && first < 0)
                first = v;
            else if (scc.component[v] == closed_ids[1])
                second = v;
        }
        throw solver_error("chain has multiple recurrent classes: states " +
                           std::to_string(first + 1) + " and " + std::to_string(second + 1) +
                           " are mutually unreachable");
    }

    std::vector<int> members;
    for (int v = 0; v < n; ++v)
        if (scc.component[v] == closed_ids[0])
            members.push_back(v);

    const std::vector<double> local_pi = gth(Q, members);

    StationaryDistribution out;
    out.method = SolveMethod::Direct;
    out.probabilities.assign(n, 0.0);
    for (int idx = 0; idx < static_cast<int>(members.size()); ++idx)
        out.probabilities[members[idx]] = local_pi[idx];
    out.residual = max_abs(Q.left_multiply(out.probabilities));
    return out;
}

StationaryDistribution solve_ldqbd(const QbdBlocks& blocks, LdqbdDetail* detail) {
    const int M = static_cast<int>(blocks.level_sizes.size()) - 1;
    if (M < 0)
        throw solver_error("empty block structure");

    // R[i] = -D_i * (A_i + R_{i+1} C_{i+1})^{-1}, computed backwards.
    std::vector<Eigen::MatrixXd> R(M + 1);
    Eigen::MatrixXd correction; // R_{i+1} * C_{i+1}, pending for level i
    for (int i = M; i >= 1; --i) {
        Eigen::MatrixXd B = blocks.A[i];
        if (i < M)
            B += correction;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B.transpose());
        if (!lu.isInvertible())
            throw solver_error("singular level system at level " + std::to_string(i));
        R[i] = -lu.solve(blocks.D[i].transpose()).transpose();
        correction = R[i] * blocks.C[i];
    }

    // Boundary: Pi_0 spans the null space of (A_0 + R_1 C_1); pin the scale
    // by swapping the last balance equation for a sum constraint.
    Eigen::MatrixXd B0 = blocks.A[0];
    if (M >= 1)
        B0 += correction;
    const int m0 = static_cast<int>(B0.rows());
    Eigen::MatrixXd pinned = B0;
    pinned.col(m0 - 1).setOnes();
    Eigen::FullPivLU<Eigen::MatrixXd> lu0(pinned.transpose());
    if (!lu0.isInvertible())
        throw solver_error("singular boundary system at level 0");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m0);
    rhs(m0 - 1) = 1.0;
    Eigen::RowVectorXd level_vec = lu0.solve(rhs).transpose();

    std::vector<double> pi;
    pi.reserve(std::accumulate(blocks.level_sizes.begin(), blocks.level_sizes.end(), 0));
    double total = 0.0;
    for (int i = 0; i <= M; ++i) {
        if (i > 0)
            level_vec = level_vec * R[i];
        for (int c = 0; c < level_vec.size(); ++c) {
            pi.push_back(level_vec(c));
            total += level_vec(c);
        }
    }
    for (double& v : pi) {
        v /= total;
        if (v < 0.0 && v > -1e-12)
            v = 0.0;
    }

    StationaryDistribution out;
    out.method = SolveMethod::Ldqbd;
    out.probabilities = std::move(pi);
    out.residual = max_abs(reassemble(blocks).left_multiply(out.probabilities));
    if (detail)
        detail->R = std::move(R);
    return out;
}

} // namespace osaq

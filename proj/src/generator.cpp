#include "osaq/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "osaq/errors.hpp"

namespace osaq {

RateMatrix::RateMatrix(int dim, std::vector<RateEntry> off_diagonal) : dim_(dim) {
    for (const auto& e : off_diagonal) {
        if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
            throw structure_error("rate entry outside matrix bounds");
        if (e.row == e.col)
            throw structure_error("diagonal entries are derived, not supplied");
    }
    std::stable_sort(off_diagonal.begin(), off_diagonal.end(),
                     [](const RateEntry& a, const RateEntry& b) {
                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                     });
    entries_.reserve(off_diagonal.size());
    for (const auto& e : off_diagonal) {
        if (e.rate == 0.0)
            continue;
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col)
            entries_.back().rate += e.rate;
        else
            entries_.push_back(e);
    }
    // Diagonal = negated outflow, summed in ascending column order so both
    // assembly routes land on the same bits.
    diagonal_.assign(dim_, 0.0);
    for (const auto& e : entries_)
        diagonal_[e.row] += e.rate;
    for (double& d : diagonal_)
        d = -d;
}

RateMatrix RateMatrix::from_parts(int dim, std::vector<RateEntry> sorted_entries,
                                  std::vector<double> diagonal) {
    RateMatrix q;
    q.dim_ = dim;
    q.entries_ = std::move(sorted_entries);
    q.diagonal_ = std::move(diagonal);
    return q;
}

std::vector<double> RateMatrix::left_multiply(const std::vector<double>& x) const {
    std::vector<double> y(dim_, 0.0);
    for (const auto& e : entries_)
        y[e.col] += x[e.row] * e.rate;
    for (int c = 0; c < dim_; ++c)
        y[c] += x[c] * diagonal_[c];
    return y;
}

double RateMatrix::max_abs_row_sum() const {
    std::vector<double> sums(diagonal_);
    for (const auto& e : entries_)
        sums[e.row] += e.rate;
    double worst = 0.0;
    for (double s : sums)
        worst = std::max(worst, std::abs(s));
    return worst;
}

RateMatrix assemble_generator(const StateSpace& space) {
    std::vector<RateEntry> triplets;
    triplets.reserve(space.size() * 6);
    for (int m = 0; m < space.size(); ++m) {
        for (const auto& t : transitions_from(space.params(), space.states()[m]))
            triplets.push_back({m, space.index_of(t.to) - 1, t.rate});
    }
    return RateMatrix(space.size(), std::move(triplets));
}

RateMatrix assemble_generator_closed_form(const StateSpace& space) {
    const ModelParams& p = space.params();
    const auto& offsets = space.level_offsets();
    const int stride = p.L + 1;
    std::vector<RateEntry> triplets;
    triplets.reserve(space.size() * 6);

    auto at = [&](int level, int j, int k) { return offsets[level] + j * stride + k; };

    for (int i = 0; i <= p.M; ++i) {
        const int top_j = (p.M - i) * p.N; // X - 1 in block terms
        for (int j = 0; j <= top_j; ++j) {
            for (int k = 0; k <= p.L; ++k) {
                const int row = at(i, j, k);

                // A_i, sub-block j -> j-1: SU completion, j*mu_s on the k-diagonal.
                if (j >= 1)
                    triplets.push_back({row, at(i, j - 1, k), j * p.mu_s});

                if (j < top_j) {
                    // A_i, sub-block j -> j+1: lambda_s admission on the
                    // k-diagonal, k*theta retrial one below it.
                    triplets.push_back({row, at(i, j + 1, k), p.lambda_s});
                    if (k >= 1 && p.theta > 0.0)
                        triplets.push_back({row, at(i, j + 1, k - 1), k * p.theta});
                } else if (k < p.L) {
                    // Top SU occupancy: blocked arrivals shift up the orbit.
                    triplets.push_back({row, at(i, j, k + 1), p.lambda_s});
                }

                // D_{i+1}: PU arrival, preempting the excess beyond the
                // shrunken capacity.
                if (i < p.M) {
                    const int capacity_after = (p.M - i - 1) * p.N;
                    if (j <= capacity_after)
                        triplets.push_back({row, at(i + 1, j, k), p.lambda_p});
                    else
                        triplets.push_back(
                            {row, at(i + 1, capacity_after, std::min(k + j - capacity_after, p.L)),
                             p.lambda_p});
                }

                // C_i = i*mu_p*[I|0].
                if (i >= 1)
                    triplets.push_back({row, at(i - 1, j, k), i * p.mu_p});
            }
        }
    }
    return RateMatrix(space.size(), std::move(triplets));
}

namespace {

int level_of(const std::vector<int>& offsets, int ordinal0) {
    int lo = 0, hi = static_cast<int>(offsets.size()) - 2;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (offsets[mid] <= ordinal0)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

} // namespace

QbdBlocks extract_blocks(const RateMatrix& Q, const StateSpace& space) {
    const auto& sizes = space.level_sizes();
    const auto& offsets = space.level_offsets();
    const int M = static_cast<int>(sizes.size()) - 1;

    QbdBlocks b;
    b.level_sizes = sizes;
    b.A.resize(M + 1);
    b.D.resize(M + 1);
    b.C.resize(M + 1);
    for (int i = 0; i <= M; ++i) {
        b.A[i] = Eigen::MatrixXd::Zero(sizes[i], sizes[i]);
        if (i >= 1) {
            b.D[i] = Eigen::MatrixXd::Zero(sizes[i - 1], sizes[i]);
            b.C[i] = Eigen::MatrixXd::Zero(sizes[i], sizes[i - 1]);
        }
    }

    for (const auto& e : Q.entries()) {
        const int li = level_of(offsets, e.row);
        const int lj = level_of(offsets, e.col);
        const int r = e.row - offsets[li];
        const int c = e.col - offsets[lj];
        if (lj == li)
            b.A[li](r, c) = e.rate;
        else if (lj == li + 1)
            b.D[lj](r, c) = e.rate;
        else if (lj == li - 1)
            b.C[li](r, c) = e.rate;
        else
            throw structure_error("entry (" + std::to_string(e.row + 1) + "," +
                                  std::to_string(e.col + 1) +
                                  ") crosses more than one level");
    }
    for (int i = 0; i <= M; ++i)
        for (int r = 0; r < sizes[i]; ++r)
            b.A[i](r, r) = Q.diagonal()[offsets[i] + r];
    return b;
}

RateMatrix reassemble(const QbdBlocks& b) {
    const int M = static_cast<int>(b.level_sizes.size()) - 1;
    std::vector<int> offsets(M + 2, 0);
    for (int i = 0; i <= M; ++i)
        offsets[i + 1] = offsets[i] + b.level_sizes[i];
    const int dim = offsets[M + 1];

    std::vector<RateEntry> entries;
    std::vector<double> diagonal(dim, 0.0);
    for (int i = 0; i <= M; ++i) {
        for (int r = 0; r < b.level_sizes[i]; ++r) {
            const int row = offsets[i] + r;
            if (i >= 1)
                for (int c = 0; c < b.level_sizes[i - 1]; ++c)
                    if (b.C[i](r, c) != 0.0)
                        entries.push_back({row, offsets[i - 1] + c, b.C[i](r, c)});
            for (int c = 0; c < b.level_sizes[i]; ++c) {
                if (c == r)
                    diagonal[row] = b.A[i](r, r);
                else if (b.A[i](r, c) != 0.0)
                    entries.push_back({row, offsets[i] + c, b.A[i](r, c)});
            }
            if (i < M)
                for (int c = 0; c < b.level_sizes[i + 1]; ++c)
                    if (b.D[i + 1](r, c) != 0.0)
                        entries.push_back({row, offsets[i + 1] + c, b.D[i + 1](r, c)});
        }
    }
    return RateMatrix::from_parts(dim, std::move(entries), std::move(diagonal));
}

ValidationReport validate_generator(const RateMatrix& Q) {
    ValidationReport report;
    report.max_abs_row_sum = Q.max_abs_row_sum();
    for (const auto& e : Q.entries())
        if (e.rate < 0.0)
            report.negative_entries.push_back(e);

    const int n = Q.dim();
    std::vector<std::vector<int>> fwd(n), bwd(n);
    for (const auto& e : Q.entries()) {
        if (e.rate <= 0.0)
            continue;
        fwd[e.row].push_back(e.col);
        bwd[e.col].push_back(e.row);
    }
    auto bfs = [n](const std::vector<std::vector<int>>& adj) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
        }
        return seen;
    };
    const auto reach = bfs(fwd);
    const auto coreach = bfs(bwd);
    for (int v = 0; v < n; ++v) {
        if (!reach[v])
            report.unreachable.push_back(v + 1);
        if (!coreach[v])
            report.not_coreachable.push_back(v + 1);
    }
    return report;
}

void dump_generator(const RateMatrix& Q, std::ostream& os) {
    os << "dim " << Q.dim() << "\n";
    char buf[64];
    auto put = [&](int r, int c, double v) {
        std::snprintf(buf, sizeof buf, "%d %d %.17g\n", r + 1, c + 1, v);
        os << buf;
    };
    std::size_t idx = 0;
    for (int row = 0; row < Q.dim(); ++row) {
        bool diag_done = false;
        while (idx < Q.entries().size() && Q.entries()[idx].row == row) {
            const auto& e = Q.entries()[idx];
            if (!diag_done && e.col > row) {
                put(row, row, Q.diagonal()[row]);
                diag_done = true;
            }
            put(e.row, e.col, e.rate);
            ++idx;
        }
        if (!diag_done)
            put(row, row, Q.diagonal()[row]);
    }
}

} // namespace osaq

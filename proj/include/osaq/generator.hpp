#ifndef OSAQ_GENERATOR_HPP
#define OSAQ_GENERATOR_HPP

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "osaq/model.hpp"

namespace osaq {

/// One off-diagonal entry of the generator, 0-based indices.
struct RateEntry {
    int row = 0;
    int col = 0;
    double rate = 0.0;

    friend bool operator==(const RateEntry&, const RateEntry&) = default;
};

/// Sparse infinitesimal generator. Off-diagonal entries are strictly
/// positive and kept sorted by (row, col); the diagonal is stored separately
/// as the negated row outflow, so every row sums to zero.
class RateMatrix {
public:
    /// Builds from unsorted off-diagonal triplets: sorts, merges duplicates
    /// by summing, and derives the diagonal. Entries must be nonnegative;
    /// zero entries are discarded.
    RateMatrix(int dim, std::vector<RateEntry> off_diagonal);

    /// Reuses already-sorted entries and a precomputed diagonal verbatim.
    static RateMatrix from_parts(int dim, std::vector<RateEntry> sorted_entries,
                                 std::vector<double> diagonal);

    int dim() const { return dim_; }
    const std::vector<RateEntry>& entries() const { return entries_; }
    const std::vector<double>& diagonal() const { return diagonal_; }

    /// Row-vector product x*Q.
    std::vector<double> left_multiply(const std::vector<double>& x) const;

    double max_abs_row_sum() const;

private:
    RateMatrix() = default;

    int dim_ = 0;
    std::vector<RateEntry> entries_;
    std::vector<double> diagonal_;
};

/// Level-tridiagonal partition of Q by PU count. A[i] is the within-level
/// block (square, side level_sizes[i], diagonal included); D[i] holds the
/// upward rates level i-1 -> i and C[i] the downward rates level i -> i-1,
/// for i >= 1 (index 0 of D and C is unused).
struct QbdBlocks {
    std::vector<int> level_sizes;
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::MatrixXd> D;
    std::vector<Eigen::MatrixXd> C;
};

/// Assembles Q by walking the transition rules of every state.
RateMatrix assemble_generator(const StateSpace& space);

/// Assembles Q from the closed-form block recipe instead of the transition
/// rules: within a level, SU-completion sub-blocks j*mu_s*I, admission/
/// retrial sub-blocks with lambda_s on the diagonal and k*theta below it,
/// orbit entry at the top SU occupancy; lambda_p upward blocks with the
/// preemption shift; i*mu_p*[I|0] downward blocks. Produces the same matrix
/// as assemble_generator entry for entry; kept as an independent route for
/// cross-checking.
RateMatrix assemble_generator_closed_form(const StateSpace& space);

/// Partitions Q into its level-tridiagonal blocks. Throws structure_error if
/// any entry connects levels more than one apart.
QbdBlocks extract_blocks(const RateMatrix& Q, const StateSpace& space);

/// Inverse of extract_blocks; reproduces Q exactly.
RateMatrix reassemble(const QbdBlocks& blocks);

struct ValidationReport {
    double max_abs_row_sum = 0.0;
    std::vector<RateEntry> negative_entries;
    /// 1-based ordinals not reachable from state 1.
    std::vector<int> unreachable;
    /// 1-based ordinals from which state 1 cannot be reached.
    std::vector<int> not_coreachable;

    bool conservative() const { return max_abs_row_sum <= 1e-12; }
    bool irreducible() const { return unreachable.empty() && not_coreachable.empty(); }
    bool pass() const { return conservative() && negative_entries.empty() && irreducible(); }
};

/// Checks conservativity, entry signs, and mutual reachability with state 1.
ValidationReport validate_generator(const RateMatrix& Q);

/// Text dump: header "dim <n>", then one "row col rate" line per nonzero
/// entry (1-based, diagonal included) in sorted order.
void dump_generator(const RateMatrix& Q, std::ostream& os);

} // namespace osaq

#endif

#ifndef SPECTRAL_CONIC_HPP
#define SPECTRAL_CONIC_HPP

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include <spectral/core.hpp>

///
/// \file conic.hpp
///
/// A small conic-program model and an interior-point solver for it.
///
/// Programs are written in standard form
///
///     minimize / maximize   <c, x>
///     subject to            <a_r, x> = b_r,   r = 0..rows-1
///                           x in K = R^{f} x Q^{q_1} x ... x S^{d_1}_+ x ...
///
/// with free scalars, second-order cones Q^q = {(t, u) : t >= |u|_2} and
/// real symmetric positive semidefinite blocks. A PSD entry is addressed by
/// (i, j); a coefficient c on entry (i, j) contributes c * X_ij to the row,
/// regardless of which triangle (i, j) names.
///
namespace spectral::conic
{

enum class Sense
{
    minimize,
    maximize
};

enum class BlockKind
{
    free,
    soc,
    psd
};

struct Block
{
    BlockKind kind;
    int dim;
};

/// Reference to one scalar of a variable block.
struct VarRef
{
    int block{0};
    int i{0};
    int j{0};
};

struct Term
{
    VarRef var;
    double coef{0};
};

struct Row
{
    std::vector<Term> terms;
    double rhs{0};
};

class ConicProgram
{
public:
    explicit ConicProgram(Sense sense = Sense::minimize) : sense_(sense) {}

    int add_free(int count);
    int add_soc(int dim);
    int add_psd(int dim);

    VarRef var(int block, int i) const;
    VarRef entry(int block, int i, int j) const;

    void add_objective(VarRef v, double coef);

    /// Appends an equality row and returns its index.
    int add_row(std::vector<Term> terms, double rhs);

    Sense sense() const { return sense_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<Term>& objective() const { return objective_; }
    const std::vector<Row>& rows() const { return rows_; }
    int num_rows() const { return static_cast<int>(rows_.size()); }

    int count_blocks(BlockKind kind) const;
    /// True if the objective names entry (i, j) of `block` (either triangle).
    bool objective_references(int block, int i, int j) const;

private:
    void check(const VarRef& v) const;

    Sense sense_;
    std::vector<Block> blocks_;
    std::vector<Term> objective_;
    std::vector<Row> rows_;
};

enum class Status
{
    optimal,
    infeasible,
    unbounded,
    max_iter,
    numerical_error,
    /// Stopped early; the returned iterate meets every tolerance within a
    /// factor of 100. Callers decide whether that is good enough.
    inaccurate
};

std::string to_string(Status s);

struct Tolerances
{
    double eq{1e-7};
    double cone{1e-7};
    double gap{1e-7};
    int max_iter{100};
    bool verbose{false};
};

struct Residuals
{
    /// |A x - b| / (1 + |b|)
    double equality{0};
    /// |c - A^T y - s| / (1 + |c|)
    double dual_equality{0};
    /// Largest violation of the primal cone constraints (>= 0).
    double cone{0};
    /// |primal - dual| / (1 + |primal| + |dual|)
    double gap{0};
};

struct ConicSolution
{
    Status status{Status::numerical_error};
    double primal_objective{0};
    double dual_objective{0};
    /// Primal values per block; free and SOC blocks are dim x 1.
    std::vector<Eigen::MatrixXd> values;
    /// Dual slacks per block, same layout as values.
    std::vector<Eigen::MatrixXd> slacks;
    /// One multiplier per equality row with c = A^T y + slack; the slack lies
    /// in the dual cone when minimizing and in its negative when maximizing.
    Eigen::VectorXd multipliers;
    Residuals residuals;
    int iterations{0};

    bool ok() const { return status == Status::optimal; }
    bool usable() const { return ok() || status == Status::inaccurate; }
    double value(const VarRef& v) const
    {
        return values[static_cast<std::size_t>(v.block)](v.i, v.j);
    }
};

///
/// Primal-dual interior-point method (Nesterov-Todd scaling, Mehrotra
/// predictor-corrector). Deterministic for identical input.
///
ConicSolution solve(const ConicProgram& prog, const Tolerances& tol = {});

/// [[Re H, -Im H], [Im H, Re H]] for Hermitian H.
RMatrix realify_hermitian(const CMatrix& h);

///
/// Inverse of realify_hermitian. For a real symmetric X that is not exactly
/// of realified form, returns the Hermitian matrix whose realification is
/// the closest structured matrix (block averaging).
///
CMatrix complexify(const RMatrix& x);

/// Writes the program in Conic Benchmark Format (CBF, version 3).
void write_cbf(const ConicProgram& prog, std::ostream& out);

} // namespace spectral::conic

#endif // SPECTRAL_CONIC_HPP

#include <spectral/conic.hpp>

#include <cmath>
#include <stdexcept>

namespace spectral::conic
{

int ConicProgram::add_free(int count)
{
    if (count < 1)
    {
        throw std::invalid_argument("add_free: count must be positive");
    }
    blocks_.push_back({BlockKind::free, count});
    return static_cast<int>(blocks_.size()) - 1;
}

int ConicProgram::add_soc(int dim)
{
    if (dim < 1)
    {
        throw std::invalid_argument("add_soc: dimension must be positive");
    }
    blocks_.push_back({BlockKind::soc, dim});
    return static_cast<int>(blocks_.size()) - 1;
}

int ConicProgram::add_psd(int dim)
{
    if (dim < 1)
    {
        throw std::invalid_argument("add_psd: dimension must be positive");
    }
    blocks_.push_back({BlockKind::psd, dim});
    return static_cast<int>(blocks_.size()) - 1;
}

VarRef ConicProgram::var(int block, int i) const
{
    VarRef v{block, i, 0};
    check(v);
    return v;
}

VarRef ConicProgram::entry(int block, int i, int j) const
{
    VarRef v{block, std::min(i, j), std::max(i, j)};
    check(v);
    return v;
}

void ConicProgram::check(const VarRef& v) const
{
    if (v.block < 0 || v.block >= static_cast<int>(blocks_.size()))
    {
        throw std::out_of_range("ConicProgram: unknown block");
    }
    const Block& b = blocks_[static_cast<std::size_t>(v.block)];
    const bool matrix = b.kind == BlockKind::psd;
    if (v.i < 0 || v.i >= b.dim || v.j < 0 || (matrix ? v.j >= b.dim : v.j != 0))
    {
        throw std::out_of_range("ConicProgram: variable index out of range");
    }
}

void ConicProgram::add_objective(VarRef v, double coef)
{
    check(v);
    if (!std::isfinite(coef))
    {
        throw std::invalid_argument("add_objective: non-finite coefficient");
    }
    objective_.push_back({v, coef});
}

int ConicProgram::add_row(std::vector<Term> terms, double rhs)
{
    for (const Term& t : terms)
    {
        check(t.var);
        if (!std::isfinite(t.coef))
        {
            throw std::invalid_argument("add_row: non-finite coefficient");
        }
    }
    if (!std::isfinite(rhs))
    {
        throw std::invalid_argument("add_row: non-finite right-hand side");
    }
    rows_.push_back({std::move(terms), rhs});
    return static_cast<int>(rows_.size()) - 1;
}

int ConicProgram::count_blocks(BlockKind kind) const
{
    int count = 0;
    for (const Block& b : blocks_)
    {
        count += b.kind == kind ? 1 : 0;
    }
    return count;
}

bool ConicProgram::objective_references(int block, int i, int j) const
{
    const int lo = std::min(i, j);
    const int hi = std::max(i, j);
    for (const Term& t : objective_)
    {
        const int tlo = std::min(t.var.i, t.var.j);
        const int thi = std::max(t.var.i, t.var.j);
        if (t.var.block == block && tlo == lo && thi == hi && t.coef != 0.0)
        {
            return true;
        }
    }
    return false;
}

std::string to_string(Status s)
{
    switch (s)
    {
    case Status::optimal:
        return "optimal";
    case Status::infeasible:
        return "infeasible";
    case Status::unbounded:
        return "unbounded";
    case Status::max_iter:
        return "max_iter";
    case Status::numerical_error:
        return "numerical_error";
    case Status::inaccurate:
        return "inaccurate";
    }
    return "unknown";
}

RMatrix realify_hermitian(const CMatrix& h)
{
    if (h.rows() != h.cols())
    {
        throw std::invalid_argument("realify_hermitian: matrix must be square");
    }
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    {
        throw std::invalid_argument("realify_hermitian: matrix is not Hermitian");
    }
    const Index d = h.rows();
    RMatrix out(2 * d, 2 * d);
    out.topLeftCorner(d, d)     = h.real();
    out.topRightCorner(d, d)    = -h.imag();
    out.bottomLeftCorner(d, d)  = h.imag();
    out.bottomRightCorner(d, d) = h.real();
    return out;
}

CMatrix complexify(const RMatrix& x)
{
    if (x.rows() != x.cols() || x.rows() % 2 != 0)
    {
        throw std::invalid_argument("complexify: expected an even square matrix");
    }
    const Index d = x.rows() / 2;
    const RMatrix re =
        0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
    const RMatrix im =
        0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
    CMatrix h(d, d);
    h.real() = 0.5 * (re + re.transpose());
    h.imag() = 0.5 * (im - im.transpose());
    return h;
}

} // namespace spectral::conic

#include <spectral/conic.hpp>

#include <iomanip>
#include <map>
#include <ostream>
#include <tuple>

namespace spectral::conic
{

namespace
{

// Scalar blocks (free, SOC) map to consecutive CBF scalar variables; PSD
// blocks map to PSDVAR entries in declaration order.
struct CbfIndex
{
    std::vector<int> scalar_offset;
    std::vector<int> psd_index;
    int n_scalar{0};
    int n_psd{0};
};

CbfIndex index_blocks(const ConicProgram& prog)
{
    CbfIndex ix;
    for (const Block& b : prog.blocks())
    {
        if (b.kind == BlockKind::psd)
        {
            ix.scalar_offset.push_back(-1);
            ix.psd_index.push_back(ix.n_psd++);
        }
        else
        {
            ix.scalar_offset.push_back(ix.n_scalar);
            ix.psd_index.push_back(-1);
            ix.n_scalar += b.dim;
        }
    }
    return ix;
}

// Lower-triangle coordinate with the off-diagonal coefficient halved, so
// that <F, X> reproduces coef * X_ij.
struct PsdCoord
{
    int block, i, j;
    bool operator<(const PsdCoord& o) const
    {
        return std::tie(block, i, j) < std::tie(o.block, o.i, o.j);
    }
};

void collect(const CbfIndex& ix, const std::vector<Term>& terms,
             std::map<int, double>& scalar, std::map<PsdCoord, double>& psd)
{
    for (const Term& t : terms)
    {
        const auto b = static_cast<std::size_t>(t.var.block);
        if (ix.psd_index[b] >= 0)
        {
            const int hi = std::max(t.var.i, t.var.j);
            const int lo = std::min(t.var.i, t.var.j);
            const double c = hi == lo ? t.coef : 0.5 * t.coef;
            psd[{ix.psd_index[b], hi, lo}] += c;
        }
        else
        {
            scalar[ix.scalar_offset[b] + t.var.i] += t.coef;
        }
    }
}

} // namespace

void write_cbf(const ConicProgram& prog, std::ostream& out)
{
    const CbfIndex ix = index_blocks(prog);
    out << std::setprecision(17);

    out << "VER\n3\n\n";
    out << "OBJSENSE\n" << (prog.sense() == Sense::minimize ? "MIN" : "MAX") << "\n\n";

    if (ix.n_psd > 0)
    {
        out << "PSDVAR\n" << ix.n_psd << "\n";
        for (const Block& b : prog.blocks())
        {
            if (b.kind == BlockKind::psd)
            {
                out << b.dim << "\n";
            }
        }
        out << "\n";
    }

    if (ix.n_scalar > 0)
    {
        int n_cones = 0;
        for (const Block& b : prog.blocks())
        {
            n_cones += b.kind == BlockKind::psd ? 0 : 1;
        }
        out << "VAR\n" << ix.n_scalar << " " << n_cones << "\n";
        for (const Block& b : prog.blocks())
        {
            if (b.kind == BlockKind::free)
            {
                out << "F " << b.dim << "\n";
            }
            else if (b.kind == BlockKind::soc)
            {
                out << "Q " << b.dim << "\n";
            }
        }
        out << "\n";
    }

    if (prog.num_rows() > 0)
    {
        out << "CON\n" << prog.num_rows() << " 1\nL= " << prog.num_rows() << "\n\n";
    }

    std::map<int, double> obj_scalar;
    std::map<PsdCoord, double> obj_psd;
    collect(ix, prog.objective(), obj_scalar, obj_psd);
    if (!obj_psd.empty())
    {
        out << "OBJFCOORD\n" << obj_psd.size() << "\n";
        for (const auto& [k, v] : obj_psd)
        {
            out << k.block << " " << k.i << " " << k.j << " " << v << "\n";
        }
        out << "\n";
    }
    if (!obj_scalar.empty())
    {
        out << "OBJACOORD\n" << obj_scalar.size() << "\n";
        for (const auto& [k, v] : obj_scalar)
        {
            out << k << " " << v << "\n";
        }
        out << "\n";
    }

    std::vector<std::tuple<int, PsdCoord, double>> fco;
    std::vector<std::tuple<int, int, double>> aco;
    std::vector<std::pair<int, double>> bco;
    for (int r = 0; r < prog.num_rows(); ++r)
    {
        const Row& row = prog.rows()[static_cast<std::size_t>(r)];
        std::map<int, double> s;
        std::map<PsdCoord, double> p;
        collect(ix, row.terms, s, p);
        for (const auto& [k, v] : p)
        {
            fco.emplace_back(r, k, v);
        }
        for (const auto& [k, v] : s)
        {
            aco.emplace_back(r, k, v);
        }
        if (row.rhs != 0.0)
        {
            bco.emplace_back(r, -row.rhs);
        }
    }
    if (!fco.empty())
    {
        out << "FCOORD\n" << fco.size() << "\n";
        for (const auto& [r, k, v] : fco)
        {
            out << r << " " << k.block << " " << k.i << " " << k.j << " " << v << "\n";
        }
        out << "\n";
    }
    if (!aco.empty())
    {
        out << "ACOORD\n" << aco.size() << "\n";
        for (const auto& [r, k, v] : aco)
        {
            out << r << " " << k << " " << v << "\n";
        }
        out << "\n";
    }
    if (!bco.empty())
    {
        out << "BCOORD\n" << bco.size() << "\n";
        for (const auto& [r, v] : bco)
        {
            out << r << " " << v << "\n";
        }
        out << "\n";
    }
}

} // namespace spectral::conic

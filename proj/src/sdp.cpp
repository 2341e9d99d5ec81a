#include <spectral/sdp.hpp>

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace spectral
{

using conic::ConicProgram;
using conic::Term;

double ArcCoefficients::weight(double f) const
{
    const double w = 2.0 * std::numbers::pi * f;
    return d0 + 2.0 * (d1.real() * std::cos(w) + d1.imag() * std::sin(w));
}

ArcCoefficients arc_coefficients(double f_lo, double f_hi)
{
    if (!(f_lo < f_hi))
    {
        throw std::invalid_argument("arc_coefficients: empty arc");
    }
    if (f_lo < 0.0 || f_hi > 1.0)
    {
        throw std::invalid_argument("arc_coefficients: arc outside [0, 1]");
    }
    if (std::abs(f_lo - 0.5) < 1e-9 || std::abs(f_hi - 0.5) < 1e-9)
    {
        throw std::invalid_argument("arc_coefficients: endpoint at 0.5");
    }
    if (f_lo < 0.5 && f_hi > 0.5)
    {
        throw std::invalid_argument("arc_coefficients: arc straddles 0.5");
    }

    // Arcs in the upper half use the branch of tan shifted by one period.
    const double shift = f_hi <= 0.5 ? 0.0 : 1.0;
    ArcCoefficients a;
    a.f_lo  = f_lo;
    a.f_hi  = f_hi;
    a.alpha = std::tan(std::numbers::pi * (f_lo - shift));
    a.beta  = std::tan(std::numbers::pi * (f_hi - shift));
    a.d0    = -(a.alpha * a.beta + 1.0) / 2.0;
    a.d1    = cdouble((1.0 - a.alpha * a.beta) / 4.0, (a.alpha + a.beta) / 4.0);
    return a;
}

cdouble trace_param(Index k, const ArcCoefficients& arc, const CMatrix& g_a,
                    const CMatrix& g_b)
{
    const Index n = g_a.rows();
    if (g_a.cols() != n || g_b.rows() != n - 1 || g_b.cols() != n - 1)
    {
        throw std::invalid_argument("trace_param: Gram matrix dimensions do not match");
    }
    if (k < 0 || k >= n)
    {
        throw std::invalid_argument("trace_param: offset out of range");
    }
    const cdouble t_a = ToeplitzSelector{k, n}.trace(g_a);
    if (n == 1)
    {
        return t_a;
    }
    return t_a + std::conj(arc.d1) * ToeplitzSelector{k - 1, n - 1}.trace(g_b) +
           arc.d0 * ToeplitzSelector{k, n - 1}.trace(g_b) +
           arc.d1 * ToeplitzSelector{k + 1, n - 1}.trace(g_b);
}

namespace
{

///
/// A complex-valued linear functional of realified Hermitian blocks,
/// accumulated as separate real and imaginary rows.
///
class Functional
{
public:
    void add(int block, Index dim, Index i, Index j, cdouble c)
    {
        // Re Z_ij = (X[i][j] + X[d+i][d+j]) / 2,
        // Im Z_ij = (X[d+i][j] - X[i][d+j]) / 2.
        const double cr = c.real();
        const double ci = c.imag();
        const auto ii = static_cast<int>(i);
        const auto jj = static_cast<int>(j);
        const auto dd = static_cast<int>(dim);
        put(re_, block, ii, jj, 0.5 * cr);
        put(re_, block, dd + ii, dd + jj, 0.5 * cr);
        put(re_, block, dd + ii, jj, -0.5 * ci);
        put(re_, block, ii, dd + jj, 0.5 * ci);
        put(im_, block, dd + ii, jj, 0.5 * cr);
        put(im_, block, ii, dd + jj, -0.5 * cr);
        put(im_, block, ii, jj, 0.5 * ci);
        put(im_, block, dd + ii, dd + jj, 0.5 * ci);
    }

    std::vector<Term> real_terms(const ConicProgram& p) const { return terms(p, re_); }
    std::vector<Term> imag_terms(const ConicProgram& p) const { return terms(p, im_); }

private:
    using Key = std::tuple<int, int, int>;

    static void put(std::map<Key, double>& m, int block, int i, int j, double v)
    {
        if (v != 0.0)
        {
            m[{block, std::min(i, j), std::max(i, j)}] += v;
        }
    }

    static std::vector<Term> terms(const ConicProgram& p, const std::map<Key, double>& m)
    {
        std::vector<Term> out;
        for (const auto& [key, v] : m)
        {
            if (std::abs(v) > 1e-15)
            {
                out.push_back({p.entry(std::get<0>(key), std::get<1>(key), std::get<2>(key)), v});
            }
        }
        return out;
    }

    std::map<Key, double> re_, im_;
};

/// Emits Re f = Re rhs and Im f = Im rhs, skipping rows that vanish identically.
void add_complex_rows(ConicProgram& p, const Functional& f, cdouble rhs)
{
    auto re = f.real_terms(p);
    auto im = f.imag_terms(p);
    if (!re.empty() || rhs.real() != 0.0)
    {
        p.add_row(std::move(re), rhs.real());
    }
    if (!im.empty() || rhs.imag() != 0.0)
    {
        p.add_row(std::move(im), rhs.imag());
    }
}

std::vector<bool> observed_mask(const SpectralInstance& inst)
{
    std::vector<bool> mask(static_cast<std::size_t>(inst.n), false);
    for (Index l : inst.obs_indices)
    {
        mask[static_cast<std::size_t>(l)] = true;
    }
    return mask;
}

/// Bordered block [[G, q], [q^H, 1]] with the corner fixed and q pinned off M.
int add_bordered_block(ConicProgram& p, Index n, const std::vector<bool>& observed)
{
    const Index d = n + 1;
    const int b   = p.add_psd(static_cast<int>(2 * d));
    Functional corner;
    corner.add(b, d, n, n, 1.0);
    p.add_row(corner.real_terms(p), 1.0);
    for (Index l = 0; l < n; ++l)
    {
        if (!observed[static_cast<std::size_t>(l)])
        {
            Functional pin;
            pin.add(b, d, l, n, 1.0);
            add_complex_rows(p, pin, 0.0);
        }
    }
    return b;
}

void add_objective(CertificateSdp& sdp, const SpectralInstance& inst)
{
    const Index d = sdp.n + 1;
    Functional obj;
    for (std::size_t t = 0; t < inst.obs_indices.size(); ++t)
    {
        obj.add(sdp.bordered_block, d, inst.obs_indices[t], sdp.n,
                std::conj(inst.obs_samples[t]));
    }
    for (const Term& t : obj.real_terms(sdp.program))
    {
        sdp.program.add_objective(t.var, t.coef);
    }
}

} // namespace

CertificateSdp build_standard_anm_sdp(const SpectralInstance& inst)
{
    const Index n = inst.n;
    const auto observed = observed_mask(inst);
    CertificateSdp sdp;
    sdp.n = n;
    ConicProgram& p = sdp.program;

    const int b   = add_bordered_block(p, n, observed);
    const Index d = n + 1;
    sdp.bordered_block     = b;
    sdp.trace_rows_per_arc = n;

    for (Index k = 0; k < n; ++k)
    {
        Functional f;
        for (Index j = 0; j + k < n; ++j)
        {
            f.add(b, d, j, j + k, 1.0);
        }
        add_complex_rows(p, f, k == 0 ? 1.0 : 0.0);
    }
    add_objective(sdp, inst);
    return sdp;
}

CertificateSdp build_block_sdp(const SpectralInstance& inst,
                               const FrequencyBlockSet& blocks)
{
    if (blocks.empty())
    {
        throw std::invalid_argument("build_block_sdp: empty block set");
    }
    if (blocks.is_full_band())
    {
        return build_standard_anm_sdp(inst);
    }
    const Index n = inst.n;
    if (n < 2)
    {
        throw std::invalid_argument("build_block_sdp: signal length must be at least 2");
    }
    const auto observed = observed_mask(inst);

    CertificateSdp sdp;
    sdp.n = n;
    sdp.trace_rows_per_arc = n;
    ConicProgram& p = sdp.program;
    const Index da = n + 1;
    const Index db = n - 1;

    const FrequencyBlockSet pieces = blocks.split_at_half();
    for (const Arc& arc : pieces.arcs())
    {
        const ArcCoefficients coef = arc_coefficients(arc.lo, arc.hi);
        sdp.arcs.push_back(coef);

        // Scaling the weight by a positive constant only rescales G_b; it keeps
        // arcs near 0.5 (large tangents) well conditioned.
        const double scale = 1.0 / std::max(1.0, std::max(std::abs(coef.d0), std::abs(coef.d1)));
        const double d0    = scale * coef.d0;
        const cdouble d1   = scale * coef.d1;

        const int ba = add_bordered_block(p, n, observed);
        const int bb = p.add_psd(static_cast<int>(2 * db));
        if (sdp.bordered_block < 0)
        {
            sdp.bordered_block = ba;
        }
        else
        {
            for (Index l : inst.obs_indices)
            {
                Functional link;
                link.add(ba, da, l, n, 1.0);
                link.add(sdp.bordered_block, da, l, n, -1.0);
                add_complex_rows(p, link, 0.0);
            }
        }

        for (Index k = 0; k < n; ++k)
        {
            Functional f;
            for (Index j = 0; j + k < n; ++j)
            {
                f.add(ba, da, j, j + k, 1.0);
            }
            // Offsets k - 1, k, k + 1 of G_b, weighted conj(d1), d0, d1.
            const std::pair<Index, cdouble> parts[] = {
                {k - 1, std::conj(d1)}, {k, d0}, {k + 1, d1}};
            for (const auto& [off, c] : parts)
            {
                for (Index j = 0; j < db; ++j)
                {
                    if (j + off >= 0 && j + off < db)
                    {
                        f.add(bb, db, j, j + off, c);
                    }
                }
            }
            add_complex_rows(p, f, k == 0 ? 1.0 : 0.0);
        }
    }
    add_objective(sdp, inst);
    return sdp;
}

CVector extract_q(const CertificateSdp& sdp, const conic::ConicSolution& sol)
{
    const CMatrix z =
        conic::complexify(sol.values[static_cast<std::size_t>(sdp.bordered_block)]);
    return z.col(sdp.n).head(sdp.n);
}

} // namespace spectral

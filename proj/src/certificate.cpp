#include <spectral/certificate.hpp>

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

namespace spectral
{

RVector dual_poly_modulus_grid(const CVector& q, Index grid_size)
{
    RVector out(grid_size);
    for (Index g = 0; g < grid_size; ++g)
    {
        const double f = static_cast<double>(g) / static_cast<double>(grid_size);
        out(g) = std::abs(dual_poly_eval(q, f));
    }
    return out;
}

double max_modulus_on_domain(const DualCertificate& cert, Index grid_size)
{
    const RVector m = dual_poly_modulus_grid(cert.q, grid_size);
    double best = 0.0;
    for (Index g = 0; g < grid_size; ++g)
    {
        const double f = static_cast<double>(g) / static_cast<double>(grid_size);
        if (cert.domain.contains(f))
        {
            best = std::max(best, m(g));
        }
    }
    return best;
}

Index default_grid_size(Index n)
{
    return std::max<Index>(Index{1} << 14, 8 * n);
}

namespace
{

double golden_max(const CVector& q, double lo, double hi)
{
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto val = [&](double f) { return std::norm(dual_poly_eval(q, f)); };
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = val(c);
    double fd = val(d);
    while (b - a > 1e-10)
    {
        if (fc >= fd)
        {
            b  = d;
            d  = c;
            fd = fc;
            c  = b - inv_phi * (b - a);
            fc = val(c);
        }
        else
        {
            a  = c;
            c  = d;
            fc = fd;
            d  = a + inv_phi * (b - a);
            fd = val(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

std::vector<double> locate_peaks(const DualCertificate& cert, Index grid_size,
                                 double peak_tol)
{
    std::vector<double> peaks;
    if (cert.q.size() == 0 || grid_size < 3)
    {
        return peaks;
    }
    const RVector m   = dual_poly_modulus_grid(cert.q, grid_size);
    const double step = 1.0 / static_cast<double>(grid_size);
    const bool full   = cert.domain.is_full_band();

    for (Index g = 0; g < grid_size; ++g)
    {
        const double f   = static_cast<double>(g) * step;
        const Index left = (g + grid_size - 1) % grid_size;
        const Index right = (g + 1) % grid_size;
        if (m(g) < 1.0 - peak_tol || m(g) < m(left) || m(g) <= m(right) ||
            !cert.domain.contains(f))
        {
            continue;
        }
        double lo = f - step;
        double hi = f + step;
        if (!full)
        {
            for (const Arc& arc : cert.domain.arcs())
            {
                if (arc.contains(f))
                {
                    lo = std::max(lo, arc.lo);
                    hi = std::min(hi, arc.hi);
                    break;
                }
            }
        }
        peaks.push_back(wrap_frequency(golden_max(cert.q, lo, hi)));
    }

    std::sort(peaks.begin(), peaks.end());
    std::vector<double> merged;
    for (double p : peaks)
    {
        if (merged.empty() || circular_distance(p, merged.back()) > 1e-8)
        {
            merged.push_back(p);
        }
    }
    if (merged.size() > 1 && circular_distance(merged.front(), merged.back()) <= 1e-8)
    {
        merged.pop_back();
    }
    return merged;
}

CoefficientFit recover_coeffs(const SpectralInstance& inst,
                              const std::vector<double>& freqs)
{
    const CVector x = inst.observations();
    CoefficientFit fit;
    const auto k = static_cast<Index>(freqs.size());
    if (k == 0)
    {
        fit.coeffs.resize(0);
        fit.residual = x.norm();
        return fit;
    }
    CMatrix a(inst.m(), k);
    for (Index j = 0; j < k; ++j)
    {
        const FrequencyAtom<double> atom{freqs[static_cast<std::size_t>(j)], inst.n};
        for (Index t = 0; t < inst.m(); ++t)
        {
            a(t, j) = atom(inst.obs_indices[static_cast<std::size_t>(t)]);
        }
    }
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(a);
    fit.coeffs         = cod.solve(x);
    fit.residual       = (a * fit.coeffs - x).norm();
    fit.rank_deficient = cod.rank() < k;
    return fit;
}

} // namespace spectral

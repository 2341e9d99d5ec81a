#include <spectral/l1.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spectral
{

GridState init_grid(Index p, Index q_stride)
{
    if (p < 1 || q_stride < 1)
    {
        throw std::invalid_argument("init_grid: p and q_stride must be positive");
    }
    GridState s;
    s.p        = p;
    s.q_stride = q_stride;
    for (Index j = 1; j <= p; j += q_stride)
    {
        s.active.push_back(j);
    }
    s.weights = RVector::Ones(p);
    s.coeffs  = CVector::Zero(p);
    return s;
}

WeightedL1Solution solve_weighted_l1(const SpectralInstance& inst,
                                     const GridState& state,
                                     const conic::Tolerances& tol)
{
    if (state.active.empty())
    {
        throw std::invalid_argument("solve_weighted_l1: empty active set");
    }
    using conic::Term;
    conic::ConicProgram prog(conic::Sense::minimize);

    const auto K = state.active.size();
    std::vector<int> cones(K);
    for (std::size_t a = 0; a < K; ++a)
    {
        cones[a] = prog.add_soc(3);
        const Index j = state.active[a];
        prog.add_objective(prog.var(cones[a], 0), state.weights(j - 1));
    }

    // z_a = u_a + i v_a;  Re/Im of sum_a e^{i theta} z_a equal Re/Im x_l.
    for (std::size_t t = 0; t < inst.obs_indices.size(); ++t)
    {
        const auto l = static_cast<double>(inst.obs_indices[t]);
        std::vector<Term> re, im;
        re.reserve(2 * K);
        im.reserve(2 * K);
        for (std::size_t a = 0; a < K; ++a)
        {
            const double theta = 2.0 * std::numbers::pi * state.frequency(state.active[a]) * l;
            const double c     = std::cos(theta);
            const double s     = std::sin(theta);
            re.push_back({prog.var(cones[a], 1), c});
            re.push_back({prog.var(cones[a], 2), -s});
            im.push_back({prog.var(cones[a], 1), s});
            im.push_back({prog.var(cones[a], 2), c});
        }
        prog.add_row(std::move(re), inst.obs_samples[t].real());
        prog.add_row(std::move(im), inst.obs_samples[t].imag());
    }

    const conic::ConicSolution sol = conic::solve(prog, tol);
    WeightedL1Solution out;
    out.status    = sol.status;
    out.objective = sol.primal_objective;
    out.z.resize(static_cast<Index>(K));
    for (std::size_t a = 0; a < K; ++a)
    {
        out.z(static_cast<Index>(a)) = cdouble(sol.value(prog.var(cones[a], 1)),
                                               sol.value(prog.var(cones[a], 2)));
    }
    out.multipliers.resize(inst.m());
    for (Index t = 0; t < inst.m(); ++t)
    {
        out.multipliers(t) = cdouble(sol.multipliers(2 * t), sol.multipliers(2 * t + 1));
    }
    return out;
}

std::vector<Index> block_indices(Index i, Index p, Index b, bool circular)
{
    if (b < 0 || b % 2 != 0)
    {
        throw std::invalid_argument("block_indices: block width must be even and nonnegative");
    }
    std::vector<Index> out;
    const Index h = b / 2;
    if (circular)
    {
        for (Index j = i - h; j <= i + h; ++j)
        {
            out.push_back(((j - 1) % p + p) % p + 1);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    for (Index j = std::max<Index>(1, i - h); j <= std::min(p, i + h); ++j)
    {
        out.push_back(j);
    }
    return out;
}

RVector update_weights(const CVector& coeffs, Index b, double epsilon, bool circular)
{
    if (!(epsilon > 0.0))
    {
        throw std::invalid_argument("update_weights: epsilon must be positive");
    }
    if (b < 0 || b % 2 != 0)
    {
        throw std::invalid_argument("update_weights: block width must be even and nonnegative");
    }
    const Index p = coeffs.size();
    const Index h = b / 2;
    const RVector mag = coeffs.cwiseAbs();
    RVector w(p);
    if (circular && b + 1 >= p)
    {
        w.setConstant(1.0 / (mag.sum() + epsilon));
        return w;
    }
    // prefix(j) = sum of mag over positions < j (0-based).
    RVector prefix(p + 1);
    prefix(0) = 0.0;
    for (Index j = 0; j < p; ++j)
    {
        prefix(j + 1) = prefix(j) + mag(j);
    }
    auto range = [&](Index lo, Index hi) { return prefix(hi + 1) - prefix(lo); };
    for (Index i = 0; i < p; ++i)
    {
        double mass = 0.0;
        if (circular)
        {
            const Index lo = i - h;
            const Index hi = i + h;
            if (lo < 0)
            {
                mass = range(0, hi) + range(p + lo, p - 1);
            }
            else if (hi >= p)
            {
                mass = range(lo, p - 1) + range(0, hi - p);
            }
            else
            {
                mass = range(lo, hi);
            }
        }
        else
        {
            mass = range(std::max<Index>(0, i - h), std::min(p - 1, i + h));
        }
        // Prefix differences can leave tiny negative residue.
        w(i) = 1.0 / (std::max(mass, 0.0) + epsilon);
    }
    return w;
}

double w_mid(const RVector& weights)
{
    if (weights.size() == 0)
    {
        throw std::invalid_argument("w_mid: empty weights");
    }
    return 0.5 * (weights.minCoeff() + weights.maxCoeff());
}

std::vector<Index> low_weight_indices(const RVector& weights)
{
    const double mid = w_mid(weights);
    std::vector<Index> out;
    for (Index i = 0; i < weights.size(); ++i)
    {
        if (weights(i) < mid)
        {
            out.push_back(i + 1);
        }
    }
    return out;
}

std::vector<Index> refine_grid(const std::vector<Index>& active,
                               const RVector& new_weights, Index b, bool circular)
{
    const Index p = new_weights.size();
    std::vector<bool> mark(static_cast<std::size_t>(p), false);
    for (Index j : active)
    {
        mark[static_cast<std::size_t>(j - 1)] = true;
    }
    for (Index i : low_weight_indices(new_weights))
    {
        for (Index j : block_indices(i, p, b, circular))
        {
            mark[static_cast<std::size_t>(j - 1)] = true;
        }
    }
    std::vector<Index> out;
    for (Index j = 0; j < p; ++j)
    {
        if (mark[static_cast<std::size_t>(j)])
        {
            out.push_back(j + 1);
        }
    }
    return out;
}

bool converged(const CVector& prev, const CVector& cur, double eps_err)
{
    if (prev.size() != cur.size())
    {
        throw std::invalid_argument("converged: length mismatch");
    }
    return (prev - cur).norm() < eps_err;
}

} // namespace spectral

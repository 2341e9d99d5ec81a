#include <spectral/recovery.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <spectral/l1.hpp>
#include <spectral/sdp.hpp>

namespace spectral
{

std::string to_string(Method m)
{
    switch (m)
    {
    case Method::anm:
        return "anm";
    case Method::banm:
        return "banm";
    case Method::banm_mix:
        return "banm-mix";
    case Method::bl1m:
        return "bl1m";
    }
    return "unknown";
}

Method parse_method(const std::string& name)
{
    if (name == "anm")
    {
        return Method::anm;
    }
    if (name == "banm")
    {
        return Method::banm;
    }
    if (name == "banm-mix" || name == "banm_mix")
    {
        return Method::banm_mix;
    }
    if (name == "bl1m")
    {
        return Method::bl1m;
    }
    throw std::invalid_argument("unknown method '" + name + "'");
}

double default_tau(Index n, const GridParams& grid)
{
    return std::max(1.0 / static_cast<double>(n),
                    static_cast<double>(grid.b) / (2.0 * static_cast<double>(grid.p)));
}

std::optional<double> weighted_centroid(std::span<const double> freqs,
                                        std::span<const double> magnitudes)
{
    double mass = 0.0;
    double acc  = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i)
    {
        mass += magnitudes[i];
        acc += freqs[i] * magnitudes[i];
    }
    if (!(mass > 0.0))
    {
        return std::nullopt;
    }
    return acc / mass;
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() && b.empty())
    {
        return 0.0;
    }
    if (a.empty() || b.empty())
    {
        return std::numeric_limits<double>::infinity();
    }
    auto directed = [](std::span<const double> x, std::span<const double> y) {
        double worst = 0.0;
        for (double u : x)
        {
            double near = 1.0;
            for (double v : y)
            {
                near = std::min(near, circular_distance(u, v));
            }
            worst = std::max(worst, near);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

namespace
{

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Index peak_grid(const SpectralInstance& inst, const RecoveryOptions& opt)
{
    return opt.peak_grid > 0 ? opt.peak_grid : default_grid_size(inst.n);
}

/// Fit amplitudes, drop negligible components, refit; output sorted by f.
void fit_and_prune(const SpectralInstance& inst, std::vector<double> freqs,
                   const RecoveryOptions& opt, RecoveryResult& out)
{
    CoefficientFit fit = recover_coeffs(inst, freqs);
    if (!freqs.empty() && opt.prune_fraction > 0.0)
    {
        const double top = fit.coeffs.cwiseAbs().maxCoeff();
        std::vector<double> kept;
        for (std::size_t j = 0; j < freqs.size(); ++j)
        {
            if (std::abs(fit.coeffs(static_cast<Index>(j))) >= opt.prune_fraction * top)
            {
                kept.push_back(freqs[j]);
            }
        }
        if (kept.size() != freqs.size())
        {
            out.notes.push_back("pruned " + std::to_string(freqs.size() - kept.size()) +
                                " negligible component(s)");
            freqs = std::move(kept);
            fit   = recover_coeffs(inst, freqs);
        }
    }
    if (fit.rank_deficient)
    {
        out.notes.push_back("coefficient fit is rank deficient");
    }
    std::vector<std::size_t> order(freqs.size());
    for (std::size_t j = 0; j < order.size(); ++j)
    {
        order[j] = j;
    }
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return freqs[a] < freqs[b]; });
    out.est_freqs.clear();
    out.est_coeffs.clear();
    for (std::size_t j : order)
    {
        out.est_freqs.push_back(freqs[j]);
        out.est_coeffs.push_back(fit.coeffs(static_cast<Index>(j)));
    }
    out.fit_residual = fit.residual;
}

struct SdpOutcome
{
    bool solved{false};
    std::string status;
    std::vector<double> freqs;
    double objective{0};
};

SdpOutcome solve_certificate(const SpectralInstance& inst,
                             const FrequencyBlockSet& blocks,
                             const RecoveryOptions& opt)
{
    const CertificateSdp sdp = blocks.is_full_band() ? build_standard_anm_sdp(inst)
                                                     : build_block_sdp(inst, blocks);
    const conic::ConicSolution sol = conic::solve(sdp.program, opt.tol);
    SdpOutcome out;
    out.status = conic::to_string(sol.status);
    if (!sol.usable())
    {
        return out;
    }
    out.solved    = true;
    out.objective = sol.primal_objective;
    DualCertificate cert{extract_q(sdp, sol), blocks};
    out.freqs = locate_peaks(cert, peak_grid(inst, opt), opt.peak_tol);
    return out;
}

bool is_zero_signal(const SpectralInstance& inst)
{
    return std::all_of(inst.obs_samples.begin(), inst.obs_samples.end(),
                       [](const cdouble& x) { return x == cdouble(0.0); });
}

/// Iterations of reweighted l1 with adaptive gridding.
struct L1Loop
{
    GridState state;
    RVector next_weights;
    int iterations{0};
    bool converged{false};
    bool failed{false};
    std::string failure;
};

L1Loop run_l1_loop(const SpectralInstance& inst, const RecoveryOptions& opt,
                   RecoveryResult& out)
{
    const GridParams& g = opt.grid;
    if (g.max_itr < 1)
    {
        throw std::invalid_argument("max_itr must be at least 1");
    }
    L1Loop loop;
    loop.state = init_grid(g.p, g.q_stride);
    for (int t = 1; t <= g.max_itr; ++t)
    {
        GridState& s = loop.state;
        const WeightedL1Solution sol = solve_weighted_l1(inst, s, opt.tol);
        loop.iterations = t;
        if (!sol.usable())
        {
            loop.failed  = true;
            loop.failure = "l1 solve " + conic::to_string(sol.status) +
                           " at iteration " + std::to_string(t);
            if (t == 1)
            {
                return loop;
            }
            // Keep the previous iterate and its weights.
            loop.next_weights = update_weights(s.coeffs, g.b, g.epsilon, g.circular_blocks);
            return loop;
        }
        CVector c = CVector::Zero(g.p);
        for (std::size_t a = 0; a < s.active.size(); ++a)
        {
            c(s.active[a] - 1) = sol.z(static_cast<Index>(a));
        }
        loop.next_weights = update_weights(c, g.b, g.epsilon, g.circular_blocks);
        const bool done   = converged(s.coeffs, c, g.eps_err);
        s.coeffs    = std::move(c);
        s.iteration = t;
        out.history.push_back({FrequencyBlockSet{}, static_cast<Index>(s.active.size()), {}});
        if (done)
        {
            loop.converged = true;
            return loop;
        }
        if (t < g.max_itr)
        {
            s.active  = refine_grid(s.active, loop.next_weights, g.b, g.circular_blocks);
            s.weights = loop.next_weights;
        }
    }
    return loop;
}

} // namespace

RecoveryResult run_anm(const SpectralInstance& inst, const RecoveryOptions& opt)
{
    const auto start = Clock::now();
    RecoveryResult out;
    out.method     = Method::anm;
    out.iterations = 1;
    const FrequencyBlockSet band = FrequencyBlockSet::full_band();
    const SdpOutcome sdp = solve_certificate(inst, band, opt);
    out.history.push_back({band, 0, sdp.freqs});
    if (!sdp.solved)
    {
        out.ok     = false;
        out.status = "solver_failure";
        out.notes.push_back("SDP status " + sdp.status);
        out.seconds = elapsed(start);
        return out;
    }
    if (sdp.status != "optimal")
    {
        out.notes.push_back("SDP status " + sdp.status);
    }
    out.dual_objective = sdp.objective;
    fit_and_prune(inst, sdp.freqs, opt, out);
    out.ok      = true;
    out.status  = "ok";
    out.seconds = elapsed(start);
    return out;
}

namespace
{

std::vector<double> select_centers(const RecoveryResult& r, const BanmParams& p)
{
    std::vector<std::size_t> idx(r.est_freqs.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
    {
        idx[j] = j;
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(r.est_coeffs[a]) > std::abs(r.est_coeffs[b]);
    });
    std::vector<double> out;
    if (idx.empty())
    {
        return out;
    }
    const double top = std::abs(r.est_coeffs[idx.front()]);
    for (std::size_t rank = 0; rank < idx.size(); ++rank)
    {
        const std::size_t j = idx[rank];
        if (p.l_fixed ? static_cast<Index>(rank) < *p.l_fixed
                      : std::abs(r.est_coeffs[j]) >= p.gamma * top)
        {
            out.push_back(r.est_freqs[j]);
        }
    }
    return out;
}

} // namespace

RecoveryResult run_banm(const SpectralInstance& inst, const RecoveryOptions& opt)
{
    const auto start = Clock::now();
    if (opt.banm.max_iter < 1)
    {
        throw std::invalid_argument("banm: max_iter must be at least 1");
    }
    RecoveryResult out = run_anm(inst, opt);
    out.method = Method::banm;
    if (!out.ok)
    {
        out.seconds = elapsed(start);
        return out;
    }
    const double tau = opt.banm.tau > 0.0 ? opt.banm.tau : default_tau(inst.n, opt.grid);

    for (int it = 1; it <= opt.banm.max_iter; ++it)
    {
        const std::vector<double> centers = select_centers(out, opt.banm);
        if (centers.empty())
        {
            out.notes.push_back("no peaks to build blocks from; keeping full-band result");
            out.status = "no_peaks";
            break;
        }
        const FrequencyBlockSet blocks = FrequencyBlockSet::around(centers, tau);
        const SdpOutcome sdp = solve_certificate(inst, blocks, opt);
        out.history.push_back({blocks, 0, sdp.freqs});
        if (!sdp.solved || sdp.freqs.empty())
        {
            out.notes.push_back("block SDP at iteration " + std::to_string(it) +
                                (sdp.solved ? " found no peaks" : " status " + sdp.status) +
                                "; keeping previous estimate");
            break;
        }
        const std::vector<double> previous = out.est_freqs;
        out.dual_objective = sdp.objective;
        out.iterations     = it + 1;
        fit_and_prune(inst, sdp.freqs, opt, out);
        if (hausdorff_distance(previous, out.est_freqs) < opt.banm.move_tol)
        {
            break;
        }
    }
    out.seconds = elapsed(start);
    return out;
}

RecoveryResult run_banm_mix(const SpectralInstance& inst, const RecoveryOptions& opt)
{
    const auto start = Clock::now();
    RecoveryResult out;
    out.method = Method::banm_mix;
    if (is_zero_signal(inst))
    {
        out.ok      = true;
        out.seconds = elapsed(start);
        return out;
    }

    const L1Loop loop = run_l1_loop(inst, opt, out);
    out.iterations    = loop.iterations;
    if (loop.failed)
    {
        out.notes.push_back(loop.failure);
        if (loop.state.iteration == 0)
        {
            out.ok      = false;
            out.status  = "solver_failure";
            out.seconds = elapsed(start);
            return out;
        }
    }
    if (!loop.converged)
    {
        out.notes.push_back("l1 loop did not converge; using final weights");
    }

    std::vector<double> centers;
    for (Index i : low_weight_indices(loop.next_weights))
    {
        centers.push_back(loop.state.frequency(i));
    }
    if (centers.empty())
    {
        out.ok      = false;
        out.status  = "empty_blocks";
        out.seconds = elapsed(start);
        return out;
    }
    const double tau = opt.banm.tau > 0.0 ? opt.banm.tau : default_tau(inst.n, opt.grid);
    const FrequencyBlockSet blocks = FrequencyBlockSet::around(centers, tau);
    const SdpOutcome sdp = solve_certificate(inst, blocks, opt);
    out.history.push_back({blocks, 0, sdp.freqs});
    if (!sdp.solved)
    {
        out.ok     = false;
        out.status = "solver_failure";
        out.notes.push_back("block SDP status " + sdp.status);
        out.seconds = elapsed(start);
        return out;
    }
    if (sdp.status != "optimal")
    {
        out.notes.push_back("block SDP status " + sdp.status);
    }
    out.dual_objective = sdp.objective;
    fit_and_prune(inst, sdp.freqs, opt, out);
    out.ok      = true;
    out.status  = "ok";
    out.seconds = elapsed(start);
    return out;
}

RecoveryResult run_bl1m(const SpectralInstance& inst, const RecoveryOptions& opt)
{
    const auto start = Clock::now();
    RecoveryResult out;
    out.method = Method::bl1m;
    if (is_zero_signal(inst))
    {
        out.ok      = true;
        out.seconds = elapsed(start);
        return out;
    }

    const L1Loop loop = run_l1_loop(inst, opt, out);
    out.iterations    = loop.iterations;
    if (loop.failed)
    {
        out.notes.push_back(loop.failure);
        if (loop.state.iteration == 0)
        {
            out.ok      = false;
            out.status  = "solver_failure";
            out.seconds = elapsed(start);
            return out;
        }
    }
    if (!loop.converged)
    {
        out.notes.push_back("l1 loop did not converge; using final weights");
    }

    const GridState& s = loop.state;
    const Index p      = s.p;
    const Index h      = opt.grid.b / 2;

    // Merge overlapping index blocks into runs [lo, hi] (1-based, may exceed
    // 1..p only when blocks wrap).
    std::vector<std::pair<Index, Index>> runs;
    for (Index i : low_weight_indices(loop.next_weights))
    {
        Index lo = i - h;
        Index hi = i + h;
        if (!opt.grid.circular_blocks)
        {
            lo = std::max<Index>(1, lo);
            hi = std::min(p, hi);
        }
        if (!runs.empty() && lo <= runs.back().second)
        {
            runs.back().second = std::max(runs.back().second, hi);
        }
        else
        {
            runs.emplace_back(lo, hi);
        }
    }
    if (opt.grid.circular_blocks && runs.size() > 1 &&
        runs.back().second - p >= runs.front().first)
    {
        runs.front().first = runs.back().first - p;
        runs.front().second = std::max(runs.front().second, runs.back().second - p);
        runs.pop_back();
    }

    std::vector<double> freqs;
    std::vector<double> members;
    std::vector<double> mags;
    int dropped = 0;
    for (const auto& [lo, hi] : runs)
    {
        members.clear();
        mags.clear();
        for (Index j = lo; j <= hi; ++j)
        {
            const Index wrapped = ((j - 1) % p + p) % p + 1;
            // Unwrapped frequency keeps the centroid continuous across the seam.
            members.push_back(static_cast<double>(j - 1) / static_cast<double>(p));
            mags.push_back(std::abs(s.coeffs(wrapped - 1)));
        }
        if (hi - lo + 1 > 2 * opt.grid.b + 1)
        {
            out.notes.push_back("merged block spans " + std::to_string(hi - lo + 1) +
                                " grid points; it may hold more than one frequency");
        }
        const auto f = weighted_centroid(members, mags);
        if (!f)
        {
            ++dropped;
            continue;
        }
        freqs.push_back(wrap_frequency(*f));
    }
    if (dropped > 0)
    {
        out.notes.push_back("dropped " + std::to_string(dropped) + " block(s) with zero mass");
    }
    out.history.push_back({FrequencyBlockSet{}, 0, freqs});
    fit_and_prune(inst, freqs, opt, out);
    out.ok      = true;
    out.status  = "ok";
    out.seconds = elapsed(start);
    return out;
}

RecoveryResult run_method(Method m, const SpectralInstance& inst,
                          const RecoveryOptions& opt)
{
    switch (m)
    {
    case Method::anm:
        return run_anm(inst, opt);
    case Method::banm:
        return run_banm(inst, opt);
    case Method::banm_mix:
        return run_banm_mix(inst, opt);
    case Method::bl1m:
        return run_bl1m(inst, opt);
    }
    throw std::invalid_argument("unknown method");
}

} // namespace spectral

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails. Pass criterion numbers as
// arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <spectral/bench.hpp>
#include <spectral/certificate.hpp>
#include <spectral/conic.hpp>
#include <spectral/l1.hpp>
#include <spectral/recovery.hpp>
#include <spectral/rng.hpp>
#include <spectral/sdp.hpp>

#include "oracles.hpp"

using namespace spectral;

namespace
{

struct Outcome
{
    bool pass{false};
    std::string detail;
};

std::string num(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

// Dual feasibility of solved certificates on a 2^14 grid.
Outcome dual_feasibility()
{
    constexpr Index grid = Index{1} << 14;
    constexpr double bound = 1.005;
    double worst = 0.0;
    int solved = 0;
    int total = 0;
    for (int t = 0; t < 10; ++t)
    {
        const SpectralInstance inst = random_instance(32, 2, 24, 7000 + t);

        const CertificateSdp anm = build_standard_anm_sdp(inst);
        const conic::ConicSolution s = conic::solve(anm.program);
        total += 1;
        if (s.usable())
        {
            solved += 1;
            worst = std::max(worst, max_modulus_on_domain({extract_q(anm, s)}, grid));
        }

        const FrequencyBlockSet blocks = FrequencyBlockSet::around(inst.freqs, 1.0 / 32.0);
        const CertificateSdp blk = build_block_sdp(inst, blocks);
        const conic::ConicSolution b = conic::solve(blk.program);
        total += 1;
        if (b.usable())
        {
            solved += 1;
            worst = std::max(worst,
                             max_modulus_on_domain({extract_q(blk, b), blocks}, grid));
        }
    }
    return {solved > 0 && worst <= bound,
            std::to_string(solved) + "/" + std::to_string(total) +
                " certificates solved, max |Q| = " + num(worst)};
}

struct SmokeTrial
{
    bool success{false};
    double dual_objective{0};
    double coeff_l1{0};
};

std::vector<SmokeTrial>& smoke_trials()
{
    static std::vector<SmokeTrial> trials = [] {
        std::vector<SmokeTrial> out;
        for (int t = 0; t < 20; ++t)
        {
            const SpectralInstance inst = random_instance(32, 3, 24, 8000 + t, 2.0 / 32.0);
            const RecoveryResult r = run_anm(inst);
            SmokeTrial s;
            s.success = r.ok && success_metric(inst.freqs, r.est_freqs).success;
            s.dual_objective = r.dual_objective;
            for (const cdouble& c : r.est_coeffs)
            {
                s.coeff_l1 += std::abs(c);
            }
            out.push_back(s);
        }
        return out;
    }();
    return trials;
}

// Exact recovery of well-separated tones.
Outcome recovery_smoke()
{
    const auto& trials = smoke_trials();
    const auto hits = std::count_if(trials.begin(), trials.end(),
                                    [](const SmokeTrial& s) { return s.success; });
    const double rate = double(hits) / double(trials.size());
    return {rate >= 0.9, "success rate " + num(rate) + " (" + std::to_string(hits) + "/" +
                             std::to_string(trials.size()) + ")"};
}

// Primal and dual optima agree on the recovered trials.
Outcome strong_duality()
{
    double worst = 0.0;
    int checked = 0;
    for (const SmokeTrial& s : smoke_trials())
    {
        if (!s.success)
        {
            continue;
        }
        checked += 1;
        worst = std::max(worst, std::abs(s.dual_objective - s.coeff_l1) / s.coeff_l1);
    }
    return {checked > 0 && worst <= 1e-3,
            std::to_string(checked) + " trials, max relative gap " + num(worst)};
}

CMatrix observed_dictionary(const SpectralInstance& inst, const GridState& g)
{
    CMatrix a(inst.m(), static_cast<Index>(g.active.size()));
    for (std::size_t j = 0; j < g.active.size(); ++j)
    {
        const double f = g.frequency(g.active[j]);
        for (Index t = 0; t < inst.m(); ++t)
        {
            const double l = double(inst.obs_indices[static_cast<std::size_t>(t)]);
            a(t, static_cast<Index>(j)) = std::polar(1.0, 2.0 * std::numbers::pi * f * l);
        }
    }
    return a;
}

// Optimality conditions of the weighted l1 solver plus an ADMM re-solve.
Outcome l1_optimality()
{
    Rng rng(4242);
    conic::Tolerances tight;
    tight.eq = tight.cone = tight.gap = 1e-10;
    int violations = 0;
    int unsolved = 0;
    double worst_admm = 0.0;
    for (int t = 0; t < 25; ++t)
    {
        const Index m = 8 + static_cast<Index>(rng.below(9));
        const Index n = m + 8;
        const Index p = 32 + 16 * static_cast<Index>(rng.below(3));
        const Index k = 1 + static_cast<Index>(rng.below(3));
        const SpectralInstance inst = random_instance(n, k, m, 9000 + t);

        GridState g = init_grid(p, 1);
        for (Index j = 0; j < p; ++j)
        {
            g.weights(j) = 0.5 + rng.uniform();
        }
        std::vector<Index> active;
        for (Index j = 1; j <= p; ++j)
        {
            if (rng.uniform() < 0.75)
            {
                active.push_back(j);
            }
        }
        if (static_cast<Index>(active.size()) >= m)
        {
            g.active = active;
        }

        const WeightedL1Solution s = solve_weighted_l1(inst, g, tight);
        if (!s.usable())
        {
            unsolved += 1;
            continue;
        }
        const CMatrix a = observed_dictionary(inst, g);
        RVector wa(static_cast<Index>(g.active.size()));
        for (std::size_t j = 0; j < g.active.size(); ++j)
        {
            const auto col = static_cast<Index>(j);
            const double w = g.weights(g.active[j] - 1);
            wa(col) = w;
            const double corr = std::abs(a.col(col).dot(s.multipliers));
            if (corr > w * (1.0 + 1e-4))
            {
                violations += 1;
            }
            if (std::abs(s.z(col)) > 1e-6 && corr < w * (1.0 - 1e-3))
            {
                violations += 1;
            }
        }
        if (t < 3)
        {
            const auto ref = oracle::weighted_l1_admm(a, inst.observations(), wa);
            worst_admm = std::max(worst_admm,
                                  std::abs(s.objective - ref.objective) / ref.objective);
        }
    }
    return {violations == 0 && unsolved == 0 && worst_admm <= 1e-5,
            std::to_string(violations) + " condition violations, " +
                std::to_string(unsolved) + " unsolved, ADMM relative difference " +
                num(worst_admm)};
}

SweepConfig desk_sweep()
{
    SweepConfig cfg = sweep_preset("fig2-desk");
    cfg.methods = {Method::anm, Method::banm_mix, Method::bl1m};
    return cfg;
}

SweepResult& desk_result()
{
    static SweepResult r = run_sweep(desk_sweep());
    return r;
}

// Success probability grows with m and the block prior helps.
Outcome phase_transition()
{
    const SweepResult& r = desk_result();
    std::map<Method, std::vector<double>> curve;
    for (const CellSummary& c : r.cells)
    {
        curve[c.method].push_back(c.probability);
    }
    std::ostringstream detail;
    bool monotone = true;
    for (const auto& [method, ps] : curve)
    {
        int inversions = 0;
        for (std::size_t i = 1; i < ps.size(); ++i)
        {
            const double drop = ps[i - 1] - ps[i];
            if (drop > 0.1)
            {
                inversions += 2;
            }
            else if (drop > 0.0)
            {
                inversions += 1;
            }
        }
        monotone = monotone && inversions <= 1;
        detail << to_string(method) << " P =";
        for (double p : ps)
        {
            detail << ' ' << num(p);
        }
        detail << "; ";
    }
    const auto& anm = curve[Method::anm];
    const auto& mix = curve[Method::banm_mix];
    double mean_anm = 0.0;
    double mean_mix = 0.0;
    bool pointwise = anm.size() == mix.size() && !anm.empty();
    for (std::size_t i = 0; pointwise && i < anm.size(); ++i)
    {
        mean_anm += anm[i] / double(anm.size());
        mean_mix += mix[i] / double(mix.size());
        pointwise = pointwise && mix[i] >= anm[i] - 0.15;
    }
    detail << "monotone " << (monotone ? "yes" : "no") << ", mean banm-mix " << num(mean_mix)
           << " vs anm " << num(mean_anm);
    return {monotone && pointwise && mean_mix >= mean_anm, detail.str()};
}

// The l1 pipeline is faster than the full SDP at n = 120.
Outcome timing_order()
{
    SweepConfig cfg = sweep_preset("fig4-desk");
    cfg.timing_ns = {120};
    cfg.trials = 3;
    cfg.methods = {Method::anm, Method::bl1m};
    const SweepResult r = run_timing(cfg);
    double anm = 0.0;
    double bl1m = 0.0;
    for (const CellSummary& c : r.cells)
    {
        (c.method == Method::anm ? anm : bl1m) = c.mean_seconds;
    }
    return {bl1m < anm, "mean seconds bl1m " + num(bl1m) + " vs anm " + num(anm)};
}

// Building blocks against brute-force references.
Outcome unit_oracles()
{
    Rng rng(77);
    int failures = 0;
    auto close = [&](double a, double b, double tol) {
        if (!(std::abs(a - b) <= tol))
        {
            failures += 1;
        }
    };

    const ArcCoefficients arc = arc_coefficients(0.1, 0.2);
    close(arc.d0, -0.61803, 1e-5);
    close(arc.d1.real(), 0.19098, 1e-5);
    close(arc.d1.imag(), 0.26287, 1e-5);
    for (int t = 0; t < 50; ++t)
    {
        // Arcs may not straddle 0.5.
        const double side = t % 2 == 0 ? 0.0 : 0.5;
        const double lo = side + rng.uniform() * 0.4;
        const double hi = lo + 0.01 + rng.uniform() * (side + 0.49 - lo);
        const ArcCoefficients a = arc_coefficients(lo, hi);
        const oracle::Arc o = oracle::arc_constants(lo, hi);
        close(a.d0, o.d0, 1e-10);
        close(std::abs(a.d1 - o.d1), 0.0, 1e-10);
    }

    for (int t = 0; t < 20; ++t)
    {
        const Index n = 3 + static_cast<Index>(rng.below(6));
        auto hermitian = [&](Index d) {
            CMatrix h(d, d);
            for (Index i = 0; i < d; ++i)
            {
                for (Index j = 0; j < d; ++j)
                {
                    h(i, j) = cdouble(rng.normal(), rng.normal());
                }
            }
            return CMatrix((h + h.adjoint()) / 2.0);
        };
        const CMatrix ga = hermitian(n);
        const CMatrix gb = hermitian(n - 1);
        const ArcCoefficients a = arc_coefficients(0.2, 0.45);
        for (Index k = 0; k < n; ++k)
        {
            const cdouble got = trace_param(k, a, ga, gb);
            const cdouble want = oracle::trace_param(k, a.d0, a.d1, ga, gb);
            close(std::abs(got - want), 0.0, 1e-10);
        }

        // A PSD Hermitian matrix stays PSD after realification.
        const CMatrix r = hermitian(n);
        const CMatrix psd = r * r.adjoint();
        const RMatrix x = conic::realify_hermitian(psd);
        close((x - oracle::realify(psd)).norm(), 0.0, 1e-12);
        const double lowest = Eigen::SelfAdjointEigenSolver<RMatrix>(x).eigenvalues().minCoeff();
        if (lowest < -1e-10)
        {
            failures += 1;
        }
    }

    for (Index p : {16, 33})
    {
        for (Index b : {0, 2, 6})
        {
            for (Index i = 1; i <= p; ++i)
            {
                if (block_indices(i, p, b) != oracle::block_indices(i, p, b))
                {
                    failures += 1;
                }
            }
        }
    }

    CVector c(40);
    for (Index i = 0; i < c.size(); ++i)
    {
        c(i) = rng.uniform() < 0.3 ? cdouble(rng.normal(), rng.normal()) : cdouble(0.0);
    }
    const RVector w = update_weights(c, 6, 256.0);
    close((w - oracle::block_weights(c, 6, 256.0)).cwiseAbs().maxCoeff(), 0.0, 1e-12);

    const std::vector<double> f{0.30, 0.31, 0.305};
    const std::vector<double> mag{1.0, 3.0, 0.5};
    close(*weighted_centroid(f, mag), oracle::centroid(f, mag), 1e-12);

    return {failures == 0, std::to_string(failures) + " mismatches"};
}

// The desk sweep reproduces its success flags.
Outcome determinism()
{
    const SweepResult& first = desk_result();
    const SweepResult second = run_sweep(desk_sweep());
    std::size_t differ = first.records.size() == second.records.size() ? 0 : 1;
    for (std::size_t i = 0; differ == 0 && i < first.records.size(); ++i)
    {
        const TrialRecord& a = first.records[i];
        const TrialRecord& b = second.records[i];
        if (a.seed != b.seed || a.success != b.success)
        {
            differ += 1;
        }
    }
    return {differ == 0, std::to_string(first.records.size()) + " records, " +
                             std::to_string(differ) + " differ"};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"dual feasibility", dual_feasibility},
        {"exact recovery", recovery_smoke},
        {"strong duality", strong_duality},
        {"weighted l1 optimality", l1_optimality},
        {"phase transition trend", phase_transition},
        {"timing order", timing_order},
        {"unit oracles", unit_oracles},
        {"determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
    {
        selected.insert(std::atoi(argv[i]));
    }

    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i)
    {
        const int id = static_cast<int>(i) + 1;
        if (!selected.empty() && !selected.contains(id))
        {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = criteria[i].second();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " ("
                  << criteria[i].first << "): " << o.detail << " [" << num(secs) << " s]"
                  << std::endl;
        all = all && o.pass;
    }
    return all ? EXIT_SUCCESS : EXIT_FAILURE;
}

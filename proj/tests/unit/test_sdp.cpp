#include <doctest.h>

#include <cmath>
#include <numbers>

#include <spectral/certificate.hpp>
#include <spectral/rng.hpp>
#include <spectral/sdp.hpp>

#include "../oracles/oracles.hpp"

using namespace spectral;
using doctest::Approx;

namespace
{

CMatrix random_hermitian(Index d, Rng& rng)
{
    CMatrix h(d, d);
    for (Index i = 0; i < d; ++i)
    {
        for (Index j = 0; j < d; ++j)
        {
            h(i, j) = cdouble(rng.normal(), rng.normal());
        }
    }
    return (h + h.adjoint()) / 2.0;
}

} // namespace

TEST_CASE("Toeplitz selectors")
{
    for (Index k = -3; k <= 3; ++k)
    {
        CHECK((ToeplitzSelector{k, 4}.dense() - oracle::selector(k, 4)).norm() == 0.0);
        CHECK((ToeplitzSelector{-k, 4}.dense() - ToeplitzSelector{k, 4}.dense().transpose()).norm() == 0.0);
    }
    CHECK(ToeplitzSelector{0, 5}.dense().isIdentity());

    Rng rng(3);
    const CMatrix a = random_hermitian(5, rng);
    for (Index k = -4; k <= 4; ++k)
    {
        const cdouble direct = (oracle::selector(k, 5).cast<cdouble>() * a).trace();
        cdouble diag         = 0.0;
        for (Index j = 0; j < 5; ++j)
        {
            if (j + k >= 0 && j + k < 5)
            {
                diag += a(j, j + k);
            }
        }
        CHECK(std::abs(ToeplitzSelector{k, 5}.trace(a) - direct) < 1e-12);
        CHECK(std::abs(ToeplitzSelector{k, 5}.trace(a) - diag) < 1e-12);
    }
}

TEST_CASE("arc constants")
{
    const ArcCoefficients a = arc_coefficients(0.1, 0.2);
    CHECK(a.alpha == Approx(0.32492).epsilon(1e-5));
    CHECK(a.beta == Approx(0.72654).epsilon(1e-5));
    CHECK(a.d0 == Approx(-0.61803).epsilon(1e-5));
    CHECK(a.d1.real() == Approx(0.19098).epsilon(1e-5));
    CHECK(a.d1.imag() == Approx(0.26287).epsilon(1e-5));

    const ArcCoefficients b = arc_coefficients(0.6, 0.9);
    CHECK(b.alpha == Approx(-3.07768).epsilon(1e-5));
    CHECK(b.beta == Approx(-0.32492).epsilon(1e-5));

    Rng rng(8);
    for (int t = 0; t < 200; ++t)
    {
        double lo = rng.uniform();
        double hi = rng.uniform();
        if (lo > hi)
        {
            std::swap(lo, hi);
        }
        if ((lo < 0.5 && hi > 0.5) || hi - lo < 1e-3 || std::abs(lo - 0.5) < 1e-3 ||
            std::abs(hi - 0.5) < 1e-3)
        {
            continue;
        }
        const ArcCoefficients c = arc_coefficients(lo, hi);
        const oracle::Arc o     = oracle::arc_constants(lo, hi);
        CHECK(c.alpha == Approx(o.alpha).epsilon(1e-10));
        CHECK(c.beta == Approx(o.beta).epsilon(1e-10));
        CHECK(c.d0 == Approx(o.d0).epsilon(1e-10));
        CHECK(std::abs(c.d1 - o.d1) <= 1e-10 * (1.0 + std::abs(o.d1)));

        // The weight is nonnegative exactly on the arc.
        const double scale = std::abs(c.d0) + 2.0 * std::abs(c.d1);
        for (int s = 0; s <= 20; ++s)
        {
            const double f = lo + (hi - lo) * s / 20.0;
            CHECK(c.weight(f) >= -1e-9 * scale);
        }
        const double outside = hi + 0.5 * (1.0 - (hi - lo));
        CHECK(c.weight(outside) < 0.0);
    }

    CHECK_THROWS_AS(arc_coefficients(0.2, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(arc_coefficients(0.4, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(arc_coefficients(0.3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(arc_coefficients(0.5 + 1e-10, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(arc_coefficients(-0.1, 0.2), std::invalid_argument);
}

TEST_CASE("trace parameterization")
{
    const ArcCoefficients arc = arc_coefficients(0.1, 0.2);

    SUBCASE("simple values")
    {
        const Index n = 4;
        CHECK(std::abs(trace_param(0, arc, CMatrix::Identity(n, n) / double(n),
                                   CMatrix::Zero(n - 1, n - 1)) - 1.0) < 1e-15);
        CHECK(std::abs(trace_param(n - 1, arc, CMatrix::Zero(n, n),
                                   CMatrix::Zero(n - 1, n - 1))) == 0.0);
        // n = 3, k = 1, G_b = I: only the offset k - 1 = 0 diagonal of G_b contributes.
        const cdouble v = trace_param(1, arc, CMatrix::Zero(3, 3), CMatrix::Identity(2, 2));
        CHECK(std::abs(v - 2.0 * std::conj(arc.d1)) < 1e-15);
        CHECK(std::abs(v - oracle::trace_param(1, arc.d0, arc.d1, CMatrix::Zero(3, 3),
                                               CMatrix::Identity(2, 2))) < 1e-15);
    }

    SUBCASE("matches dense products")
    {
        Rng rng(21);
        for (int t = 0; t < 20; ++t)
        {
            const Index n    = 2 + static_cast<Index>(rng.below(6));
            const CMatrix ga = random_hermitian(n, rng);
            const CMatrix gb = random_hermitian(n - 1, rng);
            for (Index k = 0; k < n; ++k)
            {
                const cdouble want = oracle::trace_param(k, arc.d0, arc.d1, ga, gb);
                CHECK(std::abs(trace_param(k, arc, ga, gb) - want) < 1e-10 * (1.0 + std::abs(want)));
            }
        }
    }

    SUBCASE("coefficients describe a^H G_a a + weight * a^H G_b a")
    {
        Rng rng(5);
        for (int t = 0; t < 10; ++t)
        {
            const Index n    = 3 + static_cast<Index>(rng.below(5));
            const CMatrix ga = random_hermitian(n, rng);
            const CMatrix gb = random_hermitian(n - 1, rng);
            for (int s = 0; s < 5; ++s)
            {
                const double f = rng.uniform();
                cdouble series = 0.0;
                for (Index k = -(n - 1); k <= n - 1; ++k)
                {
                    const cdouble r = k >= 0 ? trace_param(k, arc, ga, gb)
                                             : std::conj(trace_param(-k, arc, ga, gb));
                    series += r * std::polar(1.0, 2.0 * std::numbers::pi * f * double(k));
                }
                const CVector a  = atom_eval(f, n);
                const CVector ab = atom_eval(f, n - 1);
                const cdouble want =
                    (a.adjoint() * ga * a)(0) + arc.weight(f) * (ab.adjoint() * gb * ab)(0);
                CHECK(std::abs(series - want) < 1e-9 * (1.0 + std::abs(want)));
            }
        }
    }

    CHECK_THROWS_AS(trace_param(0, arc, CMatrix::Zero(3, 3), CMatrix::Zero(3, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(trace_param(3, arc, CMatrix::Zero(3, 3), CMatrix::Zero(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("program shapes")
{
    const SpectralInstance inst = random_instance(12, 2, 7, 4);
    const CertificateSdp anm    = build_standard_anm_sdp(inst);
    CHECK(anm.program.blocks().size() == 1);
    CHECK(anm.program.blocks()[0].dim == 2 * 13);
    CHECK(anm.trace_rows_per_arc == 12);
    CHECK(anm.program.sense() == conic::Sense::maximize);

    const std::vector<Arc> raw{{0.1, 0.2}, {0.45, 0.55}};
    const FrequencyBlockSet blocks = FrequencyBlockSet::from_intervals(raw);
    const CertificateSdp sdp       = build_block_sdp(inst, blocks);
    // [0.45, 0.55] is cut at one half, so three arcs.
    CHECK(sdp.arcs.size() == 3);
    REQUIRE(sdp.program.blocks().size() == 6);
    for (std::size_t b = 0; b < 6; ++b)
    {
        CHECK(sdp.program.blocks()[b].dim == (b % 2 == 0 ? 2 * 13 : 2 * 11));
    }

    // The objective never touches unobserved positions of q.
    for (Index l = 0; l < inst.n; ++l)
    {
        const bool observed =
            std::find(inst.obs_indices.begin(), inst.obs_indices.end(), l) != inst.obs_indices.end();
        if (!observed)
        {
            const int i = static_cast<int>(l);
            const int d = static_cast<int>(inst.n + 1);
            CHECK_FALSE(sdp.program.objective_references(sdp.bordered_block, i, d - 1));
            CHECK_FALSE(sdp.program.objective_references(sdp.bordered_block, d + i, 2 * d - 1));
            CHECK_FALSE(sdp.program.objective_references(sdp.bordered_block, d + i, d - 1));
        }
    }

    CHECK_THROWS_AS(build_block_sdp(inst, FrequencyBlockSet{}), std::invalid_argument);
    CHECK(build_block_sdp(inst, FrequencyBlockSet::full_band()).program.blocks().size() == 1);
}

TEST_CASE("certificate programs reach the atomic norm")
{
    const std::vector<double> f{0.15, 0.62};
    const std::vector<cdouble> c{cdouble(1.2, 0.3), cdouble(-0.4, 0.8)};
    const SpectralInstance inst = make_full_instance(16, f, c);
    const double norm = std::abs(c[0]) + std::abs(c[1]);

    const CertificateSdp anm = build_standard_anm_sdp(inst);
    const conic::ConicSolution s = conic::solve(anm.program);
    REQUIRE(s.ok());
    CHECK(s.primal_objective == Approx(norm).epsilon(1e-4));
    const CVector q = extract_q(anm, s);
    CHECK(std::abs(std::abs(dual_poly_eval(q, 0.15)) - 1.0) < 1e-4);
    CHECK(std::abs(std::abs(dual_poly_eval(q, 0.62)) - 1.0) < 1e-4);

    const std::vector<Arc> raw{{0.1, 0.2}, {0.55, 0.7}};
    const FrequencyBlockSet blocks = FrequencyBlockSet::from_intervals(raw);
    const CertificateSdp sdp       = build_block_sdp(inst, blocks);
    const conic::ConicSolution t   = conic::solve(sdp.program);
    REQUIRE(t.usable());
    CHECK(t.primal_objective == Approx(norm).epsilon(1e-4));
    const DualCertificate cert{extract_q(sdp, t), blocks};
    CHECK(max_modulus_on_domain(cert, 1 << 14) <= 1.0 + kCertificateTolerance);
}

TEST_CASE("pinned entries and the zero signal")
{
    SpectralInstance inst = random_instance(10, 1, 6, 77);
    for (auto& x : inst.obs_samples)
    {
        x = 0.0;
    }
    const CertificateSdp anm = build_standard_anm_sdp(inst);
    const conic::ConicSolution s = conic::solve(anm.program);
    REQUIRE(s.ok());
    CHECK(std::abs(s.primal_objective) < 1e-6);

    const SpectralInstance live = random_instance(10, 1, 6, 77);
    const CertificateSdp sdp    = build_standard_anm_sdp(live);
    const conic::ConicSolution r = conic::solve(sdp.program);
    REQUIRE(r.ok());
    CHECK(r.primal_objective >= -1e-8);
    const CVector q = extract_q(sdp, r);
    for (Index l = 0; l < live.n; ++l)
    {
        if (std::find(live.obs_indices.begin(), live.obs_indices.end(), l) == live.obs_indices.end())
        {
            CHECK(std::abs(q(l)) < 1e-7);
        }
    }
}

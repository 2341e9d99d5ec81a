#include <doctest.h>

#include <cmath>

#include <spectral/certificate.hpp>
#include <spectral/rng.hpp>
#include <spectral/sdp.hpp>

#include "../oracles/oracles.hpp"

using namespace spectral;
using doctest::Approx;

namespace
{

DualCertificate full_band_certificate(const SpectralInstance& inst)
{
    const CertificateSdp sdp     = build_standard_anm_sdp(inst);
    conic::Tolerances tight;
    tight.eq = tight.cone = tight.gap = 1e-9;
    const conic::ConicSolution s = conic::solve(sdp.program, tight);
    REQUIRE(s.usable());
    return {extract_q(sdp, s)};
}

} // namespace

TEST_CASE("dual polynomial evaluation")
{
    const CVector zero = CVector::Zero(9);
    CHECK(dual_poly_eval(zero, 0.3) == cdouble(0.0));

    const CVector matched = atom_eval(0.37, 12) / 12.0;
    CHECK(std::abs(dual_poly_eval(matched, 0.37) - 1.0) < 1e-14);

    Rng rng(2);
    for (int t = 0; t < 50; ++t)
    {
        const Index n = 1 + static_cast<Index>(rng.below(40));
        CVector q(n);
        for (Index l = 0; l < n; ++l)
        {
            q(l) = cdouble(rng.normal(), rng.normal());
        }
        const double f = rng.uniform();
        CHECK(std::abs(dual_poly_eval(q, f) - oracle::dual_poly(q, f)) < 1e-12 * (1.0 + q.norm()));
        CHECK(std::abs(dual_poly_eval(q, 0.0) - dual_poly_eval(q, 1.0)) < 1e-12 * (1.0 + q.norm()));
    }

    const RVector grid = dual_poly_modulus_grid(matched, 64);
    CHECK(grid.size() == 64);
    CHECK(grid.maxCoeff() <= 1.0 + 1e-12);
    CHECK(default_grid_size(64) == 16384);
    CHECK(default_grid_size(4096) == 32768);
}

TEST_CASE("peaks of solved certificates")
{
    CHECK(locate_peaks(DualCertificate{CVector::Zero(8)}, 1024).empty());

    SUBCASE("single tone")
    {
        const std::vector<double> f{0.3};
        const std::vector<cdouble> c{cdouble(0.8, -0.6)};
        const SpectralInstance inst = make_full_instance(16, f, c);
        const auto peaks = locate_peaks(full_band_certificate(inst), default_grid_size(16));
        REQUIRE(peaks.size() == 1);
        CHECK(std::abs(peaks[0] - 0.3) < 1e-6);
    }
    SUBCASE("two tones")
    {
        const std::vector<double> f{0.12, 0.71};
        const std::vector<cdouble> c{1.0, cdouble(0.0, 2.0)};
        const SpectralInstance inst = make_full_instance(24, f, c);
        const DualCertificate cert  = full_band_certificate(inst);
        const auto peaks = locate_peaks(cert, default_grid_size(24));
        REQUIRE(peaks.size() == 2);
        CHECK(std::abs(peaks[0] - 0.12) < 1e-6);
        CHECK(std::abs(peaks[1] - 0.71) < 1e-6);
        CHECK(max_modulus_on_domain(cert, 1 << 14) <= 1.0 + kCertificateTolerance);
        for (double p : peaks)
        {
            const double m = std::abs(dual_poly_eval(cert.q, p));
            CHECK(m >= 1.0 - kPeakTolerance);
            CHECK(m <= 1.0 + kCertificateTolerance);
        }
    }
    SUBCASE("tone near the seam")
    {
        const std::vector<double> f{0.9999};
        const std::vector<cdouble> c{1.0};
        const SpectralInstance inst = make_full_instance(16, f, c);
        const auto peaks = locate_peaks(full_band_certificate(inst), default_grid_size(16));
        REQUIRE(peaks.size() == 1);
        CHECK(circular_distance(peaks[0], 0.9999) < 1e-6);
    }
    SUBCASE("restricted domain")
    {
        const CVector q = atom_eval(0.4, 10) / 10.0;
        const std::vector<Arc> away{{0.1, 0.2}};
        CHECK(locate_peaks({q, FrequencyBlockSet::from_intervals(away)}, 4096).empty());
        const std::vector<Arc> near{{0.35, 0.45}};
        const auto peaks = locate_peaks({q, FrequencyBlockSet::from_intervals(near)}, 4096);
        REQUIRE(peaks.size() == 1);
        CHECK(peaks[0] == Approx(0.4).epsilon(1e-9));
    }
}

TEST_CASE("coefficient fit")
{
    const SpectralInstance inst = random_instance(32, 3, 20, 17);
    const CoefficientFit exact  = recover_coeffs(inst, inst.freqs);
    CHECK(exact.residual <= 1e-10);
    CHECK_FALSE(exact.rank_deficient);
    for (std::size_t j = 0; j < inst.freqs.size(); ++j)
    {
        CHECK(std::abs(exact.coeffs(static_cast<Index>(j)) - inst.coeffs[j]) < 1e-8);
    }

    const CoefficientFit none = recover_coeffs(inst, {});
    CHECK(none.residual == Approx(inst.observations().norm()));

    const std::vector<double> dup{0.25, 0.25};
    CHECK(recover_coeffs(inst, dup).rank_deficient);

    const std::vector<double> f{0.2};
    const std::vector<cdouble> c{1.0};
    const SpectralInstance one = make_full_instance(16, f, c);
    const std::vector<double> off{0.7};
    CHECK(recover_coeffs(one, off).residual > 0.9 * one.observations().norm());

    // Adding frequencies never increases the residual.
    const std::vector<double> a{0.1};
    const std::vector<double> ab{0.1, 0.5};
    const std::vector<double> abc{0.1, 0.5, 0.8};
    const double r1 = recover_coeffs(inst, a).residual;
    const double r2 = recover_coeffs(inst, ab).residual;
    const double r3 = recover_coeffs(inst, abc).residual;
    CHECK(r2 <= r1 + 1e-12);
    CHECK(r3 <= r2 + 1e-12);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include <spectral/l1.hpp>
#include <spectral/rng.hpp>

#include "../oracles/oracles.hpp"

using namespace spectral;
using doctest::Approx;

namespace
{

/// Observed rows of the dictionary restricted to the active set.
CMatrix dictionary(const SpectralInstance& inst, const GridState& s)
{
    CMatrix a(inst.m(), static_cast<Index>(s.active.size()));
    for (std::size_t j = 0; j < s.active.size(); ++j)
    {
        const double f = s.frequency(s.active[j]);
        for (Index t = 0; t < inst.m(); ++t)
        {
            a(t, static_cast<Index>(j)) = std::polar(
                1.0, 2.0 * std::numbers::pi * f * double(inst.obs_indices[static_cast<std::size_t>(t)]));
        }
    }
    return a;
}

} // namespace

TEST_CASE("initial grid")
{
    const GridState s = init_grid(16, 4);
    CHECK(s.active == std::vector<Index>{1, 5, 9, 13});
    CHECK(s.weights.size() == 16);
    CHECK(s.weights.isOnes());
    CHECK(s.coeffs.isZero());
    CHECK(init_grid(4, 1).active == std::vector<Index>{1, 2, 3, 4});
    CHECK(init_grid(10, 4).active == std::vector<Index>{1, 5, 9});
    CHECK(s.frequency(5) == Approx(0.25));
    CHECK_THROWS_AS(init_grid(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(init_grid(8, 0), std::invalid_argument);
}

TEST_CASE("index blocks")
{
    auto range = [](Index lo, Index hi) {
        std::vector<Index> v;
        for (Index j = lo; j <= hi; ++j)
        {
            v.push_back(j);
        }
        return v;
    };
    CHECK(block_indices(50, 100, 10) == range(45, 55));
    CHECK(block_indices(3, 100, 10) == range(1, 8));
    CHECK(block_indices(99, 100, 10) == range(94, 100));
    CHECK(block_indices(7, 100, 0) == std::vector<Index>{7});
    CHECK(block_indices(2, 10, 4, true) == std::vector<Index>{1, 2, 3, 4, 10});
    CHECK_THROWS_AS(block_indices(5, 10, 3), std::invalid_argument);

    for (long p : {1L, 7L, 40L})
    {
        for (long b : {0L, 2L, 6L, 20L})
        {
            for (long i = 1; i <= p; ++i)
            {
                const auto got  = block_indices(i, p, b);
                const auto want = oracle::block_indices(i, p, b);
                CHECK(std::vector<long>(got.begin(), got.end()) == want);
            }
        }
    }
}

TEST_CASE("block reweighting")
{
    CHECK((update_weights(CVector::Zero(12), 4, 256.0).array() == 1.0 / 256.0).all());

    CVector c = CVector::Zero(10);
    c(4)      = cdouble(0.0, 2.0);
    c(5)      = 1.0;
    const RVector w = update_weights(c, 2, 256.0);
    CHECK(w(4) == Approx(1.0 / 259.0));
    CHECK(w(0) == Approx(1.0 / 256.0));
    CHECK((w.array() <= 1.0 / 256.0 + 1e-18).all());

    Rng rng(4);
    for (int t = 0; t < 30; ++t)
    {
        const Index p = 1 + static_cast<Index>(rng.below(80));
        CVector x(p);
        for (Index i = 0; i < p; ++i)
        {
            x(i) = rng.uniform() < 0.3 ? cdouble(rng.normal(), rng.normal()) : cdouble(0.0);
        }
        const Index b    = 2 * static_cast<Index>(rng.below(12));
        const double eps = t % 2 ? 256.0 : 1.0 / 256.0;
        const RVector got  = update_weights(x, b, eps);
        const RVector want = oracle::block_weights(x, b, eps);
        CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());

        // Only magnitudes matter.
        CVector rotated = x;
        for (Index i = 0; i < p; ++i)
        {
            rotated(i) *= std::polar(1.0, 6.0 * rng.uniform());
        }
        CHECK((update_weights(rotated, b, eps) - got).cwiseAbs().maxCoeff() <= 1e-12 * got.maxCoeff());
    }
    CHECK_THROWS_AS(update_weights(c, 2, 0.0), std::invalid_argument);
}

TEST_CASE("threshold and refinement")
{
    RVector w(2);
    w << 0.001, 0.003;
    CHECK(w_mid(w) == Approx(0.002));
    CHECK(low_weight_indices(w) == std::vector<Index>{1});
    CHECK(low_weight_indices(RVector::Constant(5, 1.0 / 256.0)).empty());
    CHECK_THROWS_AS(w_mid(RVector()), std::invalid_argument);

    RVector r = RVector::Constant(16, 1.0);
    r(4)      = 0.1;
    CHECK(refine_grid({1, 5, 9, 13}, r, 4) == std::vector<Index>{1, 3, 4, 5, 6, 7, 9, 13});
    CHECK(refine_grid({1, 5, 9, 13}, RVector::Constant(16, 1.0), 4) ==
          std::vector<Index>{1, 5, 9, 13});
}

TEST_CASE("convergence test")
{
    CVector a = CVector::Zero(4);
    CHECK(converged(a, a, 0.5e-4));
    CVector b = a;
    b(2)      = 1e-3;
    CHECK_FALSE(converged(a, b, 0.5e-4));
    CHECK_THROWS_AS(converged(a, CVector::Zero(3), 1.0), std::invalid_argument);
}

TEST_CASE("weighted l1 solves")
{
    SUBCASE("zero data")
    {
        SpectralInstance inst = random_instance(16, 1, 8, 2);
        for (auto& x : inst.obs_samples)
        {
            x = 0.0;
        }
        const auto s = solve_weighted_l1(inst, init_grid(32, 2));
        REQUIRE(s.usable());
        CHECK(s.objective == Approx(0.0).scale(1.0).epsilon(1e-6));
        CHECK(s.z.cwiseAbs().maxCoeff() < 1e-6);
    }
    SUBCASE("square DFT")
    {
        const SpectralInstance inst = random_instance(8, 3, 8, 9);
        const GridState g           = init_grid(8, 1);
        const auto s                = solve_weighted_l1(inst, g);
        REQUIRE(s.usable());
        const CVector want = dictionary(inst, g).adjoint() * inst.observations() / 8.0;
        CHECK((s.z - want).norm() < 1e-6);
        CHECK(s.objective == Approx(want.cwiseAbs().sum()).epsilon(1e-6));
    }
    SUBCASE("scaling the weights")
    {
        const SpectralInstance inst = random_instance(16, 2, 10, 31);
        GridState g                 = init_grid(64, 2);
        const auto a                = solve_weighted_l1(inst, g);
        g.weights *= 2.0;
        const auto b = solve_weighted_l1(inst, g);
        REQUIRE(a.usable());
        REQUIRE(b.usable());
        CHECK(b.objective == Approx(2.0 * a.objective).epsilon(1e-6));
        CHECK((a.z - b.z).norm() < 1e-4 * (1.0 + a.z.norm()));
    }
    SUBCASE("larger dictionary never costs more")
    {
        const SpectralInstance inst = random_instance(16, 2, 10, 12);
        const auto coarse = solve_weighted_l1(inst, init_grid(64, 4));
        const auto fine   = solve_weighted_l1(inst, init_grid(64, 2));
        REQUIRE(coarse.usable());
        REQUIRE(fine.usable());
        CHECK(fine.objective <= coarse.objective * (1.0 + 1e-6));
    }
    SUBCASE("optimality conditions and an ADMM cross-check")
    {
        Rng rng(40);
        conic::Tolerances tight;
        tight.eq = tight.cone = tight.gap = 1e-10;
        for (int t = 0; t < 4; ++t)
        {
            const SpectralInstance inst = random_instance(24, 3, 12, 500 + t);
            GridState g                 = init_grid(64, 1);
            for (Index j = 0; j < 64; ++j)
            {
                g.weights(j) = 0.5 + rng.uniform();
            }
            const auto s = solve_weighted_l1(inst, g, tight);
            REQUIRE(s.usable());
            const CMatrix a = dictionary(inst, g);
            for (std::size_t j = 0; j < g.active.size(); ++j)
            {
                const double w    = g.weights(g.active[j] - 1);
                const double corr = std::abs(a.col(static_cast<Index>(j)).dot(s.multipliers));
                CHECK(corr <= w * (1.0 + 1e-4));
                if (std::abs(s.z(static_cast<Index>(j))) > 1e-6)
                {
                    CHECK(corr >= w * (1.0 - 1e-3));
                }
            }
            RVector wa(static_cast<Index>(g.active.size()));
            for (std::size_t j = 0; j < g.active.size(); ++j)
            {
                wa(static_cast<Index>(j)) = g.weights(g.active[j] - 1);
            }
            const auto ref = oracle::weighted_l1_admm(a, inst.observations(), wa);
            CHECK(s.objective == Approx(ref.objective).epsilon(1e-5));
        }
    }
    CHECK_THROWS_AS(solve_weighted_l1(random_instance(8, 1, 4, 1), GridState{}),
                    std::invalid_argument);
}

#ifndef SPECTRAL_RNG_HPP
#define SPECTRAL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spectral
{

/// splitmix64 finalizer; used to derive independent seeds.
constexpr std::uint64_t mix_seed(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

///
/// Seedable generator with explicit stream splitting. Variates are produced
/// from raw 64-bit draws so sequences do not depend on the standard
/// library's distribution implementations.
///
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

    /// Independent child stream identified by `stream`.
    Rng split(std::uint64_t stream) const
    {
        return Rng(mix_seed(seed_ ^ mix_seed(stream + 0x632be59bd9b4e019ULL)));
    }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer on [0, bound).
    std::uint64_t below(std::uint64_t bound)
    {
        // Lemire-style rejection keeps the draw unbiased.
        const std::uint64_t limit = -bound % bound;
        for (;;)
        {
            const std::uint64_t r = next();
            if (r >= limit)
            {
                return r % bound;
            }
        }
    }

    /// Standard normal via Box-Muller (one value per call).
    double normal()
    {
        double u1 = uniform();
        while (u1 <= 0.0)
        {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Chi-squared with one degree of freedom.
    double chi_squared1()
    {
        const double z = normal();
        return z * z;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace spectral

#endif // SPECTRAL_RNG_HPP

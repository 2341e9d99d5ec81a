#include <spectral/core.hpp>
#include <spectral/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace spectral
{

CVector SpectralInstance::observations() const
{
    return Eigen::Map<const CVector>(obs_samples.data(),
                                     static_cast<Index>(obs_samples.size()));
}

CVector SpectralInstance::full_signal() const
{
    return synthesize<double>(freqs, coeffs, n);
}

SpectralInstance make_instance(Index n, std::vector<double> freqs,
                               std::vector<cdouble> coeffs,
                               std::vector<Index> obs_indices,
                               std::uint64_t seed)
{
    if (n < 1)
    {
        throw std::invalid_argument("make_instance: n must be positive");
    }
    if (freqs.size() != coeffs.size())
    {
        throw std::invalid_argument(
            "make_instance: frequency and coefficient counts differ");
    }
    std::sort(obs_indices.begin(), obs_indices.end());
    for (std::size_t t = 0; t < obs_indices.size(); ++t)
    {
        if (obs_indices[t] < 0 || obs_indices[t] >= n ||
            (t > 0 && obs_indices[t] == obs_indices[t - 1]))
        {
            throw std::invalid_argument(
                "make_instance: observation indices must be distinct and in "
                "[0, n)");
        }
    }
    for (auto& f : freqs)
    {
        f = wrap_frequency(f);
    }

    SpectralInstance inst;
    inst.n           = n;
    inst.freqs       = std::move(freqs);
    inst.coeffs      = std::move(coeffs);
    inst.obs_indices = std::move(obs_indices);
    inst.seed        = seed;

    const CVector x = inst.full_signal();
    inst.obs_samples.reserve(inst.obs_indices.size());
    for (Index l : inst.obs_indices)
    {
        inst.obs_samples.push_back(x(l));
    }
    return inst;
}

SpectralInstance make_full_instance(Index n, std::vector<double> freqs,
                                    std::vector<cdouble> coeffs)
{
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    return make_instance(n, std::move(freqs), std::move(coeffs),
                         std::move(all));
}

namespace
{

bool separated(const std::vector<double>& freqs, double min_sep)
{
    for (std::size_t a = 0; a < freqs.size(); ++a)
    {
        for (std::size_t b = a + 1; b < freqs.size(); ++b)
        {
            const double d = circular_distance(freqs[a], freqs[b]);
            if (d < min_sep || d == 0.0)
            {
                return false;
            }
        }
    }
    return true;
}

} // namespace

SpectralInstance random_instance(Index n, Index k, Index m,
                                 std::uint64_t seed, double min_sep)
{
    if (n < 1 || k < 1 || k > m || m > n)
    {
        throw std::invalid_argument(
            "random_instance: require 1 <= k <= m <= n");
    }
    if (min_sep < 0.0 || static_cast<double>(k) * min_sep >= 1.0)
    {
        throw std::invalid_argument(
            "random_instance: min_sep must be in [0, 1/k)");
    }

    Rng root(seed);
    Rng freq_rng   = root.split(1);
    Rng amp_rng    = root.split(2);
    Rng phase_rng  = root.split(3);
    Rng sample_rng = root.split(4);

    std::vector<double> freqs(static_cast<std::size_t>(k));
    constexpr int kMaxDraws = 1'000'000;
    int draws               = 0;
    do
    {
        if (++draws > kMaxDraws)
        {
            throw std::runtime_error(
                "random_instance: could not satisfy min_sep");
        }
        for (auto& f : freqs)
        {
            f = freq_rng.uniform();
        }
    } while (!separated(freqs, min_sep));

    std::vector<cdouble> coeffs;
    coeffs.reserve(freqs.size());
    for (Index j = 0; j < k; ++j)
    {
        const double amp   = std::sqrt(0.5 + amp_rng.chi_squared1());
        const double phase = 2.0 * std::numbers::pi * phase_rng.uniform();
        coeffs.push_back(std::polar(amp, phase));
    }

    // Partial Fisher-Yates for a uniform m-subset.
    std::vector<Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index t = 0; t < m; ++t)
    {
        const auto pick =
            t + static_cast<Index>(sample_rng.below(static_cast<std::uint64_t>(n - t)));
        std::swap(pool[static_cast<std::size_t>(t)],
                  pool[static_cast<std::size_t>(pick)]);
    }
    pool.resize(static_cast<std::size_t>(m));

    return make_instance(n, std::move(freqs), std::move(coeffs),
                         std::move(pool), seed);
}

SuccessReport success_metric(std::span<const double> true_freqs,
                             std::span<const double> est_freqs,
                             double threshold)
{
    if (true_freqs.size() != est_freqs.size())
    {
        return {false, std::numeric_limits<double>::infinity()};
    }
    std::vector<double> a(true_freqs.begin(), true_freqs.end());
    std::vector<double> b(est_freqs.begin(), est_freqs.end());
    for (auto& f : a)
    {
        f = wrap_frequency(f);
    }
    for (auto& f : b)
    {
        f = wrap_frequency(f);
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    // Sorted lists are paired elementwise; on the circle the pairing may
    // start at any rotation, so keep the best cyclic alignment.
    const std::size_t k = a.size();
    double best         = k == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < k; ++shift)
    {
        double sq = 0.0;
        for (std::size_t j = 0; j < k; ++j)
        {
            const double d = circular_distance(a[j], b[(j + shift) % k]);
            sq += d * d;
        }
        best = std::min(best, sq);
    }
    const double err = std::sqrt(best);
    return {err <= threshold, err};
}

} // namespace spectral

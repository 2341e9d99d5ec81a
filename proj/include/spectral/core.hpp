#ifndef SPECTRAL_CORE_HPP
#define SPECTRAL_CORE_HPP

#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace spectral
{

using Index = Eigen::Index;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using cdouble  = std::complex<double>;
using CVector  = ComplexVector<double>;
using CMatrix  = ComplexMatrix<double>;
using RVector  = Eigen::VectorXd;
using RMatrix  = Eigen::MatrixXd;

///
/// A single frequency atom a(f) of length n, with a(f)_l = exp(i 2 pi f l).
///
template <typename Real = double>
struct FrequencyAtom
{
    Real f{0};
    Index n{1};

    /// Element l of the atom.
    std::complex<Real> operator()(Index l) const
    {
        return std::polar(Real(1), Real(2) * std::numbers::pi_v<Real> * f *
                                       static_cast<Real>(l));
    }
};

/// Atom vector exp(i 2 pi f l), l = 0..n-1.
template <typename Real = double>
ComplexVector<Real> atom_eval(Real f, Index n)
{
    if (n < 1)
    {
        throw std::invalid_argument("atom_eval: n must be positive");
    }
    const FrequencyAtom<Real> a{f, n};
    ComplexVector<Real> out(n);
    for (Index l = 0; l < n; ++l)
    {
        out(l) = a(l);
    }
    return out;
}

/// Sum of coeffs[j] * atom(freqs[j]) over j.
template <typename Real = double>
ComplexVector<Real> synthesize(std::span<const Real> freqs,
                               std::span<const std::complex<Real>> coeffs,
                               Index n)
{
    if (freqs.size() != coeffs.size())
    {
        throw std::invalid_argument(
            "synthesize: frequency and coefficient counts differ");
    }
    ComplexVector<Real> x = ComplexVector<Real>::Zero(n);
    for (std::size_t j = 0; j < freqs.size(); ++j)
    {
        x += coeffs[j] * atom_eval<Real>(freqs[j], n);
    }
    return x;
}

/// Distance between two frequencies on the unit circle, in [0, 0.5].
template <typename Real>
Real circular_distance(Real a, Real b)
{
    Real d = std::fmod(std::abs(a - b), Real(1));
    return std::min(d, Real(1) - d);
}

/// Wrap a frequency into [0, 1).
template <typename Real>
Real wrap_frequency(Real f)
{
    Real w = f - std::floor(f);
    return w >= Real(1) ? Real(0) : w;
}

/// Ground truth and observations of a spectrally sparse signal.
struct SpectralInstance
{
    Index n{0};
    std::vector<double> freqs;
    std::vector<cdouble> coeffs;
    std::vector<Index> obs_indices;
    std::vector<cdouble> obs_samples;
    std::uint64_t seed{0};

    Index k() const { return static_cast<Index>(freqs.size()); }
    Index m() const { return static_cast<Index>(obs_indices.size()); }

    /// Observed samples as an Eigen vector.
    CVector observations() const;
    /// Full-length signal rebuilt from the ground truth.
    CVector full_signal() const;
};

///
/// Build an instance from explicit ground truth and an observation set.
/// Observation indices are sorted and must be distinct and < n.
///
SpectralInstance make_instance(Index n, std::vector<double> freqs,
                               std::vector<cdouble> coeffs,
                               std::vector<Index> obs_indices,
                               std::uint64_t seed = 0);

/// Same as make_instance with every index observed.
SpectralInstance make_full_instance(Index n, std::vector<double> freqs,
                                    std::vector<cdouble> coeffs);

///
/// Random instance: uniform frequencies (optionally resampled until every
/// circular gap is at least min_sep), uniform phases on [0, 2 pi),
/// amplitudes sqrt(0.5 + chi^2_1) and a uniformly random m-subset of
/// {0..n-1}. Deterministic in seed.
///
SpectralInstance random_instance(Index n, Index k, Index m,
                                 std::uint64_t seed, double min_sep = 0.0);

struct SuccessReport
{
    bool success{false};
    /// l2 norm of the matched circular differences; +inf on count mismatch.
    double error{0};
};

/// Threshold on the l2 frequency error that counts as exact recovery.
inline constexpr double kSuccessThreshold = 1e-3;

SuccessReport success_metric(std::span<const double> true_freqs,
                             std::span<const double> est_freqs,
                             double threshold = kSuccessThreshold);

} // namespace spectral

#endif // SPECTRAL_CORE_HPP

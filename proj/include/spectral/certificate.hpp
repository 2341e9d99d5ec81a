#ifndef SPECTRAL_CERTIFICATE_HPP
#define SPECTRAL_CERTIFICATE_HPP

#include <vector>

#include <spectral/block_set.hpp>
#include <spectral/core.hpp>

namespace spectral
{

/// Dual vector q and the frequency set on which |Q(f)| <= 1 is enforced.
struct DualCertificate
{
    CVector q;
    FrequencyBlockSet domain = FrequencyBlockSet::full_band();
};

/// Q(f) = <q, a(f)> = sum_l q_l exp(-i 2 pi f l).
template <typename Real>
std::complex<Real> dual_poly_eval(const ComplexVector<Real>& q, Real f)
{
    // Horner in z = exp(-i 2 pi f).
    const std::complex<Real> z =
        std::polar(Real(1), -Real(2) * std::numbers::pi_v<Real> * f);
    std::complex<Real> acc(0);
    for (Index l = q.size() - 1; l >= 0; --l)
    {
        acc = acc * z + q(l);
    }
    return acc;
}

/// |Q| sampled at f = g / grid_size, g = 0..grid_size-1.
RVector dual_poly_modulus_grid(const CVector& q, Index grid_size);

/// Largest |Q(f)| over grid points inside the certificate's domain.
double max_modulus_on_domain(const DualCertificate& cert, Index grid_size);

inline constexpr double kPeakTolerance = 1e-3;
inline constexpr double kCertificateTolerance = 5e-3;

/// Grid size used for peak search: max(2^14, 8n).
Index default_grid_size(Index n);

///
/// Local maxima of |Q| on the grid restricted to the domain with
/// |Q| >= 1 - peak_tol, refined by golden-section search to a width of
/// 1e-10 and merged within 1e-8. Sorted ascending in [0, 1).
///
std::vector<double> locate_peaks(const DualCertificate& cert, Index grid_size,
                                 double peak_tol = kPeakTolerance);

struct CoefficientFit
{
    CVector coeffs;
    /// |A c - x_M|_2
    double residual{0};
    /// Columns numerically dependent; the minimum-norm solution is returned.
    bool rank_deficient{false};
};

/// Least-squares amplitudes for the given frequencies on the observed rows.
CoefficientFit recover_coeffs(const SpectralInstance& inst,
                              const std::vector<double>& freqs);

} // namespace spectral

#endif // SPECTRAL_CERTIFICATE_HPP

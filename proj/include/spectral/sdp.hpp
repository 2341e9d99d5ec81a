#ifndef SPECTRAL_SDP_HPP
#define SPECTRAL_SDP_HPP

#include <vector>

#include <spectral/block_set.hpp>
#include <spectral/conic.hpp>
#include <spectral/core.hpp>

///
/// \file sdp.hpp
///
/// Semidefinite programs whose optimal dual vector q is a certificate for
/// the frequencies of an observed signal:
///
///   maximize    Re <q_M, x_M>
///   subject to  q_l = 0 off the observation set M,
///               |<q, a(f)>| <= 1 for every f in the block set.
///
/// The bound is expressed through Gram matrices of nonnegative
/// trigonometric polynomials; complex matrices are realified for the
/// conic backend.
///
namespace spectral
{

///
/// Elementary Toeplitz matrix with ones where row - col = k, so that
/// tr[Theta_k A] = sum_j A(j, j + k). Theta_0 is the identity and
/// Theta_{-k} = Theta_k^T.
///
struct ToeplitzSelector
{
    Index k{0};
    Index n{1};

    RMatrix dense() const
    {
        RMatrix t = RMatrix::Zero(n, n);
        for (Index j = 0; j < n; ++j)
        {
            if (j + k >= 0 && j + k < n)
            {
                t(j + k, j) = 1.0;
            }
        }
        return t;
    }

    /// tr[Theta_k A] without forming Theta_k.
    template <typename Derived>
    typename Derived::Scalar trace(const Eigen::MatrixBase<Derived>& a) const
    {
        typename Derived::Scalar s(0);
        for (Index j = 0; j < n; ++j)
        {
            if (j + k >= 0 && j + k < n)
            {
                s += a(j, j + k);
            }
        }
        return s;
    }
};

///
/// Constants of the trace parameterization of polynomials that are
/// nonnegative on one arc [f_lo, f_hi]. The arc must lie inside [0, 0.5] or
/// inside (0.5, 1]; the weight d0 + 2 Re(d1 e^{-i w}) is then nonnegative
/// exactly on the arc (w = 2 pi f).
///
struct ArcCoefficients
{
    double f_lo{0};
    double f_hi{0};
    double alpha{0};
    double beta{0};
    double d0{0};
    cdouble d1{0};

    /// d0 + d1 e^{-i 2 pi f} + conj(d1) e^{i 2 pi f}.
    double weight(double f) const;
};

ArcCoefficients arc_coefficients(double f_lo, double f_hi);

///
/// Coefficient of offset k of the polynomial represented by (G_a, G_b):
/// tr[Theta_k G_a] + tr[(conj(d1) Theta_{k-1} + d0 Theta_k + d1 Theta_{k+1}) G_b],
/// with G_a of size n and G_b of size n - 1.
///
cdouble trace_param(Index k, const ArcCoefficients& arc, const CMatrix& g_a,
                    const CMatrix& g_b);

/// A program together with the location of q inside it.
struct CertificateSdp
{
    conic::ConicProgram program{conic::Sense::maximize};
    Index n{0};
    /// Block holding [[G, q], [q^H, 1]] (realified) for the first arc.
    int bordered_block{-1};
    /// Arcs actually used (empty for the standard program).
    std::vector<ArcCoefficients> arcs;
    /// Number of complex trace equalities emitted per arc (always n).
    Index trace_rows_per_arc{0};
};

/// Standard atomic-norm dual: a single bordered Gram block, bound on [0, 1).
CertificateSdp build_standard_anm_sdp(const SpectralInstance& inst);

///
/// Dual program with the bound enforced only on the block set. Arcs are cut
/// at 0.5 first. A full-band set yields the standard program.
///
CertificateSdp build_block_sdp(const SpectralInstance& inst,
                               const FrequencyBlockSet& blocks);

/// Dual vector q (length n) from a solved program.
CVector extract_q(const CertificateSdp& sdp, const conic::ConicSolution& sol);

} // namespace spectral

#endif // SPECTRAL_SDP_HPP

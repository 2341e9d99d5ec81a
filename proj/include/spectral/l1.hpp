#ifndef SPECTRAL_L1_HPP
#define SPECTRAL_L1_HPP

#include <vector>

#include <spectral/conic.hpp>
#include <spectral/core.hpp>

///
/// \file l1.hpp
///
/// Reweighted l1 recovery over a discretized frequency dictionary with
/// adaptive gridding. Grid indices are 1-based: index j stands for the
/// frequency (j - 1) / p.
///
namespace spectral
{

struct GridState
{
    Index p{0};
    Index q_stride{1};
    /// Sorted active indices, each in 1..p.
    std::vector<Index> active;
    /// Weights for every grid index (position j - 1 holds index j).
    RVector weights;
    /// Coefficients for every grid index, zero off the active set.
    CVector coeffs;
    int iteration{0};

    double frequency(Index j) const
    {
        return static_cast<double>(j - 1) / static_cast<double>(p);
    }
};

/// Active set {1, 1 + q, 1 + 2q, ...}, unit weights, zero coefficients.
GridState init_grid(Index p, Index q_stride);

struct WeightedL1Solution
{
    /// Coefficients on the active set, in the order of GridState::active.
    CVector z;
    /// Complex multipliers of the interpolation constraints, one per
    /// observation: |<a_j restricted to M, y>| <= w_j at the optimum.
    CVector multipliers;
    double objective{0};
    conic::Status status{conic::Status::numerical_error};

    bool usable() const
    {
        return status == conic::Status::optimal || status == conic::Status::inaccurate;
    }
};

///
/// minimize sum_j w_j |z_j| subject to (F_active z)_l = x_l for observed l,
/// one second-order cone per active index.
///
WeightedL1Solution solve_weighted_l1(const SpectralInstance& inst,
                                     const GridState& state,
                                     const conic::Tolerances& tol = {});

/// {j : i - b/2 <= j <= i + b/2} clipped to 1..p, or wrapped if circular.
std::vector<Index> block_indices(Index i, Index p, Index b, bool circular = false);

/// w_i = 1 / (sum of |c_j| over the block of i + epsilon) for i = 1..p.
RVector update_weights(const CVector& coeffs, Index b, double epsilon,
                       bool circular = false);

/// (min w + max w) / 2.
double w_mid(const RVector& weights);

/// 1-based indices i with w_i strictly below w_mid(w).
std::vector<Index> low_weight_indices(const RVector& weights);

/// Active set united with the blocks of every low-weight index.
std::vector<Index> refine_grid(const std::vector<Index>& active,
                               const RVector& new_weights, Index b,
                               bool circular = false);

/// |prev - cur|_2 < eps_err.
bool converged(const CVector& prev, const CVector& cur, double eps_err);

} // namespace spectral

#endif // SPECTRAL_L1_HPP

#ifndef SPECTRAL_RECOVERY_HPP
#define SPECTRAL_RECOVERY_HPP

#include <optional>
#include <string>
#include <vector>

#include <spectral/block_set.hpp>
#include <spectral/certificate.hpp>
#include <spectral/conic.hpp>
#include <spectral/core.hpp>

namespace spectral
{

enum class Method
{
    anm,
    banm,
    banm_mix,
    bl1m
};

std::string to_string(Method m);
/// Accepts "anm", "banm", "banm-mix" (or "banm_mix"), "bl1m".
Method parse_method(const std::string& name);

/// Discretized-dictionary settings shared by the l1 based pipelines.
struct GridParams
{
    Index p{4096};
    Index q_stride{16};
    /// Block width; each index-wise block spans b + 1 grid points.
    Index b{20};
    double epsilon{256.0};
    double eps_err{0.5e-4};
    int max_itr{20};
    bool circular_blocks{false};
};

struct BanmParams
{
    /// Half-width of the arcs placed around estimates; 0 selects
    /// max(1/n, b / (2p)).
    double tau{0.0};
    /// Keep this many largest estimates; unset keeps every estimate with
    /// |c| >= gamma * max |c|.
    std::optional<Index> l_fixed;
    double gamma{0.05};
    int max_iter{5};
    /// Stop once successive estimates move less than this (Hausdorff).
    double move_tol{1e-6};
};

struct RecoveryOptions
{
    GridParams grid;
    BanmParams banm;
    conic::Tolerances tol;
    double peak_tol{kPeakTolerance};
    /// 0 selects default_grid_size(n).
    Index peak_grid{0};
    /// Components with |c| below this fraction of the largest are dropped
    /// and the rest refit.
    double prune_fraction{1e-2};
};

double default_tau(Index n, const GridParams& grid);

struct IterationRecord
{
    /// Block set used by an SDP solve (empty for l1 iterations).
    FrequencyBlockSet blocks;
    /// Active dictionary size (0 for SDP iterations).
    Index active_size{0};
    std::vector<double> freqs;
};

struct RecoveryResult
{
    Method method{Method::anm};
    std::vector<double> est_freqs;
    std::vector<cdouble> est_coeffs;
    int iterations{0};
    std::vector<IterationRecord> history;
    double seconds{0};
    /// True when the pipeline produced an estimate without a hard failure.
    bool ok{false};
    /// Short machine-readable status ("ok", "solver_failure", ...).
    std::string status{"ok"};
    /// Human-readable remarks (non-convergence, fallbacks, warnings).
    std::vector<std::string> notes;
    /// Optimal value of the last SDP, if any.
    double dual_objective{0};
    /// Residual of the final coefficient fit.
    double fit_residual{0};
};

RecoveryResult run_anm(const SpectralInstance& inst, const RecoveryOptions& opt = {});
RecoveryResult run_banm(const SpectralInstance& inst, const RecoveryOptions& opt = {});
RecoveryResult run_banm_mix(const SpectralInstance& inst, const RecoveryOptions& opt = {});
RecoveryResult run_bl1m(const SpectralInstance& inst, const RecoveryOptions& opt = {});

RecoveryResult run_method(Method m, const SpectralInstance& inst,
                          const RecoveryOptions& opt = {});

/// Centroid sum f_i |c_i| / sum |c_i|; nullopt when the mass is zero.
std::optional<double> weighted_centroid(std::span<const double> freqs,
                                        std::span<const double> magnitudes);

/// Hausdorff distance between two frequency lists on the circle.
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

} // namespace spectral

#endif // SPECTRAL_RECOVERY_HPP

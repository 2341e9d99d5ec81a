#ifndef SPECTRAL_BENCH_HPP
#define SPECTRAL_BENCH_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <spectral/core.hpp>
#include <spectral/recovery.hpp>

///
/// \file bench.hpp
///
/// Monte-Carlo harness: recovery-probability sweeps over (k, m) and
/// wall-clock sweeps over n, with CSV and SVG export.
///
namespace spectral
{

struct SweepConfig
{
    Index n{64};
    std::vector<Index> ks{8};
    std::vector<Index> ms{8, 10, 12, 14, 16, 18, 20, 22, 24, 25};
    int trials{50};
    std::vector<Method> methods{Method::anm, Method::banm_mix, Method::bl1m};
    std::uint64_t base_seed{1};
    GridParams grid;
    BanmParams banm;
    double min_sep{0.0};
    /// Signal lengths for timing runs; each uses m = n / 2.
    std::vector<Index> timing_ns{120, 170, 220, 270, 320, 370, 420, 470};
    /// Worker threads; results do not depend on this.
    int jobs{1};
    std::string output;

    /// Throws std::invalid_argument on an unusable configuration.
    void validate() const;
};

///
/// Applies `key = value` lines on top of `base`. Blank lines and lines
/// starting with '#' are skipped. Lists are comma separated; "a:b" and
/// "a:b:step" expand to inclusive ranges. Keys:
///   n, k, m, trials, methods, seed, p, q, b, eps, eps_err, max_itr,
///   circular, tau, gamma, banm_iter, min_sep, timing_n, jobs, output
///
SweepConfig parse_sweep_config(std::istream& in, SweepConfig base = {});
/// Sets a single key; throws on unknown keys or malformed values.
void set_sweep_option(SweepConfig& cfg, const std::string& key, const std::string& value);
/// One `key = value` line per field; parse_sweep_config reads it back.
std::string describe(const SweepConfig& cfg);

/// Named desk-scale presets: "fig2", "fig2-desk", "fig4", "fig4-desk".
SweepConfig sweep_preset(const std::string& name);
std::vector<std::string> preset_names();

struct TrialRecord
{
    Method method{Method::anm};
    Index n{0};
    Index k{0};
    Index m{0};
    int trial{0};
    std::uint64_t seed{0};
    bool success{false};
    /// +inf when the number of estimates differs from k.
    double err_l2{0};
    double seconds{0};
    int iterations{0};

    bool operator==(const TrialRecord&) const = default;
};

struct CellSummary
{
    Method method{Method::anm};
    Index n{0};
    Index k{0};
    Index m{0};
    int trials{0};
    int successes{0};
    double probability{0};
    double mean_seconds{0};
    double sd_seconds{0};
};

struct SweepResult
{
    std::vector<TrialRecord> records;
    std::vector<CellSummary> cells;
};

/// Instance seed of a cell; shared by every method so they see the same data.
std::uint64_t trial_seed(std::uint64_t base_seed, Index n, Index k, Index m, int trial);

/// Called after each finished trial with (done, total).
using ProgressFn = std::function<void(std::size_t, std::size_t)>;

/// Every (method, k, m, trial) of the configuration; records are ordered by
/// cell regardless of the schedule.
SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress = {});

/// Timing study over cfg.timing_ns with m = n / 2 and k = cfg.ks.front().
SweepResult run_timing(const SweepConfig& cfg, const ProgressFn& progress = {});

/// (method, n, k, m) cells with success probability and wall-clock statistics.
std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records);

/// Header: method,n,k,m,trial,seed,success,err_l2,seconds,iters
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> parse_records_csv(std::istream& in);

/// Header: method,n,k,m,P,mean_seconds; throws on an empty table.
void write_aggregate_csv(std::ostream& out, const std::vector<CellSummary>& cells);

/// Line chart of P against m (one line per method and k).
void write_probability_svg(std::ostream& out, const std::vector<CellSummary>& cells);
/// Line chart of mean seconds against n (one line per method).
void write_timing_svg(std::ostream& out, const std::vector<CellSummary>& cells);

} // namespace spectral

#endif // SPECTRAL_BENCH_HPP

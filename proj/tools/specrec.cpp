// specrec: generate instances, recover spectra, run probability and timing sweeps.
//
// Exit codes: 0 success, 1 recovery failure, 2 usage or I/O error.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <spectral/bench.hpp>
#include <spectral/core.hpp>
#include <spectral/instance_io.hpp>
#include <spectral/recovery.hpp>

namespace fs = std::filesystem;
using namespace spectral;

namespace
{

constexpr int kExitOk       = 0;
constexpr int kExitFailure  = 1;
constexpr int kExitUsage    = 2;

/// Thrown for bad input files or arguments found after parsing.
struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Shortest text that reads back to the same double.
std::string num(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct GenArgs
{
    Index n{64};
    Index k{8};
    Index m{20};
    std::uint64_t seed{1};
    double min_sep{0.0};
    std::string out;
};

struct RecoverArgs
{
    std::string input;
    std::string method{"anm"};
    RecoveryOptions opt;
    std::optional<Index> l_fixed;
    std::string json_out;
    bool verbose{false};
};

struct SweepArgs
{
    std::string preset;
    std::string config;
    std::vector<std::string> sets;
    std::string out_dir;
    int jobs{0};
    bool dry_run{false};
    bool svg{false};
    bool quiet{false};
};

int cmd_gen(const GenArgs& a)
{
    if (a.n < 1 || a.k < 1 || a.k > a.m || a.m > a.n)
    {
        throw UsageError("gen needs 1 <= k <= m <= n");
    }
    if (a.min_sep < 0.0 || a.min_sep * static_cast<double>(a.k) >= 1.0)
    {
        throw UsageError("min-sep must be in [0, 1/k)");
    }
    std::printf("# specrec gen --n %lld --k %lld --m %lld --seed %llu --min-sep %s\n",
                static_cast<long long>(a.n), static_cast<long long>(a.k),
                static_cast<long long>(a.m), static_cast<unsigned long long>(a.seed),
                num(a.min_sep).c_str());
    const SpectralInstance inst = random_instance(a.n, a.k, a.m, a.seed, a.min_sep);
    if (a.out.empty() || a.out == "-")
    {
        std::cout << instance_to_json(inst) << '\n';
        return kExitOk;
    }
    try
    {
        write_instance(inst, a.out);
    }
    catch (const std::exception& e)
    {
        throw UsageError(e.what());
    }
    std::printf("wrote %s: n=%lld k=%lld m=%lld seed=%llu\n", a.out.c_str(),
                static_cast<long long>(inst.n), static_cast<long long>(inst.k()),
                static_cast<long long>(inst.m()), static_cast<unsigned long long>(inst.seed));
    return kExitOk;
}

int cmd_recover(RecoverArgs a)
{
    Method method;
    try
    {
        method = parse_method(a.method);
    }
    catch (const std::invalid_argument& e)
    {
        throw UsageError(e.what());
    }
    SpectralInstance inst;
    try
    {
        inst = read_instance(a.input);
    }
    catch (const std::exception& e)
    {
        throw UsageError("cannot read instance '" + a.input + "': " + e.what());
    }
    a.opt.banm.l_fixed = a.l_fixed;
    a.opt.tol.verbose  = a.verbose;
    const GridParams& g = a.opt.grid;
    std::printf("# specrec recover %s --method %s --p %lld --q %lld --b %lld --eps %s "
                "--eps-err %s --max-itr %d%s --tau %s --gamma %s%s --banm-iter %d --prune %s\n",
                a.input.c_str(), to_string(method).c_str(), static_cast<long long>(g.p),
                static_cast<long long>(g.q_stride), static_cast<long long>(g.b),
                num(g.epsilon).c_str(), num(g.eps_err).c_str(), g.max_itr,
                g.circular_blocks ? " --circular" : "", num(a.opt.banm.tau).c_str(),
                num(a.opt.banm.gamma).c_str(),
                a.l_fixed ? (" --l " + std::to_string(*a.l_fixed)).c_str() : "",
                a.opt.banm.max_iter, num(a.opt.prune_fraction).c_str());

    const RecoveryResult r = run_method(method, inst, a.opt);

    std::printf("method %s: status %s, %zu frequencies, %d iterations, %.3f s\n",
                to_string(method).c_str(), r.status.c_str(), r.est_freqs.size(), r.iterations,
                r.seconds);
    for (std::size_t j = 0; j < r.est_freqs.size(); ++j)
    {
        std::printf("  f = %.10f  c = %+.6f %+.6fi  |c| = %.6f\n", r.est_freqs[j],
                    r.est_coeffs[j].real(), r.est_coeffs[j].imag(), std::abs(r.est_coeffs[j]));
    }
    for (const std::string& note : r.notes)
    {
        std::printf("  note: %s\n", note.c_str());
    }
    std::optional<SuccessReport> truth;
    if (!inst.freqs.empty())
    {
        truth = success_metric(inst.freqs, r.est_freqs);
        std::printf("error vs truth: %s (%s)\n", num(truth->error).c_str(),
                    truth->success ? "success" : "failure");
    }

    if (!a.json_out.empty())
    {
        nlohmann::json j;
        j["method"]  = to_string(method);
        j["status"]  = r.status;
        j["ok"]      = r.ok;
        j["freqs"]   = r.est_freqs;
        std::vector<double> re, im;
        for (const cdouble& c : r.est_coeffs)
        {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        j["coeff_re"]   = re;
        j["coeff_im"]   = im;
        j["iterations"] = r.iterations;
        j["seconds"]    = r.seconds;
        j["notes"]      = r.notes;
        if (truth)
        {
            j["success"] = truth->success;
            // JSON has no infinity; a count mismatch is written as null.
            j["err_l2"] = std::isfinite(truth->error) ? nlohmann::json(truth->error) : nlohmann::json();
        }
        std::ofstream f(a.json_out);
        f << j.dump(2) << '\n';
        if (!f)
        {
            throw UsageError("cannot write '" + a.json_out + "'");
        }
    }
    return r.ok ? kExitOk : kExitFailure;
}

SweepConfig sweep_config(const SweepArgs& a, const std::string& default_preset)
{
    try
    {
        SweepConfig cfg = sweep_preset(a.preset.empty() ? default_preset : a.preset);
        if (!a.config.empty())
        {
            std::ifstream f(a.config);
            if (!f)
            {
                throw UsageError("cannot read config '" + a.config + "'");
            }
            cfg = parse_sweep_config(f, cfg);
        }
        for (const std::string& s : a.sets)
        {
            const auto eq = s.find('=');
            if (eq == std::string::npos)
            {
                throw UsageError("--set expects key=value, got '" + s + "'");
            }
            set_sweep_option(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (a.jobs > 0)
        {
            cfg.jobs = a.jobs;
        }
        if (!a.out_dir.empty())
        {
            cfg.output = a.out_dir;
        }
        cfg.validate();
        return cfg;
    }
    catch (const std::invalid_argument& e)
    {
        throw UsageError(e.what());
    }
}

void print_effective(const std::string& verb, const SweepConfig& cfg)
{
    std::printf("# specrec %s --preset fig2", verb.c_str());
    std::istringstream lines(describe(cfg));
    std::string line;
    while (std::getline(lines, line))
    {
        const auto eq = line.find(" = ");
        std::printf(" --set %s=%s", line.substr(0, eq).c_str(), line.substr(eq + 3).c_str());
    }
    std::printf("\n");
}

void write_outputs(const SweepConfig& cfg, const SweepResult& res, bool svg, bool timing)
{
    if (cfg.output.empty())
    {
        write_aggregate_csv(std::cout, res.cells);
        return;
    }
    const fs::path dir = cfg.output;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
    {
        throw UsageError("cannot create '" + dir.string() + "': " + ec.message());
    }
    auto open = [&](const std::string& name) {
        std::ofstream f(dir / name);
        if (!f)
        {
            throw UsageError("cannot write '" + (dir / name).string() + "'");
        }
        return f;
    };
    {
        auto f = open("config.txt");
        f << describe(cfg);
    }
    {
        auto f = open("trials.csv");
        write_records_csv(f, res.records);
    }
    {
        auto f = open("aggregate.csv");
        write_aggregate_csv(f, res.cells);
    }
    if (svg)
    {
        auto f = open(timing ? "timing.svg" : "probability.svg");
        timing ? write_timing_svg(f, res.cells) : write_probability_svg(f, res.cells);
    }
    write_aggregate_csv(std::cout, res.cells);
    std::printf("wrote %s\n", dir.string().c_str());
}

int cmd_sweep(const SweepArgs& a, bool timing)
{
    const SweepConfig cfg = sweep_config(a, timing ? "fig4-desk" : "fig2-desk");
    const std::string verb = timing ? "timing" : "sweep";
    print_effective(verb, cfg);

    if (a.dry_run)
    {
        std::printf("method,n,k,m,trials\n");
        for (Method method : cfg.methods)
        {
            if (timing)
            {
                for (Index n : cfg.timing_ns)
                {
                    std::printf("%s,%lld,%lld,%lld,%d\n", to_string(method).c_str(),
                                static_cast<long long>(n), static_cast<long long>(cfg.ks.front()),
                                static_cast<long long>(n / 2), cfg.trials);
                }
                continue;
            }
            for (Index k : cfg.ks)
            {
                for (Index m : cfg.ms)
                {
                    std::printf("%s,%lld,%lld,%lld,%d\n", to_string(method).c_str(),
                                static_cast<long long>(cfg.n), static_cast<long long>(k),
                                static_cast<long long>(m), cfg.trials);
                }
            }
        }
        return kExitOk;
    }

    ProgressFn progress;
    if (!a.quiet)
    {
        progress = [](std::size_t done, std::size_t total) {
            std::fprintf(stderr, "\r%zu/%zu trials", done, total);
            if (done == total)
            {
                std::fprintf(stderr, "\n");
            }
        };
    }
    const SweepResult res = timing ? run_timing(cfg, progress) : run_sweep(cfg, progress);
    write_outputs(cfg, res, a.svg, timing);
    return kExitOk;
}

void add_grid_flags(CLI::App& cmd, RecoveryOptions& opt, std::optional<Index>& l_fixed)
{
    GridParams& g = opt.grid;
    cmd.add_option("--p", g.p, "dictionary size")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--q", g.q_stride, "initial grid stride")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--b", g.b, "block width (even)")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd.add_option("--eps", g.epsilon, "reweighting constant")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--eps-err", g.eps_err, "l1 loop convergence tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--max-itr", g.max_itr, "l1 loop iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_flag("--circular", g.circular_blocks, "wrap index blocks around the grid ends");
    cmd.add_option("--tau", opt.banm.tau, "block half-width (0 = max(1/n, b/(2p)))")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd.add_option("--gamma", opt.banm.gamma, "relative magnitude for block centers")->capture_default_str();
    cmd.add_option("--l", l_fixed, "use the l largest estimates as block centers");
    cmd.add_option("--banm-iter", opt.banm.max_iter, "block SDP iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--prune", opt.prune_fraction, "drop components below this fraction of the largest")->capture_default_str();
}

void add_sweep_flags(CLI::App& cmd, SweepArgs& a)
{
    cmd.add_option("--preset", a.preset, "named configuration")->check(CLI::IsMember(preset_names()));
    cmd.add_option("--config", a.config, "key = value configuration file");
    cmd.add_option("--set", a.sets, "override one key (key=value), repeatable");
    cmd.add_option("--out", a.out_dir, "output directory for CSV files");
    cmd.add_option("--jobs", a.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd.add_flag("--dry-run", a.dry_run, "print the cell matrix without solving");
    cmd.add_flag("--svg", a.svg, "also write an SVG chart");
    cmd.add_flag("--quiet", a.quiet, "no progress output");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral recovery from random time samples"};
    app.require_subcommand(1);

    GenArgs gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "write a random instance as JSON");
    gen_cmd->add_option("--n", gen.n, "signal length")->capture_default_str();
    gen_cmd->add_option("--k", gen.k, "number of frequencies")->capture_default_str();
    gen_cmd->add_option("--m", gen.m, "number of observed samples")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "random seed")->capture_default_str();
    gen_cmd->add_option("--min-sep", gen.min_sep, "minimum circular separation")->capture_default_str();
    gen_cmd->add_option("--out,-o", gen.out, "output file (stdout when omitted)");

    RecoverArgs rec;
    CLI::App* rec_cmd = app.add_subcommand("recover", "recover frequencies from an instance file");
    rec_cmd->add_option("instance", rec.input, "instance JSON")->required();
    rec_cmd->add_option("--method", rec.method, "anm, banm, banm-mix or bl1m")->capture_default_str();
    rec_cmd->add_option("--json", rec.json_out, "write the result as JSON");
    rec_cmd->add_flag("--verbose", rec.verbose, "print solver iterations");
    add_grid_flags(*rec_cmd, rec.opt, rec.l_fixed);

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "success probability over (k, m)");
    add_sweep_flags(*sweep_cmd, sweep);

    SweepArgs timing;
    CLI::App* timing_cmd = app.add_subcommand("timing", "mean wall-clock over n with m = n/2");
    add_sweep_flags(*timing_cmd, timing);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return kExitUsage;
    }

    try
    {
        if (*gen_cmd)
        {
            return cmd_gen(gen);
        }
        if (*rec_cmd)
        {
            return cmd_recover(rec);
        }
        if (*sweep_cmd)
        {
            return cmd_sweep(sweep, false);
        }
        return cmd_sweep(timing, true);
    }
    catch (const UsageError& e)
    {
        std::fprintf(stderr, "specrec: %s\n", e.what());
        return kExitUsage;
    }
    catch (const std::invalid_argument& e)
    {
        std::fprintf(stderr, "specrec: %s\n", e.what());
        return kExitUsage;
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "specrec: %s\n", e.what());
        return kExitFailure;
    }
}

#include <spectral/bench.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <spectral/rng.hpp>

namespace spectral
{

namespace
{

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep))
    {
        out.push_back(trim(item));
    }
    if (!s.empty() && s.back() == sep)
    {
        out.emplace_back();
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text)
{
    T v{};
    const char* first = text.data();
    const char* last  = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
    {
        throw std::invalid_argument("bad value '" + text + "' for " + key);
    }
    return v;
}

/// "8,12,16" or "8:25" or "120:470:50".
std::vector<Index> parse_index_list(const std::string& key, const std::string& text)
{
    std::vector<Index> out;
    for (const std::string& item : split(text, ','))
    {
        const auto parts = split(item, ':');
        if (parts.size() == 1)
        {
            out.push_back(parse_number<Index>(key, parts[0]));
            continue;
        }
        if (parts.size() > 3)
        {
            throw std::invalid_argument("bad range '" + item + "' for " + key);
        }
        const Index lo   = parse_number<Index>(key, parts[0]);
        const Index hi   = parse_number<Index>(key, parts[1]);
        const Index step = parts.size() == 3 ? parse_number<Index>(key, parts[2]) : 1;
        if (step < 1 || hi < lo)
        {
            throw std::invalid_argument("bad range '" + item + "' for " + key);
        }
        for (Index v = lo; v <= hi; v += step)
        {
            out.push_back(v);
        }
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "1" || text == "true" || text == "yes")
    {
        return true;
    }
    if (text == "0" || text == "false" || text == "no")
    {
        return false;
    }
    throw std::invalid_argument("bad value '" + text + "' for " + key);
}

std::string fmt(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& v, const auto& conv)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i)
    {
        out += (i ? "," : "") + conv(v[i]);
    }
    return out;
}

std::string fixed3(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    return std::string(buf, res.ptr);
}

} // namespace

void SweepConfig::validate() const
{
    if (n < 1)
    {
        throw std::invalid_argument("n must be positive");
    }
    if (trials < 1)
    {
        throw std::invalid_argument("trials must be at least 1");
    }
    if (methods.empty())
    {
        throw std::invalid_argument("at least one method is required");
    }
    if (ks.empty() || ms.empty())
    {
        throw std::invalid_argument("k and m lists must be nonempty");
    }
    for (Index k : ks)
    {
        if (k < 1)
        {
            throw std::invalid_argument("k must be positive");
        }
    }
    for (Index m : ms)
    {
        if (m < 1 || m > n)
        {
            throw std::invalid_argument("m must lie in 1..n");
        }
    }
    for (Index t : timing_ns)
    {
        if (t < 2)
        {
            throw std::invalid_argument("timing n must be at least 2");
        }
    }
    if (grid.p < 1 || grid.q_stride < 1 || grid.b < 0 || grid.b % 2 != 0)
    {
        throw std::invalid_argument("grid needs p, q >= 1 and an even b >= 0");
    }
    if (!(grid.epsilon > 0.0) || !(grid.eps_err > 0.0) || grid.max_itr < 1)
    {
        throw std::invalid_argument("eps and eps_err must be positive, max_itr >= 1");
    }
    if (min_sep < 0.0 || jobs < 1)
    {
        throw std::invalid_argument("min_sep must be >= 0 and jobs >= 1");
    }
}

void set_sweep_option(SweepConfig& cfg, const std::string& key, const std::string& value)
{
    if (key == "n")
    {
        cfg.n = parse_number<Index>(key, value);
    }
    else if (key == "k")
    {
        cfg.ks = parse_index_list(key, value);
    }
    else if (key == "m")
    {
        cfg.ms = parse_index_list(key, value);
    }
    else if (key == "trials")
    {
        cfg.trials = parse_number<int>(key, value);
    }
    else if (key == "methods")
    {
        cfg.methods.clear();
        for (const std::string& name : split(value, ','))
        {
            cfg.methods.push_back(parse_method(name));
        }
    }
    else if (key == "seed")
    {
        cfg.base_seed = parse_number<std::uint64_t>(key, value);
    }
    else if (key == "p")
    {
        cfg.grid.p = parse_number<Index>(key, value);
    }
    else if (key == "q")
    {
        cfg.grid.q_stride = parse_number<Index>(key, value);
    }
    else if (key == "b")
    {
        cfg.grid.b = parse_number<Index>(key, value);
    }
    else if (key == "eps")
    {
        cfg.grid.epsilon = parse_number<double>(key, value);
    }
    else if (key == "eps_err")
    {
        cfg.grid.eps_err = parse_number<double>(key, value);
    }
    else if (key == "max_itr")
    {
        cfg.grid.max_itr = parse_number<int>(key, value);
    }
    else if (key == "circular")
    {
        cfg.grid.circular_blocks = parse_bool(key, value);
    }
    else if (key == "tau")
    {
        cfg.banm.tau = parse_number<double>(key, value);
    }
    else if (key == "gamma")
    {
        cfg.banm.gamma = parse_number<double>(key, value);
    }
    else if (key == "banm_iter")
    {
        cfg.banm.max_iter = parse_number<int>(key, value);
    }
    else if (key == "min_sep")
    {
        cfg.min_sep = parse_number<double>(key, value);
    }
    else if (key == "timing_n")
    {
        cfg.timing_ns = parse_index_list(key, value);
    }
    else if (key == "jobs")
    {
        cfg.jobs = parse_number<int>(key, value);
    }
    else if (key == "output")
    {
        cfg.output = value;
    }
    else
    {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

SweepConfig parse_sweep_config(std::istream& in, SweepConfig base)
{
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#')
        {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
        {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
        }
        set_sweep_option(base, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    base.validate();
    return base;
}

std::string describe(const SweepConfig& cfg)
{
    auto idx = [](Index v) { return std::to_string(v); };
    std::ostringstream out;
    out << "n = " << cfg.n << '\n'
        << "k = " << join(cfg.ks, idx) << '\n'
        << "m = " << join(cfg.ms, idx) << '\n'
        << "trials = " << cfg.trials << '\n'
        << "methods = " << join(cfg.methods, [](Method m) { return to_string(m); }) << '\n'
        << "seed = " << cfg.base_seed << '\n'
        << "p = " << cfg.grid.p << '\n'
        << "q = " << cfg.grid.q_stride << '\n'
        << "b = " << cfg.grid.b << '\n'
        << "eps = " << fmt(cfg.grid.epsilon) << '\n'
        << "eps_err = " << fmt(cfg.grid.eps_err) << '\n'
        << "max_itr = " << cfg.grid.max_itr << '\n'
        << "circular = " << (cfg.grid.circular_blocks ? "true" : "false") << '\n'
        << "tau = " << fmt(cfg.banm.tau) << '\n'
        << "gamma = " << fmt(cfg.banm.gamma) << '\n'
        << "banm_iter = " << cfg.banm.max_iter << '\n'
        << "min_sep = " << fmt(cfg.min_sep) << '\n'
        << "timing_n = " << join(cfg.timing_ns, idx) << '\n'
        << "jobs = " << cfg.jobs << '\n';
    if (!cfg.output.empty())
    {
        out << "output = " << cfg.output << '\n';
    }
    return out.str();
}

std::vector<std::string> preset_names()
{
    return {"fig2", "fig2-desk", "fig4", "fig4-desk"};
}

SweepConfig sweep_preset(const std::string& name)
{
    SweepConfig cfg;
    if (name == "fig2")
    {
        return cfg;
    }
    if (name == "fig2-desk")
    {
        cfg.ms     = {12, 16, 20, 24};
        cfg.trials = 20;
        return cfg;
    }
    if (name == "fig4" || name == "fig4-desk")
    {
        cfg.grid.p = 16384;
        cfg.methods = {Method::anm, Method::banm_mix, Method::bl1m};
        cfg.trials  = 10;
        if (name == "fig4-desk")
        {
            cfg.timing_ns = {120};
            cfg.methods   = {Method::anm, Method::bl1m};
            cfg.trials    = 3;
        }
        return cfg;
    }
    throw std::invalid_argument("unknown preset '" + name + "'");
}

std::uint64_t trial_seed(std::uint64_t base_seed, Index n, Index k, Index m, int trial)
{
    std::uint64_t h = mix_seed(static_cast<std::uint64_t>(n));
    h = mix_seed(h ^ static_cast<std::uint64_t>(k));
    h = mix_seed(h ^ static_cast<std::uint64_t>(m));
    return base_seed + h + static_cast<std::uint64_t>(trial);
}

namespace
{

struct WorkItem
{
    Method method;
    Index n;
    Index k;
    Index m;
    int trial;
};

TrialRecord run_item(const WorkItem& w, const SweepConfig& cfg)
{
    TrialRecord r;
    r.method = w.method;
    r.n      = w.n;
    r.k      = w.k;
    r.m      = w.m;
    r.trial  = w.trial;
    r.seed   = trial_seed(cfg.base_seed, w.n, w.k, w.m, w.trial);

    const SpectralInstance inst = random_instance(w.n, w.k, w.m, r.seed, cfg.min_sep);
    RecoveryOptions opt;
    opt.grid = cfg.grid;
    opt.banm = cfg.banm;
    try
    {
        const RecoveryResult res = run_method(w.method, inst, opt);
        const SuccessReport rep  = success_metric(inst.freqs, res.est_freqs);
        r.success    = res.ok && rep.success;
        r.err_l2     = rep.error;
        r.seconds    = res.seconds;
        r.iterations = res.iterations;
    }
    catch (const std::exception&)
    {
        // A failing trial is recorded and the sweep continues.
        r.success = false;
        r.err_l2  = std::numeric_limits<double>::infinity();
    }
    return r;
}

std::vector<TrialRecord> run_items(const std::vector<WorkItem>& items, const SweepConfig& cfg,
                                   const ProgressFn& progress)
{
    std::vector<TrialRecord> records(items.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex report;
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++)
        {
            records[i] = run_item(items[i], cfg);
            const std::size_t d = ++done;
            if (progress)
            {
                std::lock_guard lock(report);
                progress(d, items.size());
            }
        }
    };
    const auto workers = static_cast<std::size_t>(std::max(1, cfg.jobs));
    if (workers == 1)
    {
        worker();
        return records;
    }
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(workers, items.size()); ++t)
    {
        pool.emplace_back(worker);
    }
    pool.clear();
    return records;
}

} // namespace

SweepResult run_sweep(const SweepConfig& cfg, const ProgressFn& progress)
{
    cfg.validate();
    std::vector<WorkItem> items;
    for (Method method : cfg.methods)
    {
        for (Index k : cfg.ks)
        {
            for (Index m : cfg.ms)
            {
                for (int t = 0; t < cfg.trials; ++t)
                {
                    items.push_back({method, cfg.n, k, m, t});
                }
            }
        }
    }
    SweepResult out;
    out.records = run_items(items, cfg, progress);
    out.cells   = aggregate(out.records);
    return out;
}

SweepResult run_timing(const SweepConfig& cfg, const ProgressFn& progress)
{
    cfg.validate();
    if (cfg.timing_ns.empty())
    {
        throw std::invalid_argument("timing needs at least one n");
    }
    std::vector<WorkItem> items;
    for (Method method : cfg.methods)
    {
        for (Index n : cfg.timing_ns)
        {
            for (int t = 0; t < cfg.trials; ++t)
            {
                items.push_back({method, n, cfg.ks.front(), n / 2, t});
            }
        }
    }
    SweepResult out;
    out.records = run_items(items, cfg, progress);
    out.cells   = aggregate(out.records);
    return out;
}

std::vector<CellSummary> aggregate(const std::vector<TrialRecord>& records)
{
    // Cells keep the order in which they first appear.
    std::vector<CellSummary> cells;
    std::map<std::tuple<Method, Index, Index, Index>, std::size_t> where;
    std::vector<std::vector<double>> times;
    for (const TrialRecord& r : records)
    {
        const auto key = std::make_tuple(r.method, r.n, r.k, r.m);
        auto it        = where.find(key);
        if (it == where.end())
        {
            it = where.emplace(key, cells.size()).first;
            cells.push_back({r.method, r.n, r.k, r.m});
            times.emplace_back();
        }
        CellSummary& c = cells[it->second];
        ++c.trials;
        c.successes += r.success ? 1 : 0;
        times[it->second].push_back(r.seconds);
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        CellSummary& c = cells[i];
        const auto& t  = times[i];
        c.probability  = static_cast<double>(c.successes) / c.trials;
        double mean    = 0.0;
        for (double s : t)
        {
            mean += s;
        }
        mean /= static_cast<double>(t.size());
        double var = 0.0;
        for (double s : t)
        {
            var += (s - mean) * (s - mean);
        }
        c.mean_seconds = mean;
        c.sd_seconds   = t.size() > 1 ? std::sqrt(var / static_cast<double>(t.size() - 1)) : 0.0;
    }
    return cells;
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records)
{
    out << "method,n,k,m,trial,seed,success,err_l2,seconds,iters\n";
    for (const TrialRecord& r : records)
    {
        out << to_string(r.method) << ',' << r.n << ',' << r.k << ',' << r.m << ','
            << r.trial << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
            << fmt(r.err_l2) << ',' << fmt(r.seconds) << ',' << r.iterations << '\n';
    }
    if (!out)
    {
        throw std::runtime_error("failed writing trial records");
    }
}

std::vector<TrialRecord> parse_records_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != "method,n,k,m,trial,seed,success,err_l2,seconds,iters")
    {
        throw std::invalid_argument("trial CSV: missing or unexpected header");
    }
    std::vector<TrialRecord> out;
    while (std::getline(in, line))
    {
        if (trim(line).empty())
        {
            continue;
        }
        const auto f = split(trim(line), ',');
        if (f.size() != 10)
        {
            throw std::invalid_argument("trial CSV: expected 10 fields in '" + line + "'");
        }
        TrialRecord r;
        r.method     = parse_method(f[0]);
        r.n          = parse_number<Index>("n", f[1]);
        r.k          = parse_number<Index>("k", f[2]);
        r.m          = parse_number<Index>("m", f[3]);
        r.trial      = parse_number<int>("trial", f[4]);
        r.seed       = parse_number<std::uint64_t>("seed", f[5]);
        r.success    = parse_bool("success", f[6]);
        r.err_l2     = parse_number<double>("err_l2", f[7]);
        r.seconds    = parse_number<double>("seconds", f[8]);
        r.iterations = parse_number<int>("iters", f[9]);
        out.push_back(r);
    }
    return out;
}

void write_aggregate_csv(std::ostream& out, const std::vector<CellSummary>& cells)
{
    if (cells.empty())
    {
        throw std::invalid_argument("aggregate table is empty");
    }
    out << "method,n,k,m,P,mean_seconds\n";
    for (const CellSummary& c : cells)
    {
        out << to_string(c.method) << ',' << c.n << ',' << c.k << ',' << c.m << ','
            << fixed3(c.probability) << ',' << fmt(c.mean_seconds) << '\n';
    }
    if (!out)
    {
        throw std::runtime_error("failed writing aggregate table");
    }
}

namespace
{

struct Series
{
    std::string label;
    std::vector<std::pair<double, double>> points;
};

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

void write_chart(std::ostream& out, const std::vector<Series>& series,
                 const std::string& x_label, const std::string& y_label,
                 double y_min, double y_max)
{
    constexpr double W = 640, H = 420, L = 70, R = 170, T = 20, B = 50;
    double x_min = 0, x_max = 1;
    bool first   = true;
    for (const Series& s : series)
    {
        for (const auto& [x, y] : s.points)
        {
            x_min = first ? x : std::min(x_min, x);
            x_max = first ? x : std::max(x_max, x);
            first = false;
        }
    }
    if (x_max <= x_min)
    {
        x_max = x_min + 1;
    }
    if (y_max <= y_min)
    {
        y_max = y_min + 1;
    }
    auto sx = [&](double x) { return L + (x - x_min) / (x_max - x_min) * (W - L - R); };
    auto sy = [&](double y) { return H - B - (y - y_min) / (y_max - y_min) * (H - T - B); };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i)
    {
        const double xv = x_min + (x_max - x_min) * i / 4.0;
        const double yv = y_min + (y_max - y_min) * i / 4.0;
        out << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
            << fmt(std::round(xv * 100) / 100) << "</text>\n"
            << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">"
            << fmt(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">"
        << x_label << "</text>\n"
        << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i)
    {
        const char* color = kPalette[i % std::size(kPalette)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& [x, y] : series[i].points)
        {
            out << sx(x) << ',' << sy(y) << ' ';
        }
        out << "\"/>\n";
        const double ly = T + 16.0 * static_cast<double>(i + 1);
        out << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 32
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << W - R + 38 << "\" y=\"" << ly << "\">" << series[i].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace

void write_probability_svg(std::ostream& out, const std::vector<CellSummary>& cells)
{
    std::map<std::pair<Method, Index>, Series> by_line;
    std::vector<std::pair<Method, Index>> order;
    for (const CellSummary& c : cells)
    {
        const auto key = std::make_pair(c.method, c.k);
        if (!by_line.contains(key))
        {
            order.push_back(key);
            by_line[key].label = to_string(c.method) + " k=" + std::to_string(c.k);
        }
        by_line[key].points.emplace_back(static_cast<double>(c.m), c.probability);
    }
    std::vector<Series> series;
    for (const auto& key : order)
    {
        Series s = by_line[key];
        std::sort(s.points.begin(), s.points.end());
        series.push_back(std::move(s));
    }
    write_chart(out, series, "m", "P", 0.0, 1.0);
}

void write_timing_svg(std::ostream& out, const std::vector<CellSummary>& cells)
{
    std::map<Method, Series> by_method;
    std::vector<Method> order;
    double top = 0.0;
    for (const CellSummary& c : cells)
    {
        if (!by_method.contains(c.method))
        {
            order.push_back(c.method);
            by_method[c.method].label = to_string(c.method);
        }
        by_method[c.method].points.emplace_back(static_cast<double>(c.n), c.mean_seconds);
        top = std::max(top, c.mean_seconds);
    }
    std::vector<Series> series;
    for (Method m : order)
    {
        Series s = by_method[m];
        std::sort(s.points.begin(), s.points.end());
        series.push_back(std::move(s));
    }
    write_chart(out, series, "n", "seconds", 0.0, top);
}

} // namespace spectral

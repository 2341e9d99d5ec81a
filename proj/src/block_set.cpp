#include <spectral/block_set.hpp>
#include <spectral/core.hpp>

#include <algorithm>
#include <cmath>

namespace spectral
{

FrequencyBlockSet FrequencyBlockSet::full_band()
{
    FrequencyBlockSet s;
    s.arcs_.push_back({0.0, 1.0});
    return s;
}

FrequencyBlockSet FrequencyBlockSet::around(std::span<const double> centers,
                                            double half_width)
{
    if (!(half_width > 0.0))
    {
        throw std::invalid_argument("FrequencyBlockSet::around: half_width must be positive");
    }
    std::vector<Arc> raw;
    raw.reserve(centers.size());
    for (double c : centers)
    {
        raw.push_back({c - half_width, c + half_width});
    }
    return from_intervals(raw);
}

FrequencyBlockSet FrequencyBlockSet::from_intervals(std::span<const Arc> intervals)
{
    std::vector<Arc> pieces;
    for (const Arc& a : intervals)
    {
        if (!(a.hi > a.lo))
        {
            continue;
        }
        if (a.hi - a.lo >= 1.0)
        {
            return full_band();
        }
        const double shift = std::floor(a.lo);
        const double lo    = a.lo - shift;
        const double hi    = a.hi - shift;
        if (hi <= 1.0)
        {
            pieces.push_back({lo, hi});
        }
        else
        {
            pieces.push_back({lo, 1.0});
            pieces.push_back({0.0, hi - 1.0});
        }
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Arc& x, const Arc& y) { return x.lo < y.lo; });

    FrequencyBlockSet s;
    for (const Arc& p : pieces)
    {
        if (!s.arcs_.empty() && p.lo <= s.arcs_.back().hi)
        {
            s.arcs_.back().hi = std::max(s.arcs_.back().hi, p.hi);
        }
        else
        {
            s.arcs_.push_back(p);
        }
    }
    return s;
}

bool FrequencyBlockSet::is_full_band() const
{
    return arcs_.size() == 1 && arcs_.front().lo <= 0.0 &&
           arcs_.front().hi >= 1.0;
}

double FrequencyBlockSet::measure() const
{
    double total = 0.0;
    for (const Arc& a : arcs_)
    {
        total += a.width();
    }
    return total;
}

bool FrequencyBlockSet::contains(double f) const
{
    const double w = wrap_frequency(f);
    for (const Arc& a : arcs_)
    {
        if (a.contains(w) || (a.hi >= 1.0 && w == 0.0))
        {
            return true;
        }
    }
    return false;
}

FrequencyBlockSet FrequencyBlockSet::split_at_half(double nudge) const
{
    constexpr double kHalfSnap = 1e-9;
    FrequencyBlockSet out;
    for (const Arc& a : arcs_)
    {
        double lo = a.lo;
        double hi = a.hi;
        if (std::abs(lo - 0.5) <= kHalfSnap)
        {
            lo = 0.5;
        }
        if (std::abs(hi - 0.5) <= kHalfSnap)
        {
            hi = 0.5;
        }
        if (hi <= 0.5 || lo >= 0.5)
        {
            if (hi == 0.5)
            {
                hi -= nudge;
            }
            if (lo == 0.5)
            {
                lo += nudge;
            }
            if (hi > lo)
            {
                out.arcs_.push_back({lo, hi});
            }
            continue;
        }
        if (0.5 - nudge > lo)
        {
            out.arcs_.push_back({lo, 0.5 - nudge});
        }
        if (hi > 0.5 + nudge)
        {
            out.arcs_.push_back({0.5 + nudge, hi});
        }
    }
    return out;
}

} // namespace spectral

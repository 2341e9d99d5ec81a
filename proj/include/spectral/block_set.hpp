#ifndef SPECTRAL_BLOCK_SET_HPP
#define SPECTRAL_BLOCK_SET_HPP

#include <span>
#include <vector>

namespace spectral
{

/// Closed interval [lo, hi] of normalized frequency, 0 <= lo < hi <= 1.
struct Arc
{
    double lo{0};
    double hi{0};

    double width() const { return hi - lo; }
    bool contains(double f) const { return f >= lo && f <= hi; }
    friend bool operator==(const Arc&, const Arc&) = default;
};

///
/// A union of disjoint arcs of the unit frequency circle.
///
/// Arcs are kept sorted and disjoint. Arcs that cross the 0/1 seam are stored
/// as two pieces. `split_at_half` additionally cuts every arc around 0.5 so
/// each piece lies in a single tangent branch of the arc parameterization.
///
class FrequencyBlockSet
{
public:
    FrequencyBlockSet() = default;

    /// The whole circle, [0, 1].
    static FrequencyBlockSet full_band();

    ///
    /// Union of [center - half_width, center + half_width] over the given
    /// centers, wrapped onto the circle and merged.
    ///
    static FrequencyBlockSet around(std::span<const double> centers,
                                    double half_width);

    /// Normalizes an arbitrary list of intervals (wrapping, merging).
    static FrequencyBlockSet from_intervals(std::span<const Arc> intervals);

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }
    bool is_full_band() const;
    double measure() const;

    /// Membership test on the circle (f is wrapped into [0, 1)).
    bool contains(double f) const;

    ///
    /// Copy with every arc cut at 0.5, leaving a gap of `nudge` on each side
    /// of the cut, so that no endpoint equals 0.5. Arcs that touch 0 or 1
    /// are left alone; the seam is already a cut.
    ///
    FrequencyBlockSet split_at_half(double nudge = 1e-6) const;

    friend bool operator==(const FrequencyBlockSet&,
                           const FrequencyBlockSet&) = default;

private:
    std::vector<Arc> arcs_;
};

} // namespace spectral

#endif // SPECTRAL_BLOCK_SET_HPP

#pragma once

#include <cstddef>
#include <vector>

#include "chanstat/channel_record.hpp"
#include "chanstat/dpss.hpp"
#include "chanstat/synth.hpp"
#include "chanstat/types.hpp"

namespace chanstat {

// Sliding-region layout over a record.  Region (k_t, k_f), zero-based,
// covers rows [k_t*delta_t, k_t*delta_t + n) and columns
// [k_f*delta_f, k_f*delta_f + m).
struct RegionPlan {
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t delta_t = 1;
    std::size_t delta_f = 1;
    std::size_t k_t_count = 0;
    std::size_t k_f_count = 0;

    std::size_t region_count() const { return k_t_count * k_f_count; }
};

RegionPlan plan_regions(Dims dims, std::size_t n, std::size_t m,
                        std::size_t delta_t, std::size_t delta_f);

// Multitaper local scattering estimates: one non-negative n x m power matrix
// per region, rows indexed by the shifted Doppler axis, columns by delay.
struct LsfGrid {
    RegionPlan plan;
    double t_s = 0.0;
    double f_s = 0.0;
    std::size_t taper_count = 0;        // windows averaged per region
    std::vector<double> doppler_axis;   // n entries, hertz, ascending through 0
    std::vector<double> delay_axis;     // m entries, seconds, from 0
    std::vector<RMat> lsf;              // k_t_count * k_f_count matrices

    RMat& at(std::size_t k_t, std::size_t k_f) { return lsf[k_t * plan.k_f_count + k_f]; }
    const RMat& at(std::size_t k_t, std::size_t k_f) const {
        return lsf[k_t * plan.k_f_count + k_f];
    }
};

// Per-region tapered power spectra over (Doppler, delay): for each window w,
// the unitary 2-D transform of the windowed region, magnitude-squared, then
// averaged over windows.  Parallel across regions; results independent of
// the thread count.
LsfGrid lsf_estimate(const ChannelRecord& record, const RegionPlan& plan,
                     const TaperGrid& tapers, std::size_t threads = 0);

// Doppler power profile per time region: delay-mean of each region LSF,
// averaged over the frequency region index.  k_t_count x n.
RMat doppler_power_profile(const LsfGrid& grid);

// Delay power profile per frequency region: Doppler-mean per region LSF,
// averaged over the time region index.  k_f_count x m.
RMat delay_power_profile(const LsfGrid& grid);

// Second-moment spreads per region, region-major (k_t * k_f_count + k_f).
// Zero-energy regions yield NaN.
struct SpreadSeries {
    std::vector<double> tau_rms;  // seconds
    std::vector<double> nu_rms;   // hertz
};

SpreadSeries rms_spreads(const LsfGrid& grid);

struct CoherenceBounds {
    double coherence_time = 0.0;       // seconds
    double coherence_bandwidth = 0.0;  // hertz
};

// Reciprocal-spread bounds; zero spread maps to infinity, NaN passes through.
CoherenceBounds coherence_bounds(double tau_rms, double nu_rms);

// Median power over the largest-delay guard_fraction of bins across every
// region, corrected for the Gamma(taper_count) median bias and rescaled to
// per-sample units (dB).  A grid whose guard bins are all zero gives -inf.
double estimate_noise_floor(const LsfGrid& grid, double guard_fraction = 0.25);

// Zeroes every bin below floor_db + margin_db (per-sample dB, converted to
// the per-bin scale internally).
LsfGrid noise_threshold(const LsfGrid& grid, double floor_db, double margin_db = 10.0);

// Per-column sliding-block Doppler filter: non-overlapping blocks of
// block_len snapshots (final partial block zero-padded), unitary DFT, bins
// with center frequency outside [keep_lo_hz, keep_hi_hz] zeroed, inverse
// transform.  Metadata is preserved; the label is annotated.
ChannelRecord doppler_mask(const ChannelRecord& record, std::size_t block_len,
                           double keep_lo_hz, double keep_hi_hz, std::size_t threads = 0);

}  // namespace chanstat

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "chanstat/channel_record.hpp"
#include "chanstat/types.hpp"

namespace chanstat {

struct Dims {
    std::size_t s = 0;  // time snapshots
    std::size_t q = 0;  // frequency bins
};

struct Sampling {
    double t_s = 0.0;
    double f_s = 0.0;
    double f_carrier = 0.0;
};

// Piecewise-linear scalar trajectory over record time.  Values are clamped
// to the end breakpoints outside their span; a single breakpoint is a
// constant.
struct Trajectory {
    struct Point {
        double t = 0.0;
        double value = 0.0;
    };
    std::vector<Point> points;

    static Trajectory constant(double value) { return Trajectory{{{0.0, value}}}; }
    double at(double t) const;
};

// One deterministic propagation path: complex gain, delay trajectory
// (seconds), Doppler trajectory (hertz).  With randomize_phase set, a
// seed-derived uniform phase multiplies the gain.
struct SpecularPath {
    cplx gain{1.0, 0.0};
    Trajectory delay = Trajectory::constant(0.0);
    Trajectory doppler = Trajectory::constant(0.0);
    bool randomize_phase = false;
};

// Rayleigh tapped-delay-line spec: flat or Jakes Doppler shape of maximum
// Doppler nu_max, exponential power-delay profile of RMS spread tau_rms over
// num_taps taps (tap_powers overrides the exponential weights when set).
struct WssusSpec {
    enum class DopplerShape { flat, jakes };
    DopplerShape doppler_shape = DopplerShape::flat;
    double nu_max = 0.0;
    double tau_rms = 0.0;
    std::size_t num_taps = 1;
    std::size_t sinusoids_per_tap = 128;
    std::vector<double> tap_powers;  // optional, length num_taps
};

using SegmentModel = std::variant<WssusSpec, std::vector<SpecularPath>>;

struct Segment {
    SegmentModel model;
    double duration = 0.0;  // seconds
};

// H[s,q] = sum_p gain_p exp(j 2 pi nu_p(s t_s) s t_s) exp(-j 2 pi q f_s tau_p(s t_s)),
// with s and q zero-based.  Trajectories must stay unaliased over the record:
// 0 <= tau < 1/f_s and |nu| < 1/(2 t_s).
ChannelRecord gen_specular(const std::vector<SpecularPath>& paths, Dims dims,
                           Sampling sampling, std::uint64_t seed);

// Sum-of-sinusoids realization whose ensemble second-order statistics are
// time- and frequency-shift invariant.  Unit mean power.  Per-tap seed
// substreams keep realizations independent of evaluation order.
ChannelRecord gen_wssus(const WssusSpec& spec, Dims dims, Sampling sampling,
                        std::uint64_t seed);

// Concatenation in time of independent segment realizations; abrupt
// boundaries, no crossfade.  Segment sample counts are duration/t_s rounded,
// and must total dims.s.  A single segment reproduces the underlying
// generator exactly at the same seed.
ChannelRecord gen_piecewise(const std::vector<Segment>& segments, Dims dims,
                            Sampling sampling, std::uint64_t seed);

// Adds circular complex white Gaussian noise at the given SNR relative to
// the record's mean power, and stamps noise_floor_db accordingly.  An
// infinite snr_db returns the record unchanged.
ChannelRecord add_noise(const ChannelRecord& record, double snr_db, std::uint64_t seed);

// Deterministic substream derivation shared by the generators; index 0 maps
// to the seed itself.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index);

}  // namespace chanstat

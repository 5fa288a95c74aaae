#include "chanstat/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "chanstat/kernels.hpp"

namespace chanstat {

using std::numbers::pi;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

void check_sampling(const Dims& dims, const Sampling& sampling) {
    if (dims.s == 0 || dims.q == 0) throw ValidationError("synth: empty dimensions");
    if (!(sampling.t_s > 0.0) || !(sampling.f_s > 0.0)) {
        throw ValidationError("synth: sample spacings must be positive");
    }
}

// Piecewise-linear extremes sit at breakpoints and interval ends, so those
// are the only points that need checking.
void check_path_limits(const SpecularPath& path, double duration, const Sampling& sampling) {
    const double nu_limit = 0.5 / sampling.t_s;
    const double tau_limit = 1.0 / sampling.f_s;
    std::vector<double> probes{0.0, duration};
    for (const auto& p : path.doppler.points) probes.push_back(std::clamp(p.t, 0.0, duration));
    for (double t : probes) {
        if (!(std::abs(path.doppler.at(t)) < nu_limit)) {
            throw ValidationError("synth: doppler alias: |nu| reaches 1/(2 t_s)");
        }
    }
    probes.assign({0.0, duration});
    for (const auto& p : path.delay.points) probes.push_back(std::clamp(p.t, 0.0, duration));
    for (double t : probes) {
        const double tau = path.delay.at(t);
        if (!(tau >= 0.0) || !(tau < tau_limit)) {
            throw ValidationError("synth: delay alias: tau outside [0, 1/f_s)");
        }
    }
}

ChannelRecord make_record(Dims dims, const Sampling& sampling, std::string label) {
    ChannelRecord rec;
    rec.data = CMat(dims.s, dims.q);
    rec.t_s = sampling.t_s;
    rec.f_s = sampling.f_s;
    rec.f_carrier = sampling.f_carrier;
    rec.label = std::move(label);
    return rec;
}

}  // namespace

double Trajectory::at(double t) const {
    if (points.empty()) return 0.0;
    if (t <= points.front().t) return points.front().value;
    if (t >= points.back().t) return points.back().value;
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (t <= points[i].t) {
            const auto& a = points[i - 1];
            const auto& b = points[i];
            if (b.t == a.t) return b.value;
            const double frac = (t - a.t) / (b.t - a.t);
            return a.value + frac * (b.value - a.value);
        }
    }
    return points.back().value;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    if (index == 0) return seed;
    return splitmix64(seed ^ (salt * index));
}

ChannelRecord gen_specular(const std::vector<SpecularPath>& paths, Dims dims,
                           Sampling sampling, std::uint64_t seed) {
    check_sampling(dims, sampling);
    if (paths.empty()) throw ValidationError("synth: at least one path required");
    const double duration = static_cast<double>(dims.s) * sampling.t_s;
    for (const auto& path : paths) {
        if (path.delay.points.empty() || path.doppler.points.empty()) {
            throw ValidationError("synth: path trajectory has no breakpoints");
        }
        check_path_limits(path, duration, sampling);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * pi);
    std::vector<cplx> gains;
    gains.reserve(paths.size());
    for (const auto& path : paths) {
        cplx g = path.gain;
        if (path.randomize_phase) g *= std::polar(1.0, phase_dist(rng));
        gains.push_back(g);
    }

    ChannelRecord rec = make_record(dims, sampling, "specular");
    for (std::size_t s = 0; s < dims.s; ++s) {
        const double t = static_cast<double>(s) * sampling.t_s;
        cplx* row = rec.data.row(s);
        for (std::size_t p = 0; p < paths.size(); ++p) {
            const double nu = paths[p].doppler.at(t);
            const double tau = paths[p].delay.at(t);
            const cplx rot = gains[p] * std::polar(1.0, 2.0 * pi * nu * t);
            for (std::size_t q = 0; q < dims.q; ++q) {
                row[q] += rot * std::polar(1.0, -2.0 * pi * static_cast<double>(q) *
                                                    sampling.f_s * tau);
            }
        }
    }
    return rec;
}

ChannelRecord gen_wssus(const WssusSpec& spec, Dims dims, Sampling sampling,
                        std::uint64_t seed) {
    check_sampling(dims, sampling);
    if (spec.num_taps < 1) throw ValidationError("synth: wssus needs at least one tap");
    if (spec.sinusoids_per_tap < 64) {
        throw ValidationError("synth: wssus needs at least 64 sinusoids per tap");
    }
    if (!(spec.nu_max >= 0.0) || !(spec.nu_max < 0.5 / sampling.t_s)) {
        throw ValidationError("synth: doppler alias: nu_max reaches 1/(2 t_s)");
    }
    if (!(spec.tau_rms >= 0.0) || !(spec.tau_rms < 0.25 / sampling.f_s)) {
        throw ValidationError("synth: delay alias: tau_rms reaches 1/(4 f_s)");
    }
    if (spec.num_taps > 1 && !(spec.tau_rms > 0.0)) {
        throw ValidationError("synth: multi-tap wssus needs positive tau_rms");
    }
    if (!spec.tap_powers.empty() && spec.tap_powers.size() != spec.num_taps) {
        throw ValidationError("synth: tap_powers length must match num_taps");
    }

    const std::size_t taps = spec.num_taps;
    std::vector<double> tau(taps, 0.0);
    if (taps > 1) {
        const double dtau = 4.0 * spec.tau_rms / static_cast<double>(taps - 1);
        for (std::size_t l = 0; l < taps; ++l) tau[l] = static_cast<double>(l) * dtau;
    }
    std::vector<double> power(taps, 1.0);
    if (!spec.tap_powers.empty()) {
        power = spec.tap_powers;
        for (double p : power) {
            if (!(p >= 0.0)) throw ValidationError("synth: tap powers must be non-negative");
        }
    } else if (taps > 1) {
        for (std::size_t l = 0; l < taps; ++l) power[l] = std::exp(-tau[l] / spec.tau_rms);
    }
    double total = 0.0;
    for (double p : power) total += p;
    if (!(total > 0.0)) throw ValidationError("synth: tap powers sum to zero");
    for (double& p : power) p /= total;

    // Per-tap fading series from seeded substreams, then the delay phasor
    // outer product through the matmul kernel.
    CMat taps_t(dims.s, taps);
    for (std::size_t l = 0; l < taps; ++l) {
        std::mt19937_64 rng(substream_seed(seed, 0xA24BAED4963EE407ULL, l));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::size_t ns = spec.sinusoids_per_tap;
        std::vector<double> freq(ns), phase(ns);
        for (std::size_t n = 0; n < ns; ++n) {
            if (spec.doppler_shape == WssusSpec::DopplerShape::flat) {
                freq[n] = spec.nu_max * (2.0 * unit(rng) - 1.0);
            } else {
                freq[n] = spec.nu_max * std::cos(2.0 * pi * unit(rng));
            }
            phase[n] = 2.0 * pi * unit(rng);
        }
        const double amp = std::sqrt(power[l] / static_cast<double>(ns));
        for (std::size_t s = 0; s < dims.s; ++s) {
            const double t = static_cast<double>(s) * sampling.t_s;
            cplx acc{};
            for (std::size_t n = 0; n < ns; ++n) {
                acc += std::polar(1.0, 2.0 * pi * freq[n] * t + phase[n]);
            }
            taps_t(s, l) = amp * acc;
        }
    }

    CMat phasors(taps, dims.q);
    for (std::size_t l = 0; l < taps; ++l) {
        for (std::size_t q = 0; q < dims.q; ++q) {
            phasors(l, q) = std::polar(1.0, -2.0 * pi * static_cast<double>(q) *
                                                sampling.f_s * tau[l]);
        }
    }

    ChannelRecord rec = make_record(dims, sampling, "wssus");
    kernels::active().cgemm(taps_t.data(), phasors.data(), rec.data.data(),
                            dims.s, taps, dims.q);
    return rec;
}

ChannelRecord gen_piecewise(const std::vector<Segment>& segments, Dims dims,
                            Sampling sampling, std::uint64_t seed) {
    check_sampling(dims, sampling);
    if (segments.empty()) throw ValidationError("synth: piecewise needs segments");

    std::vector<std::size_t> counts(segments.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const double exact = segments[i].duration / sampling.t_s;
        counts[i] = static_cast<std::size_t>(std::llround(exact));
        if (counts[i] == 0) throw ValidationError("synth: segment shorter than one snapshot");
        total += counts[i];
    }
    if (total != dims.s) {
        throw ValidationError("synth: duration mismatch: segments cover " +
                              std::to_string(total) + " snapshots, record has " +
                              std::to_string(dims.s));
    }

    auto realize = [&](std::size_t i, Dims seg_dims, std::uint64_t seg_seed) {
        return std::holds_alternative<WssusSpec>(segments[i].model)
                   ? gen_wssus(std::get<WssusSpec>(segments[i].model), seg_dims, sampling,
                               seg_seed)
                   : gen_specular(std::get<std::vector<SpecularPath>>(segments[i].model),
                                  seg_dims, sampling, seg_seed);
    };

    // One segment degenerates to the underlying generator, byte for byte.
    if (segments.size() == 1) return realize(0, dims, seed);

    ChannelRecord rec = make_record(dims, sampling, "");
    std::string label = "piecewise;boundaries_s=";
    std::size_t offset = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const Dims seg_dims{counts[i], dims.q};
        ChannelRecord seg = realize(i, seg_dims, substream_seed(seed, 0xD1342543DE82EF95ULL, i));
        std::copy_n(seg.data.data(), seg.data.size(), rec.data.row(offset));
        offset += counts[i];
        if (i + 1 < segments.size()) {
            if (i > 0) label += ",";
            label += std::to_string(static_cast<double>(offset) * sampling.t_s);
        }
    }
    rec.label = label;
    return rec;
}

ChannelRecord add_noise(const ChannelRecord& record, double snr_db, std::uint64_t seed) {
    record.validate();
    if (std::isnan(snr_db)) throw ValidationError("synth: snr_db is NaN");
    if (std::isinf(snr_db) && snr_db > 0.0) return record;

    const auto& k = kernels::active();
    std::vector<double> mags(record.data.size(), 0.0);
    k.accumulate_mag2(record.data.data(), mags.data(), record.data.size());
    const double mean_power = k.sum(mags.data(), mags.size()) / static_cast<double>(mags.size());
    if (!(mean_power > 0.0)) throw ValidationError("synth: cannot add noise to an empty signal");

    const double sigma2 = mean_power * std::pow(10.0, -snr_db / 10.0);
    const double sigma_part = std::sqrt(sigma2 / 2.0);

    ChannelRecord out = record;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    cplx* data = out.data.data();
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        data[i] += cplx{sigma_part * gauss(rng), sigma_part * gauss(rng)};
    }
    out.noise_floor_db = 10.0 * std::log10(sigma2);
    return out;
}

}  // namespace chanstat

#include "chanstat/lsf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chanstat/kernels.hpp"
#include "parallel.hpp"

namespace chanstat {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Unitary time-to-Doppler transform with rows reordered so the zero bin
// sits at row floor(n/2) and the axis runs from negative to positive.
CMat doppler_transform(std::size_t n) {
    CMat a(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t p = (r + n - n / 2) % n;
        for (std::size_t s = 0; s < n; ++s) {
            const double ang =
                -2.0 * std::numbers::pi * static_cast<double>(p * s) / static_cast<double>(n);
            a(r, s) = std::polar(scale, ang);
        }
    }
    return a;
}

// Unitary frequency-to-delay transform (inverse DFT, delay axis from zero).
CMat delay_transform(std::size_t m) {
    CMat b(m, m);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t q = 0; q < m; ++q) {
        for (std::size_t l = 0; l < m; ++l) {
            const double ang =
                2.0 * std::numbers::pi * static_cast<double>(q * l) / static_cast<double>(m);
            b(q, l) = std::polar(scale, ang);
        }
    }
    return b;
}

}  // namespace

RegionPlan plan_regions(Dims dims, std::size_t n, std::size_t m,
                        std::size_t delta_t, std::size_t delta_f) {
    if (dims.s == 0 || dims.q == 0) {
        throw ValidationError("plan_regions: record has empty dimensions");
    }
    if (n == 0 || m == 0) {
        throw ValidationError("plan_regions: region lengths must be at least 1");
    }
    if (delta_t == 0 || delta_f == 0) {
        throw ValidationError("plan_regions: hops must be at least 1");
    }
    if (n > dims.s || m > dims.q) {
        std::ostringstream msg;
        msg << "plan_regions: region " << n << "x" << m << " exceeds record " << dims.s << "x"
            << dims.q;
        throw ValidationError(msg.str());
    }
    RegionPlan plan;
    plan.n = n;
    plan.m = m;
    plan.delta_t = delta_t;
    plan.delta_f = delta_f;
    plan.k_t_count = (dims.s - n) / delta_t + 1;
    plan.k_f_count = (dims.q - m) / delta_f + 1;
    return plan;
}

LsfGrid lsf_estimate(const ChannelRecord& record, const RegionPlan& plan,
                     const TaperGrid& tapers, std::size_t threads) {
    if (tapers.n != plan.n || tapers.m != plan.m) {
        std::ostringstream msg;
        msg << "lsf_estimate: taper dimensions " << tapers.n << "x" << tapers.m
            << " do not match region plan " << plan.n << "x" << plan.m;
        throw ValidationError(msg.str());
    }
    if (tapers.count() == 0) {
        throw ValidationError("lsf_estimate: taper grid holds no windows");
    }
    const std::size_t n = plan.n;
    const std::size_t m = plan.m;
    if (plan.k_t_count == 0 || plan.k_f_count == 0 ||
        (plan.k_t_count - 1) * plan.delta_t + n > record.s() ||
        (plan.k_f_count - 1) * plan.delta_f + m > record.q()) {
        throw ValidationError("lsf_estimate: region plan does not fit the record");
    }

    const auto& kern = kernels::active();
    const std::size_t count_t = tapers.time_tapers.rows();
    const std::size_t count_f = tapers.freq_tapers.rows();

    const CMat fwd = doppler_transform(n);
    const CMat inv = delay_transform(m);

    // Fold each taper into the transform so a windowed region is two matrix
    // products instead of a per-window Hadamard pass.
    std::vector<CMat> left(count_t, CMat(n, n));
    for (std::size_t i = 0; i < count_t; ++i) {
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t s = 0; s < n; ++s) {
                left[i](r, s) = fwd(r, s) * tapers.time_tapers(i, s);
            }
        }
    }
    std::vector<CMat> right(count_f, CMat(m, m));
    for (std::size_t j = 0; j < count_f; ++j) {
        for (std::size_t q = 0; q < m; ++q) {
            for (std::size_t l = 0; l < m; ++l) {
                right[j](q, l) = tapers.freq_tapers(j, q) * inv(q, l);
            }
        }
    }

    LsfGrid grid;
    grid.plan = plan;
    grid.t_s = record.t_s;
    grid.f_s = record.f_s;
    grid.taper_count = tapers.count();
    grid.doppler_axis.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        grid.doppler_axis[r] = (static_cast<double>(r) - static_cast<double>(n / 2)) /
                               (static_cast<double>(n) * record.t_s);
    }
    grid.delay_axis.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
        grid.delay_axis[l] =
            static_cast<double>(l) / (static_cast<double>(m) * record.f_s);
    }
    grid.lsf.assign(plan.region_count(), RMat(n, m, 0.0));

    const double norm = 1.0 / static_cast<double>(tapers.count());
    parallel_for(plan.region_count(), threads, [&](std::size_t idx) {
        thread_local CMat region, stage, spec;
        if (region.rows() != n || region.cols() != m) {
            region = CMat(n, m);
            stage = CMat(n, m);
            spec = CMat(n, m);
        }
        const std::size_t k_t = idx / plan.k_f_count;
        const std::size_t k_f = idx % plan.k_f_count;
        const std::size_t row0 = k_t * plan.delta_t;
        const std::size_t col0 = k_f * plan.delta_f;
        for (std::size_t r = 0; r < n; ++r) {
            std::memcpy(region.row(r), record.data.row(row0 + r) + col0, m * sizeof(cplx));
        }
        RMat& acc = grid.lsf[idx];
        for (std::size_t i = 0; i < count_t; ++i) {
            kern.cgemm(left[i].data(), region.data(), stage.data(), n, n, m);
            for (std::size_t j = 0; j < count_f; ++j) {
                kern.cgemm(stage.data(), right[j].data(), spec.data(), n, m, m);
                kern.accumulate_mag2(spec.data(), acc.data(), n * m);
            }
        }
        kern.scale(acc.data(), n * m, norm);
    });
    return grid;
}

RMat doppler_power_profile(const LsfGrid& grid) {
    const auto& kern = kernels::active();
    const std::size_t n = grid.plan.n;
    const std::size_t m = grid.plan.m;
    RMat profile(grid.plan.k_t_count, n, 0.0);
    for (std::size_t k_t = 0; k_t < grid.plan.k_t_count; ++k_t) {
        for (std::size_t k_f = 0; k_f < grid.plan.k_f_count; ++k_f) {
            const RMat& c = grid.at(k_t, k_f);
            for (std::size_t r = 0; r < n; ++r) {
                profile(k_t, r) += kern.sum(c.row(r), m);
            }
        }
        kern.scale(profile.row(k_t), n,
                   1.0 / (static_cast<double>(m) * static_cast<double>(grid.plan.k_f_count)));
    }
    return profile;
}

RMat delay_power_profile(const LsfGrid& grid) {
    const auto& kern = kernels::active();
    const std::size_t n = grid.plan.n;
    const std::size_t m = grid.plan.m;
    RMat profile(grid.plan.k_f_count, m, 0.0);
    for (std::size_t k_f = 0; k_f < grid.plan.k_f_count; ++k_f) {
        for (std::size_t k_t = 0; k_t < grid.plan.k_t_count; ++k_t) {
            const RMat& c = grid.at(k_t, k_f);
            for (std::size_t r = 0; r < n; ++r) {
                const double* row = c.row(r);
                double* out = profile.row(k_f);
                for (std::size_t l = 0; l < m; ++l) {
                    out[l] += row[l];
                }
            }
        }
        kern.scale(profile.row(k_f), m,
                   1.0 / (static_cast<double>(n) * static_cast<double>(grid.plan.k_t_count)));
    }
    return profile;
}

SpreadSeries rms_spreads(const LsfGrid& grid) {
    const auto& kern = kernels::active();
    const std::size_t n = grid.plan.n;
    const std::size_t m = grid.plan.m;
    SpreadSeries out;
    out.tau_rms.assign(grid.lsf.size(), kNan);
    out.nu_rms.assign(grid.lsf.size(), kNan);
    std::vector<double> col(m);
    for (std::size_t idx = 0; idx < grid.lsf.size(); ++idx) {
        const RMat& c = grid.lsf[idx];
        const double total = kern.sum(c.data(), n * m);
        if (!(total > 0.0)) {
            continue;
        }
        std::fill(col.begin(), col.end(), 0.0);
        double nu_m1 = 0.0;
        double nu_m2 = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double* row = c.row(r);
            const double w = kern.sum(row, m);
            nu_m1 += grid.doppler_axis[r] * w;
            nu_m2 += grid.doppler_axis[r] * grid.doppler_axis[r] * w;
            for (std::size_t l = 0; l < m; ++l) {
                col[l] += row[l];
            }
        }
        double tau_m1 = 0.0;
        double tau_m2 = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
            tau_m1 += grid.delay_axis[l] * col[l];
            tau_m2 += grid.delay_axis[l] * grid.delay_axis[l] * col[l];
        }
        const double nu_mean = nu_m1 / total;
        const double tau_mean = tau_m1 / total;
        out.nu_rms[idx] = std::sqrt(std::max(0.0, nu_m2 / total - nu_mean * nu_mean));
        out.tau_rms[idx] = std::sqrt(std::max(0.0, tau_m2 / total - tau_mean * tau_mean));
    }
    return out;
}

CoherenceBounds coherence_bounds(double tau_rms, double nu_rms) {
    CoherenceBounds b;
    b.coherence_time =
        nu_rms == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / nu_rms;
    b.coherence_bandwidth =
        tau_rms == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / tau_rms;
    return b;
}

double estimate_noise_floor(const LsfGrid& grid, double guard_fraction) {
    const std::size_t n = grid.plan.n;
    const std::size_t m = grid.plan.m;
    if (m < 4) {
        throw ValidationError("estimate_noise_floor: needs at least 4 delay bins");
    }
    if (!(guard_fraction > 0.0) || !(guard_fraction <= 1.0)) {
        throw ValidationError("estimate_noise_floor: guard fraction must be in (0, 1]");
    }
    const std::size_t guard0 = static_cast<std::size_t>(
        std::ceil(static_cast<double>(m) * (1.0 - guard_fraction)));
    if (guard0 >= m) {
        throw ValidationError("estimate_noise_floor: guard band is empty");
    }
    std::vector<double> vals;
    vals.reserve(grid.lsf.size() * n * (m - guard0));
    for (const RMat& c : grid.lsf) {
        for (std::size_t r = 0; r < n; ++r) {
            const double* row = c.row(r);
            vals.insert(vals.end(), row + guard0, row + m);
        }
    }
    const std::size_t mid = vals.size() / 2;
    std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
    double median = vals[mid];
    if (vals.size() % 2 == 0) {
        const double below = *std::max_element(vals.begin(), vals.begin() + mid);
        median = 0.5 * (median + below);
    }
    if (!(median > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    // A taper-averaged noise-only bin is Gamma(taper_count) distributed; undo
    // the median bias so the result matches the mean power, then rescale from
    // per-bin to per-sample units.
    const double k = static_cast<double>(grid.taper_count);
    const double median_factor = std::pow(1.0 - 1.0 / (9.0 * k), 3.0);
    const double per_sample = median / median_factor * static_cast<double>(n * m);
    return 10.0 * std::log10(per_sample);
}

LsfGrid noise_threshold(const LsfGrid& grid, double floor_db, double margin_db) {
    const double bins = static_cast<double>(grid.plan.n * grid.plan.m);
    const double threshold = std::pow(10.0, (floor_db + margin_db) / 10.0) / bins;
    LsfGrid out = grid;
    for (RMat& c : out.lsf) {
        double* p = c.data();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (p[i] < threshold) {
                p[i] = 0.0;
            }
        }
    }
    return out;
}

ChannelRecord doppler_mask(const ChannelRecord& record, std::size_t block_len,
                           double keep_lo_hz, double keep_hi_hz, std::size_t threads) {
    record.validate();
    if (block_len == 0) {
        throw ValidationError("doppler_mask: block length must be at least 1");
    }
    if (!(keep_lo_hz < keep_hi_hz)) {
        throw ValidationError("doppler_mask: empty keep interval");
    }
    const double nyquist = 0.5 / record.t_s;
    if (keep_hi_hz <= -nyquist || keep_lo_hz >= nyquist) {
        std::ostringstream msg;
        msg << "doppler_mask: keep interval outside representable range +-" << nyquist << " Hz";
        throw ValidationError(msg.str());
    }

    const std::size_t bl = block_len;
    // Per-block filter: transform, zero the rejected Doppler bins, transform
    // back.  Collapsed into one circulant matrix applied to each block.
    std::vector<double> keep(bl, 0.0);
    for (std::size_t b = 0; b < bl; ++b) {
        const double signed_bin = b < (bl + 1) / 2
                                      ? static_cast<double>(b)
                                      : static_cast<double>(b) - static_cast<double>(bl);
        const double freq = signed_bin / (static_cast<double>(bl) * record.t_s);
        if (keep_lo_hz <= freq && freq <= keep_hi_hz) {
            keep[b] = 1.0;
        }
    }
    std::vector<cplx> gen(bl);
    for (std::size_t d = 0; d < bl; ++d) {
        cplx acc = 0.0;
        for (std::size_t b = 0; b < bl; ++b) {
            if (keep[b] != 0.0) {
                const double ang = 2.0 * std::numbers::pi * static_cast<double>(b) *
                                   static_cast<double>(d) / static_cast<double>(bl);
                acc += std::polar(1.0, ang);
            }
        }
        gen[d] = acc / static_cast<double>(bl);
    }
    CMat filter(bl, bl);
    for (std::size_t r = 0; r < bl; ++r) {
        for (std::size_t c = 0; c < bl; ++c) {
            filter(r, c) = gen[(r + bl - c) % bl];
        }
    }

    ChannelRecord out = record;
    const std::size_t rows_total = record.s();
    const std::size_t cols = record.q();
    const std::size_t blocks = (rows_total + bl - 1) / bl;
    const auto& kern = kernels::active();
    parallel_for(blocks, threads, [&](std::size_t blk) {
        thread_local CMat padded, result;
        if (padded.rows() != bl || padded.cols() != cols) {
            padded = CMat(bl, cols);
            result = CMat(bl, cols);
        }
        const std::size_t row0 = blk * bl;
        const std::size_t rows = std::min(bl, rows_total - row0);
        for (std::size_t r = 0; r < rows; ++r) {
            std::memcpy(padded.row(r), record.data.row(row0 + r), cols * sizeof(cplx));
        }
        for (std::size_t r = rows; r < bl; ++r) {
            std::fill(padded.row(r), padded.row(r) + cols, cplx{});
        }
        kern.cgemm(filter.data(), padded.data(), result.data(), bl, bl, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            std::memcpy(out.data.row(row0 + r), result.row(r), cols * sizeof(cplx));
        }
    });

    std::ostringstream tag;
    tag << "mask_doppler=" << keep_lo_hz << ":" << keep_hi_hz;
    out.label = record.label.empty() ? tag.str() : record.label + ";" + tag.str();
    return out;
}

}  // namespace chanstat

#include "chanstat/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <utility>
#include <vector>

#include "chanstat/dpss.hpp"
#include "chanstat/kernels.hpp"

namespace chanstat {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

CollinearityMatrix collinearity(const LsfGrid& grid, Domain domain) {
    const auto& kern = kernels::active();
    const std::size_t outer =
        domain == Domain::time ? grid.plan.k_t_count : grid.plan.k_f_count;
    const std::size_t inner =
        domain == Domain::time ? grid.plan.k_f_count : grid.plan.k_t_count;
    const std::size_t bins = grid.plan.n * grid.plan.m;

    auto region = [&](std::size_t k, std::size_t other) -> const RMat& {
        return domain == Domain::time ? grid.at(k, other) : grid.at(other, k);
    };

    CollinearityMatrix cm;
    cm.domain = domain;
    cm.values = RMat(outer, outer, kNan);
    cm.defined.assign(outer, false);

    std::vector<double> energy(outer, 0.0);
    bool any_defined = false;
    for (std::size_t k = 0; k < outer; ++k) {
        for (std::size_t other = 0; other < inner; ++other) {
            const double* p = region(k, other).data();
            energy[k] += kern.dot(p, p, bins);
        }
        cm.defined[k] = energy[k] > 0.0;
        any_defined = any_defined || cm.defined[k];
    }
    if (!any_defined) {
        throw ValidationError("collinearity: every region has zero energy");
    }

    for (std::size_t k1 = 0; k1 < outer; ++k1) {
        if (!cm.defined[k1]) {
            continue;
        }
        cm.values(k1, k1) = 1.0;
        for (std::size_t k2 = k1 + 1; k2 < outer; ++k2) {
            if (!cm.defined[k2]) {
                continue;
            }
            double ip = 0.0;
            for (std::size_t other = 0; other < inner; ++other) {
                ip += kern.dot(region(k1, other).data(), region(k2, other).data(), bins);
            }
            const double value = std::min(1.0, ip / std::sqrt(energy[k1] * energy[k2]));
            cm.values(k1, k2) = value;
            cm.values(k2, k1) = value;
        }
    }
    return cm;
}

std::vector<std::size_t> undefined_indices(const CollinearityMatrix& cm) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < cm.defined.size(); ++k) {
        if (!cm.defined[k]) {
            out.push_back(k);
        }
    }
    return out;
}

ChannelRecord restrict_bandwidth(const ChannelRecord& record, std::size_t q_use) {
    ChannelRecord out;
    out.t_s = record.t_s;
    out.f_s = record.f_s;
    out.f_carrier = record.f_carrier;
    out.noise_floor_db = record.noise_floor_db;
    out.label = record.label;
    out.data = CMat(record.s(), q_use);
    for (std::size_t r = 0; r < record.s(); ++r) {
        std::memcpy(out.data.row(r), record.data.row(r), q_use * sizeof(cplx));
    }
    return out;
}

}  // namespace

CollinearityMatrix collinearity_freq(const LsfGrid& grid) {
    return collinearity(grid, Domain::frequency);
}

CollinearityMatrix collinearity_time(const LsfGrid& grid) {
    return collinearity(grid, Domain::time);
}

ExtentSeries stationarity_extent(const CollinearityMatrix& matrix, std::size_t region_len,
                                 std::size_t hop, double sample_step) {
    if (matrix.values.rows() != matrix.values.cols()) {
        throw ValidationError("stationarity_extent: matrix is not square");
    }
    if (region_len == 0 || hop == 0 || !(sample_step > 0.0)) {
        throw ValidationError("stationarity_extent: region length, hop and step must be positive");
    }
    const std::size_t k_count = matrix.values.rows();
    ExtentSeries out;
    out.extent.assign(k_count, kNan);
    out.run_length.assign(k_count, 0);
    out.censored.assign(k_count, false);

    auto above = [&](std::size_t k, std::size_t other) {
        return matrix.values(k, other) > matrix.gamma_threshold;  // NaN compares false
    };
    for (std::size_t k = 0; k < k_count; ++k) {
        if (!matrix.defined.empty() && !matrix.defined[k]) {
            continue;
        }
        if (!above(k, k)) {
            continue;
        }
        std::size_t lo = k;
        while (lo > 0 && above(k, lo - 1)) {
            --lo;
        }
        std::size_t hi = k;
        while (hi + 1 < k_count && above(k, hi + 1)) {
            ++hi;
        }
        const std::size_t run = hi - lo + 1;
        out.run_length[k] = run;
        out.extent[k] = (static_cast<double>(region_len) +
                         static_cast<double>(run - 1) * static_cast<double>(hop)) *
                        sample_step;
        out.censored[k] = lo == 0 || hi + 1 == k_count;
    }
    return out;
}

std::size_t update_m(const std::vector<double>& f_stat_hz, double f_s, std::size_t q_limit) {
    if (f_stat_hz.empty()) {
        throw ValidationError("update_m: empty stationarity bandwidth series");
    }
    if (!(f_s > 0.0)) {
        throw ValidationError("update_m: subcarrier spacing must be positive");
    }
    if (q_limit == 0) {
        throw ValidationError("update_m: record has no frequency bins");
    }
    double lowest = std::numeric_limits<double>::infinity();
    for (double v : f_stat_hz) {
        if (std::isnan(v)) {
            throw ValidationError(
                "update_m: undefined stationarity bandwidth entries, choose the region length "
                "explicitly");
        }
        lowest = std::min(lowest, v);
    }
    const double ratio = lowest / f_s;
    auto m = static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12) + 1e-9));
    m = std::max<std::size_t>(1, std::min(m, q_limit));
    return m;
}

StationarityReport analyze(const ChannelRecord& record, const AnalysisConfig& config) {
    record.validate();
    if (!(config.gamma_threshold > 0.0) || !(config.gamma_threshold < 1.0)) {
        throw ValidationError("analyze: gamma threshold must lie in (0, 1)");
    }
    for (const TimeInterval& iv : config.intervals) {
        if (!(iv.begin < iv.end)) {
            throw ValidationError("analyze: summary interval must have begin < end");
        }
    }

    std::size_t q_use = record.q();
    if (config.bandwidth_hz) {
        if (!(*config.bandwidth_hz > 0.0)) {
            throw ValidationError("analyze: bandwidth must be positive");
        }
        const double cols = *config.bandwidth_hz / record.f_s;
        q_use = std::min<std::size_t>(
            record.q(), static_cast<std::size_t>(std::floor(cols + 1e-9)));
        if (q_use == 0) {
            throw ValidationError("analyze: bandwidth narrower than one frequency bin");
        }
    }
    ChannelRecord restricted;
    const ChannelRecord* rec = &record;
    if (q_use != record.q()) {
        restricted = restrict_bandwidth(record, q_use);
        rec = &restricted;
    }

    StationarityReport report;
    report.config = config;
    report.s = rec->s();
    report.q_analyzed = q_use;
    report.t_s = rec->t_s;
    report.f_s = rec->f_s;
    report.f_carrier = rec->f_carrier;
    report.label = rec->label;

    const DpssSet time_set = dpss(config.n, config.a_t, config.tapers_t);
    const DpssSet freq_seed = dpss(config.m, config.a_f, config.tapers_f);

    const RegionPlan plan1 =
        plan_regions({rec->s(), rec->q()}, config.n, config.m, config.delta_t, config.delta_f);
    LsfGrid grid1 = lsf_estimate(*rec, plan1, taper_grid(time_set, freq_seed), config.threads);

    if (config.noise_floor_db) {
        report.noise_floor_db = *config.noise_floor_db;
    } else if (rec->noise_floor_db) {
        report.noise_floor_db = *rec->noise_floor_db;
    } else {
        report.noise_floor_db = estimate_noise_floor(grid1);
        report.noise_floor_estimated = true;
    }
    grid1 = noise_threshold(grid1, report.noise_floor_db, config.margin_db);

    report.freq_collinearity = collinearity_freq(grid1);
    report.freq_collinearity.gamma_threshold = config.gamma_threshold;
    report.f_stat =
        stationarity_extent(report.freq_collinearity, config.m, config.delta_f, rec->f_s);
    report.undefined_freq = undefined_indices(report.freq_collinearity);
    for (std::size_t k = 0; k < plan1.k_f_count; ++k) {
        report.region_freq.push_back(
            (static_cast<double>(k * config.delta_f) + static_cast<double>(config.m) / 2.0) *
            rec->f_s);
    }

    if (config.m_override) {
        if (*config.m_override == 0 || *config.m_override > q_use) {
            throw ValidationError("analyze: frequency region override outside the record");
        }
        report.m_updated = *config.m_override;
    } else {
        report.m_updated = update_m(report.f_stat.extent, rec->f_s, q_use);
    }

    LsfGrid grid2;
    if (report.m_updated == config.m) {
        grid2 = std::move(grid1);
    } else {
        const RegionPlan plan2 = plan_regions({rec->s(), rec->q()}, config.n, report.m_updated,
                                              config.delta_t, config.delta_f);
        const DpssSet freq_grown = dpss(report.m_updated, config.a_f, config.tapers_f);
        grid2 = lsf_estimate(*rec, plan2, taper_grid(time_set, freq_grown), config.threads);
        grid2 = noise_threshold(grid2, report.noise_floor_db, config.margin_db);
    }

    report.time_collinearity = collinearity_time(grid2);
    report.time_collinearity.gamma_threshold = config.gamma_threshold;
    report.t_stat =
        stationarity_extent(report.time_collinearity, config.n, config.delta_t, rec->t_s);
    report.undefined_time = undefined_indices(report.time_collinearity);
    for (std::size_t k = 0; k < grid2.plan.k_t_count; ++k) {
        report.region_time.push_back(
            (static_cast<double>(k * config.delta_t) + static_cast<double>(config.n) / 2.0) *
            rec->t_s);
    }

    report.min_f_stat = kNan;
    for (double v : report.f_stat.extent) {
        if (std::isnan(v)) {
            continue;
        }
        if (std::isnan(report.min_f_stat) || v < report.min_f_stat) {
            report.min_f_stat = v;
        }
    }
    double t_sum = 0.0;
    std::size_t t_count = 0;
    for (double v : report.t_stat.extent) {
        if (!std::isnan(v)) {
            t_sum += v;
            ++t_count;
        }
    }
    report.mean_t_stat = t_count > 0 ? t_sum / static_cast<double>(t_count) : kNan;

    for (const TimeInterval& iv : config.intervals) {
        IntervalSummary summary;
        summary.interval = iv;
        double sum = 0.0;
        for (std::size_t k = 0; k < report.t_stat.extent.size(); ++k) {
            const double t = report.region_time[k];
            const double v = report.t_stat.extent[k];
            if (t < iv.begin || t >= iv.end || std::isnan(v)) {
                continue;
            }
            sum += v;
            ++summary.count;
            if (report.t_stat.censored[k]) {
                ++summary.censored;
            }
        }
        summary.mean_t_stat =
            summary.count > 0 ? sum / static_cast<double>(summary.count) : kNan;
        report.interval_summaries.push_back(summary);
    }

    report.grid = std::move(grid2);
    return report;
}

}  // namespace chanstat

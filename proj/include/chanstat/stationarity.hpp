#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chanstat/channel_record.hpp"
#include "chanstat/lsf.hpp"
#include "chanstat/types.hpp"

namespace chanstat {

enum class Domain { time, frequency };

// Normalized pairwise similarity of region LSFs along one axis, summed over
// the other axis.  Entries lie in [0, 1]; indices whose regions carry no
// energy are undefined and hold NaN.
struct CollinearityMatrix {
    RMat values;                 // K x K
    Domain domain = Domain::time;
    double gamma_threshold = 0.9;
    std::vector<bool> defined;   // per index: any region energy along the other axis

    std::size_t side() const { return values.rows(); }
};

// values[k1][k2] = sum_kt <C[kt,k1], C[kt,k2]> / sqrt(E[k1] E[k2]) with
// E[k] = sum_kt ||C[kt,k]||^2.  Throws if every index is undefined.
CollinearityMatrix collinearity_freq(const LsfGrid& grid);

// Same with the roles of the region indices swapped (sums run over k_f).
CollinearityMatrix collinearity_time(const LsfGrid& grid);

// Per-index stationarity extents.  For each defined index k, the maximal
// contiguous run of indices around k whose collinearity with k exceeds the
// matrix threshold (undefined entries break runs); extent converts the run to
// physical units via (region_len + (run - 1) * hop) * sample_step.
struct ExtentSeries {
    std::vector<double> extent;           // NaN where undefined
    std::vector<std::size_t> run_length;  // 0 where undefined
    std::vector<bool> censored;           // run touches either end of the index range
};

ExtentSeries stationarity_extent(const CollinearityMatrix& matrix, std::size_t region_len,
                                 std::size_t hop, double sample_step);

// Frequency region length for the second pass: floor(min f_stat / f_s),
// clamped to [1, q_limit].  Undefined entries raise ValidationError so the
// caller can pick a length explicitly.
std::size_t update_m(const std::vector<double>& f_stat_hz, double f_s, std::size_t q_limit);

struct TimeInterval {
    double begin = 0.0;  // seconds, inclusive
    double end = 0.0;    // seconds, exclusive
};

struct AnalysisConfig {
    std::size_t n = 30;
    std::size_t m = 30;                      // seed value, grown by the second pass
    std::size_t delta_t = 5;
    std::size_t delta_f = 5;
    double a_t = 2.0;
    double a_f = 2.5;
    std::size_t tapers_t = 2;
    std::size_t tapers_f = 2;
    double margin_db = 10.0;
    double gamma_threshold = 0.9;
    std::optional<double> bandwidth_hz;      // analyze only the first floor(B/f_s) columns
    std::optional<std::size_t> m_override;   // skip update_m, use this length
    std::optional<double> noise_floor_db;    // overrides record metadata and estimation
    std::vector<TimeInterval> intervals;     // summary windows over record time
    std::size_t threads = 0;                 // 0 = hardware concurrency
};

struct IntervalSummary {
    TimeInterval interval;
    std::size_t count = 0;      // defined stationarity-time entries inside
    std::size_t censored = 0;   // of those, runs touching the record edge
    double mean_t_stat = 0.0;   // seconds, NaN when count is 0
};

struct StationarityReport {
    AnalysisConfig config;
    std::size_t s = 0;
    std::size_t q_analyzed = 0;
    double t_s = 0.0;
    double f_s = 0.0;
    double f_carrier = 0.0;
    std::string label;
    double noise_floor_db = 0.0;
    bool noise_floor_estimated = false;
    std::size_t m_updated = 0;             // frequency region length of the second pass

    CollinearityMatrix freq_collinearity;  // first pass
    CollinearityMatrix time_collinearity;  // second pass
    ExtentSeries f_stat;                   // hertz, per first-pass frequency index
    ExtentSeries t_stat;                   // seconds, per second-pass time index
    std::vector<double> region_time;       // center of each time region, seconds
    std::vector<double> region_freq;       // center of each first-pass frequency region, Hz

    double min_f_stat = 0.0;               // over defined entries, NaN if none
    double mean_t_stat = 0.0;              // over defined entries, NaN if none
    std::vector<IntervalSummary> interval_summaries;
    std::vector<std::size_t> undefined_freq;
    std::vector<std::size_t> undefined_time;

    LsfGrid grid;                          // second-pass grid after thresholding
};

// Two-pass pipeline: seed-region LSF and noise threshold, frequency
// collinearity, region growth in frequency, recomputed LSF, time
// collinearity, summaries.
StationarityReport analyze(const ChannelRecord& record, const AnalysisConfig& config);

}  // namespace chanstat

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chanstat/stationarity.hpp"
#include "chanstat/synth.hpp"

namespace chanstat {

// Parsed synthesis scenario: dimensions, sampling, one or more model
// segments, optional additive noise.
struct SynthScenario {
    Dims dims;
    Sampling sampling;
    std::vector<Segment> segments;
    std::optional<double> snr_db;
    std::string label;
};

SynthScenario parse_scenario_text(const std::string& text);
SynthScenario load_scenario(const std::filesystem::path& path);

// Runs the generator matching the scenario and applies noise when requested.
ChannelRecord realize_scenario(const SynthScenario& scenario, std::uint64_t seed);

// JSON rendering of a report: sorted keys, round-trip number formatting, so
// equal reports serialize to identical bytes.  Non-finite values become null.
std::string report_to_json(const StationarityReport& report);
void write_report(const StationarityReport& report, const std::filesystem::path& path);

// One row per index: index, position, extent, run_length, censored.
void write_extent_csv(const ExtentSeries& series, const std::vector<double>& positions,
                      const std::string& position_header, const std::string& extent_header,
                      const std::filesystem::path& path);

// Plain numeric rows, no header.
void write_matrix_csv(const RMat& values, const std::filesystem::path& path);

// Long format: position, axis value, power; one row per matrix entry.
void write_profile_csv(const RMat& profile, const std::vector<double>& positions,
                       const std::vector<double>& axis, const std::string& position_header,
                       const std::string& axis_header, const std::filesystem::path& path);

// Full grid dump, one row per bin:
// time_region, freq_region, doppler_bin, delay_bin, power.
void write_lsf_csv(const LsfGrid& grid, const std::filesystem::path& path);

}  // namespace chanstat

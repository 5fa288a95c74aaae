#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "chanstat/types.hpp"

namespace chanstat {

// A sampled time-frequency channel transfer function.  Rows are time
// snapshots (spacing t_s seconds), columns are frequency bins (spacing f_s
// hertz).  Values are complex gains; computation runs in double, storage on
// disk is float32.
struct ChannelRecord {
    CMat data;                            // S x Q
    double t_s = 0.0;                     // snapshot spacing, seconds
    double f_s = 0.0;                     // subcarrier spacing, hertz
    double f_carrier = 0.0;               // hertz
    std::optional<double> noise_floor_db; // per-sample noise power, dB
    std::string label;

    std::size_t s() const { return data.rows(); }
    std::size_t q() const { return data.cols(); }
    double duration() const { return static_cast<double>(s()) * t_s; }
    double bandwidth() const { return static_cast<double>(q()) * f_s; }

    // Throws ValidationError on non-finite values, empty dimensions, or
    // non-positive sample spacings.
    void validate() const;
};

// On-disk layout: binary payload at `payload_path` (row-major over time,
// little-endian float32 re/im pairs) plus a JSON sidecar at
// `payload_path + ".json"` carrying dimensions, spacings, and the label.
void write_record(const ChannelRecord& record, const std::filesystem::path& payload_path);

ChannelRecord read_record(const std::filesystem::path& payload_path);

}  // namespace chanstat

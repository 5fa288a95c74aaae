#include "chanstat/channel_record.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

namespace chanstat {

namespace {

constexpr int kFormatVersion = 1;

void store_le32(std::uint32_t v, unsigned char* out) {
    out[0] = static_cast<unsigned char>(v & 0xff);
    out[1] = static_cast<unsigned char>((v >> 8) & 0xff);
    out[2] = static_cast<unsigned char>((v >> 16) & 0xff);
    out[3] = static_cast<unsigned char>((v >> 24) & 0xff);
}

std::uint32_t load_le32(const unsigned char* in) {
    return static_cast<std::uint32_t>(in[0]) |
           (static_cast<std::uint32_t>(in[1]) << 8) |
           (static_cast<std::uint32_t>(in[2]) << 16) |
           (static_cast<std::uint32_t>(in[3]) << 24);
}

std::filesystem::path sidecar_path(const std::filesystem::path& payload) {
    std::filesystem::path p = payload;
    p += ".json";
    return p;
}

}  // namespace

void ChannelRecord::validate() const {
    if (data.rows() == 0 || data.cols() == 0) {
        throw ValidationError("channel record: empty dimensions");
    }
    if (!(t_s > 0.0) || !(f_s > 0.0)) {
        throw ValidationError("channel record: sample spacings must be positive");
    }
    if (!(f_carrier >= 0.0) || !std::isfinite(f_carrier)) {
        throw ValidationError("channel record: invalid carrier frequency");
    }
    if (noise_floor_db && !std::isfinite(*noise_floor_db) &&
        !(*noise_floor_db == -std::numeric_limits<double>::infinity())) {
        throw ValidationError("channel record: invalid noise floor");
    }
    for (const cplx& v : std::span(data.data(), data.size())) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw ValidationError("channel record: non-finite value");
        }
        // Guard the float32 narrowing used on disk.
        if (!std::isfinite(static_cast<float>(v.real())) ||
            !std::isfinite(static_cast<float>(v.imag()))) {
            throw ValidationError("channel record: value overflows float32 storage");
        }
    }
}

void write_record(const ChannelRecord& record, const std::filesystem::path& payload_path) {
    record.validate();

    nlohmann::json meta;
    meta["format_version"] = kFormatVersion;
    meta["S"] = record.s();
    meta["Q"] = record.q();
    meta["t_s"] = record.t_s;
    meta["f_s"] = record.f_s;
    meta["f_carrier"] = record.f_carrier;
    if (!record.noise_floor_db) {
        meta["noise_floor_db"] = nullptr;
    } else if (std::isfinite(*record.noise_floor_db)) {
        meta["noise_floor_db"] = *record.noise_floor_db;
    } else {
        // JSON has no -inf literal; keep the noiseless marker readable.
        meta["noise_floor_db"] = "-inf";
    }
    meta["label"] = record.label;

    {
        std::ofstream out(sidecar_path(payload_path));
        if (!out) throw IoError("cannot write sidecar: " + sidecar_path(payload_path).string());
        out << meta.dump(2) << "\n";
        if (!out) throw IoError("sidecar write failed: " + sidecar_path(payload_path).string());
    }

    std::ofstream out(payload_path, std::ios::binary);
    if (!out) throw IoError("cannot write payload: " + payload_path.string());
    std::vector<unsigned char> buf(record.q() * 8);
    for (std::size_t s = 0; s < record.s(); ++s) {
        const cplx* row = record.data.row(s);
        for (std::size_t q = 0; q < record.q(); ++q) {
            const float re = static_cast<float>(row[q].real());
            const float im = static_cast<float>(row[q].imag());
            store_le32(std::bit_cast<std::uint32_t>(re), buf.data() + q * 8);
            store_le32(std::bit_cast<std::uint32_t>(im), buf.data() + q * 8 + 4);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw IoError("payload write failed: " + payload_path.string());
}

ChannelRecord read_record(const std::filesystem::path& payload_path) {
    const std::filesystem::path meta_path = sidecar_path(payload_path);

    std::ifstream meta_in(meta_path);
    if (!meta_in) throw IoError("cannot open sidecar: " + meta_path.string());
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const nlohmann::json::parse_error& e) {
        throw IoError("malformed sidecar JSON: " + meta_path.string() + ": " + e.what());
    }

    ChannelRecord record;
    std::size_t rows = 0, cols = 0;
    try {
        if (meta.at("format_version").get<int>() != kFormatVersion) {
            throw ValidationError("unsupported record format version in " + meta_path.string());
        }
        rows = meta.at("S").get<std::size_t>();
        cols = meta.at("Q").get<std::size_t>();
        record.t_s = meta.at("t_s").get<double>();
        record.f_s = meta.at("f_s").get<double>();
        record.f_carrier = meta.at("f_carrier").get<double>();
        const nlohmann::json& floor = meta.at("noise_floor_db");
        if (floor.is_string()) {
            if (floor.get<std::string>() != "-inf") {
                throw ValidationError("bad noise floor marker in " + meta_path.string());
            }
            record.noise_floor_db = -std::numeric_limits<double>::infinity();
        } else if (!floor.is_null()) {
            record.noise_floor_db = floor.get<double>();
        }
        record.label = meta.at("label").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("bad sidecar schema: " + meta_path.string() + ": " + e.what());
    }
    if (rows == 0 || cols == 0) {
        throw ValidationError("channel record: empty dimensions in " + meta_path.string());
    }

    std::error_code ec;
    const auto actual = std::filesystem::file_size(payload_path, ec);
    if (ec) throw IoError("cannot stat payload: " + payload_path.string());
    const std::uintmax_t expected = static_cast<std::uintmax_t>(rows) * cols * 8;
    if (actual != expected) {
        throw ValidationError("payload length mismatch: " + payload_path.string() + " holds " +
                              std::to_string(actual) + " bytes, metadata implies " +
                              std::to_string(expected));
    }

    std::ifstream in(payload_path, std::ios::binary);
    if (!in) throw IoError("cannot open payload: " + payload_path.string());
    record.data = CMat(rows, cols);
    std::vector<unsigned char> buf(cols * 8);
    for (std::size_t s = 0; s < rows; ++s) {
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in) throw IoError("payload read failed: " + payload_path.string());
        cplx* row = record.data.row(s);
        for (std::size_t q = 0; q < cols; ++q) {
            const float re = std::bit_cast<float>(load_le32(buf.data() + q * 8));
            const float im = std::bit_cast<float>(load_le32(buf.data() + q * 8 + 4));
            row[q] = cplx{static_cast<double>(re), static_cast<double>(im)};
        }
    }
    record.validate();
    return record;
}

}  // namespace chanstat

#include "chanstat/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <utility>
#include <variant>

#include <json.hpp>

namespace chanstat {

namespace {

using nlohmann::json;

constexpr std::uint64_t kScenarioNoiseSalt = 0x8C54F31A09B3D27EULL;

// Shortest decimal that round-trips the value; used by every CSV writer so
// repeated runs emit identical bytes.
std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

[[noreturn]] void fail(const std::string& msg) {
    throw ValidationError("scenario: " + msg);
}

const json& field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) {
        fail(std::string("missing field '") + key + "'");
    }
    return *it;
}

double number(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number()) {
        fail(std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

std::size_t count_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_unsigned()) {
        fail(std::string("field '") + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::size_t count_or(const json& j, const char* key, std::size_t fallback) {
    return j.contains(key) ? count_field(j, key) : fallback;
}

std::string text_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_string()) {
        fail(std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

Trajectory parse_trajectory(const json& v, const char* what) {
    if (v.is_number()) {
        return Trajectory::constant(v.get<double>());
    }
    if (!v.is_array() || v.empty()) {
        fail(std::string(what) + " must be a number or a non-empty list of [t, value] pairs");
    }
    Trajectory tr;
    for (const json& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            fail(std::string(what) + " breakpoints must be [t, value] number pairs");
        }
        Trajectory::Point point{p[0].get<double>(), p[1].get<double>()};
        if (!tr.points.empty() && !(point.t > tr.points.back().t)) {
            fail(std::string(what) + " breakpoint times must be strictly increasing");
        }
        tr.points.push_back(point);
    }
    return tr;
}

SpecularPath parse_path(const json& j) {
    if (!j.is_object()) {
        fail("each path must be an object");
    }
    SpecularPath p;
    if (j.contains("gain")) {
        const json& g = j.at("gain");
        if (g.is_number()) {
            p.gain = cplx(g.get<double>(), 0.0);
        } else if (g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number()) {
            p.gain = cplx(g[0].get<double>(), g[1].get<double>());
        } else {
            fail("path gain must be a number or [re, im]");
        }
    }
    if (j.contains("delay_s")) {
        p.delay = parse_trajectory(j.at("delay_s"), "delay_s");
    }
    if (j.contains("doppler_hz")) {
        p.doppler = parse_trajectory(j.at("doppler_hz"), "doppler_hz");
    }
    if (j.contains("random_phase")) {
        const json& r = j.at("random_phase");
        if (!r.is_boolean()) {
            fail("random_phase must be a boolean");
        }
        p.randomize_phase = r.get<bool>();
    }
    return p;
}

WssusSpec parse_wssus(const json& j) {
    WssusSpec w;
    if (j.contains("doppler_shape")) {
        const std::string shape = text_field(j, "doppler_shape");
        if (shape == "flat") {
            w.doppler_shape = WssusSpec::DopplerShape::flat;
        } else if (shape == "jakes") {
            w.doppler_shape = WssusSpec::DopplerShape::jakes;
        } else {
            fail("doppler_shape must be 'flat' or 'jakes'");
        }
    }
    w.nu_max = number(j, "nu_max_hz");
    w.tau_rms = number_or(j, "tau_rms_s", 0.0);
    w.num_taps = count_or(j, "num_taps", 1);
    w.sinusoids_per_tap = count_or(j, "sinusoids_per_tap", 128);
    if (j.contains("tap_powers")) {
        const json& tp = j.at("tap_powers");
        if (!tp.is_array()) {
            fail("tap_powers must be an array of numbers");
        }
        for (const json& v : tp) {
            if (!v.is_number()) {
                fail("tap_powers must be an array of numbers");
            }
            w.tap_powers.push_back(v.get<double>());
        }
    }
    return w;
}

SegmentModel parse_segment_model(const json& m) {
    if (!m.is_object()) {
        fail("model must be an object");
    }
    const std::string type = text_field(m, "type");
    if (type == "specular") {
        const json& paths = field(m, "paths");
        if (!paths.is_array() || paths.empty()) {
            fail("specular model needs a non-empty 'paths' array");
        }
        std::vector<SpecularPath> out;
        for (const json& p : paths) {
            out.push_back(parse_path(p));
        }
        return out;
    }
    if (type == "wssus") {
        return parse_wssus(m);
    }
    fail("model type must be 'specular', 'wssus' or 'piecewise'");
}

json interval_json(const TimeInterval& iv) {
    return json::array({iv.begin, iv.end});
}

json series_json(const std::vector<double>& values) {
    json out = json::array();
    for (double v : values) {
        if (std::isfinite(v)) {
            out.push_back(v);
        } else {
            out.push_back(nullptr);
        }
    }
    return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

}  // namespace

SynthScenario parse_scenario_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(std::string("scenario: ") + e.what());
    }
    try {
        if (!j.is_object()) {
            fail("top level must be an object");
        }
        SynthScenario sc;
        const json& dims = field(j, "dims");
        sc.dims.s = count_field(dims, "s");
        sc.dims.q = count_field(dims, "q");
        const json& sampling = field(j, "sampling");
        sc.sampling.t_s = number(sampling, "t_s");
        sc.sampling.f_s = number(sampling, "f_s");
        sc.sampling.f_carrier = number_or(sampling, "f_carrier", 0.0);
        if (j.contains("snr_db")) {
            sc.snr_db = number(j, "snr_db");
        }
        if (j.contains("label")) {
            sc.label = text_field(j, "label");
        }
        const json& model = field(j, "model");
        if (!model.is_object()) {
            fail("model must be an object");
        }
        if (text_field(model, "type") == "piecewise") {
            const json& segments = field(model, "segments");
            if (!segments.is_array() || segments.empty()) {
                fail("piecewise model needs a non-empty 'segments' array");
            }
            for (const json& seg : segments) {
                if (!seg.is_object()) {
                    fail("each segment must be an object");
                }
                Segment out;
                out.duration = number(seg, "duration_s");
                out.model = parse_segment_model(field(seg, "model"));
                sc.segments.push_back(std::move(out));
            }
        } else {
            Segment out;
            out.duration = static_cast<double>(sc.dims.s) * sc.sampling.t_s;
            out.model = parse_segment_model(model);
            sc.segments.push_back(std::move(out));
        }
        return sc;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
}

SynthScenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open scenario " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

ChannelRecord realize_scenario(const SynthScenario& scenario, std::uint64_t seed) {
    if (scenario.segments.empty()) {
        throw ValidationError("scenario: no model segments");
    }
    ChannelRecord rec;
    if (scenario.segments.size() == 1) {
        rec = std::visit(
            [&](const auto& model) -> ChannelRecord {
                using T = std::decay_t<decltype(model)>;
                if constexpr (std::is_same_v<T, WssusSpec>) {
                    return gen_wssus(model, scenario.dims, scenario.sampling, seed);
                } else {
                    return gen_specular(model, scenario.dims, scenario.sampling, seed);
                }
            },
            scenario.segments.front().model);
    } else {
        rec = gen_piecewise(scenario.segments, scenario.dims, scenario.sampling, seed);
    }
    if (scenario.snr_db) {
        rec = add_noise(rec, *scenario.snr_db, substream_seed(seed, kScenarioNoiseSalt, 1));
    }
    if (!scenario.label.empty()) {
        rec.label = scenario.label;
    }
    return rec;
}

std::string report_to_json(const StationarityReport& report) {
    json cfg;
    cfg["n"] = report.config.n;
    cfg["m_seed"] = report.config.m;
    cfg["delta_t"] = report.config.delta_t;
    cfg["delta_f"] = report.config.delta_f;
    cfg["taper_a_t"] = report.config.a_t;
    cfg["taper_a_f"] = report.config.a_f;
    cfg["tapers_t"] = report.config.tapers_t;
    cfg["tapers_f"] = report.config.tapers_f;
    cfg["noise_margin_db"] = report.config.margin_db;
    cfg["gamma_threshold"] = report.config.gamma_threshold;
    cfg["bandwidth_hz"] =
        report.config.bandwidth_hz ? json(*report.config.bandwidth_hz) : json(nullptr);
    cfg["m_override"] =
        report.config.m_override ? json(*report.config.m_override) : json(nullptr);
    cfg["noise_floor_db"] =
        report.config.noise_floor_db ? json(*report.config.noise_floor_db) : json(nullptr);
    cfg["intervals"] = json::array();
    for (const TimeInterval& iv : report.config.intervals) {
        cfg["intervals"].push_back(interval_json(iv));
    }
    cfg["threads"] = report.config.threads;

    json rec;
    rec["s"] = report.s;
    rec["q_analyzed"] = report.q_analyzed;
    rec["t_s"] = report.t_s;
    rec["f_s"] = report.f_s;
    rec["f_carrier"] = report.f_carrier;
    rec["label"] = report.label;

    json summary;
    summary["min_f_stat_hz"] = std::isfinite(report.min_f_stat) ? json(report.min_f_stat)
                                                                : json(nullptr);
    summary["mean_t_stat_s"] = std::isfinite(report.mean_t_stat) ? json(report.mean_t_stat)
                                                                 : json(nullptr);
    summary["intervals"] = json::array();
    for (const IntervalSummary& s : report.interval_summaries) {
        json one;
        one["begin_s"] = s.interval.begin;
        one["end_s"] = s.interval.end;
        one["count"] = s.count;
        one["censored"] = s.censored;
        one["mean_t_stat_s"] =
            std::isfinite(s.mean_t_stat) ? json(s.mean_t_stat) : json(nullptr);
        summary["intervals"].push_back(one);
    }

    json j;
    j["config"] = cfg;
    j["record"] = rec;
    j["noise_floor_db"] =
        std::isfinite(report.noise_floor_db) ? json(report.noise_floor_db) : json(nullptr);
    j["noise_floor_estimated"] = report.noise_floor_estimated;
    j["m_updated"] = report.m_updated;
    j["f_stat_hz"] = series_json(report.f_stat.extent);
    j["f_run_length"] = report.f_stat.run_length;
    j["f_censored"] = report.f_stat.censored;
    j["f_undefined"] = report.undefined_freq;
    j["t_stat_s"] = series_json(report.t_stat.extent);
    j["t_run_length"] = report.t_stat.run_length;
    j["t_censored"] = report.t_stat.censored;
    j["t_undefined"] = report.undefined_time;
    j["region_time_s"] = report.region_time;
    j["region_freq_hz"] = report.region_freq;
    j["summary"] = summary;
    return j.dump(2) + "\n";
}

void write_report(const StationarityReport& report, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << report_to_json(report);
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void write_extent_csv(const ExtentSeries& series, const std::vector<double>& positions,
                      const std::string& position_header, const std::string& extent_header,
                      const std::filesystem::path& path) {
    if (positions.size() != series.extent.size()) {
        throw ValidationError("extent csv: position count does not match series");
    }
    std::ofstream out = open_out(path);
    out << "index," << position_header << "," << extent_header << ",run_length,censored\n";
    for (std::size_t k = 0; k < series.extent.size(); ++k) {
        out << k << "," << fmt(positions[k]) << "," << fmt(series.extent[k]) << ","
            << series.run_length[k] << "," << (series.censored[k] ? 1 : 0) << "\n";
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void write_matrix_csv(const RMat& values, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    for (std::size_t r = 0; r < values.rows(); ++r) {
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (c > 0) {
                out << ",";
            }
            out << fmt(values(r, c));
        }
        out << "\n";
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void write_profile_csv(const RMat& profile, const std::vector<double>& positions,
                       const std::vector<double>& axis, const std::string& position_header,
                       const std::string& axis_header, const std::filesystem::path& path) {
    if (positions.size() != profile.rows() || axis.size() != profile.cols()) {
        throw ValidationError("profile csv: axis sizes do not match the matrix");
    }
    std::ofstream out = open_out(path);
    out << position_header << "," << axis_header << ",power\n";
    for (std::size_t r = 0; r < profile.rows(); ++r) {
        for (std::size_t c = 0; c < profile.cols(); ++c) {
            out << fmt(positions[r]) << "," << fmt(axis[c]) << "," << fmt(profile(r, c))
                << "\n";
        }
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

void write_lsf_csv(const LsfGrid& grid, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "time_region,freq_region,doppler_bin,delay_bin,power\n";
    for (std::size_t k_t = 0; k_t < grid.plan.k_t_count; ++k_t) {
        for (std::size_t k_f = 0; k_f < grid.plan.k_f_count; ++k_f) {
            const RMat& c = grid.at(k_t, k_f);
            for (std::size_t r = 0; r < grid.plan.n; ++r) {
                for (std::size_t l = 0; l < grid.plan.m; ++l) {
                    out << k_t << "," << k_f << "," << r << "," << l << "," << fmt(c(r, l))
                        << "\n";
                }
            }
        }
    }
    if (!out) {
        throw IoError("failed while writing " + path.string());
    }
}

}  // namespace chanstat

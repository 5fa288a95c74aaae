#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chanstat/channel_record.hpp"
#include "chanstat/kernels.hpp"
#include "chanstat/lsf.hpp"
#include "chanstat/report.hpp"
#include "chanstat/stationarity.hpp"
#include "chanstat/synth.hpp"

namespace {

using namespace chanstat;
namespace fs = std::filesystem;
using nlohmann::json;

struct DopplerInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// Accepts "lo,hi" or "lo:hi", optionally wrapped in (), [] and spaces;
// endpoints may be "-inf"/"inf".
DopplerInterval parse_interval(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == ' ') {
            continue;
        }
        s += c;
    }
    std::size_t split = s.find(',');
    if (split == std::string::npos) {
        split = s.find(':', 1);  // skip a possible leading sign-less colon misuse
    }
    if (split == std::string::npos) {
        throw ValidationError("doppler interval must look like \"lo,hi\"");
    }
    DopplerInterval out;
    try {
        std::size_t used = 0;
        out.lo = std::stod(s.substr(0, split), &used);
        if (used != split) {
            throw std::invalid_argument("trailing text");
        }
        const std::string rest = s.substr(split + 1);
        out.hi = std::stod(rest, &used);
        if (used != rest.size()) {
            throw std::invalid_argument("trailing text");
        }
    } catch (const std::exception&) {
        throw ValidationError("doppler interval endpoints must be numbers or +-inf");
    }
    return out;
}

// "a:b,c:d" in seconds.
std::vector<TimeInterval> parse_intervals(const std::string& text) {
    std::vector<TimeInterval> out;
    std::stringstream ss(text);
    std::string piece;
    while (std::getline(ss, piece, ',')) {
        const std::size_t split = piece.find(':', 1);
        if (split == std::string::npos) {
            throw ValidationError("intervals must look like \"begin:end,begin:end\"");
        }
        try {
            TimeInterval iv;
            iv.begin = std::stod(piece.substr(0, split));
            iv.end = std::stod(piece.substr(split + 1));
            out.push_back(iv);
        } catch (const std::exception&) {
            throw ValidationError("interval bounds must be numbers");
        }
    }
    if (out.empty()) {
        throw ValidationError("intervals must look like \"begin:end,begin:end\"");
    }
    return out;
}

void apply_kernel_choice(const std::string& name) {
    if (name.empty()) {
        return;
    }
    kernels::Backend backend;
    if (!kernels::parse_backend(name, backend)) {
        throw ValidationError("unknown kernel backend '" + name + "'");
    }
    if (!kernels::select(backend)) {
        throw ValidationError("kernel backend '" + name + "' is not supported on this host");
    }
}

struct SynthArgs {
    std::string scenario;
    std::string out;
    std::uint64_t seed = 1;
};

void run_synth(const SynthArgs& args) {
    const SynthScenario scenario = load_scenario(args.scenario);
    const ChannelRecord record = realize_scenario(scenario, args.seed);
    write_record(record, args.out);
    std::printf("wrote %s: S=%zu Q=%zu, t_s=%g s, f_s=%g Hz, duration=%g s, bandwidth=%g Hz\n",
                args.out.c_str(), record.s(), record.q(), record.t_s, record.f_s,
                record.duration(), record.bandwidth());
    std::printf("label: %s\n", record.label.c_str());
}

struct MaskArgs {
    std::string in;
    std::string out;
    std::string interval;
    std::size_t block = 512;
    std::size_t threads = 0;
};

void run_mask(const MaskArgs& args) {
    const DopplerInterval keep = parse_interval(args.interval);
    const ChannelRecord record = read_record(args.in);
    const ChannelRecord masked = doppler_mask(record, args.block, keep.lo, keep.hi, args.threads);
    write_record(masked, args.out);
    std::printf("wrote %s: kept doppler [%g, %g] Hz, block %zu\n", args.out.c_str(), keep.lo,
                keep.hi, args.block);
}

struct AnalyzeArgs {
    std::string in;
    std::string out_dir;
    std::string config_path;
    std::optional<std::size_t> n, m, delta_t, delta_f, tapers_t, tapers_f;
    std::optional<std::size_t> m_override, threads;
    std::optional<double> a_t, a_f, margin_db, gamma_threshold, bandwidth_mhz, noise_floor_db;
    std::optional<std::string> intervals;
    std::optional<std::string> mask_doppler;
    std::optional<std::size_t> mask_block;
    bool dump_lsf = false;
};

// Layered configuration: built-in defaults, then the JSON config file, then
// command-line flags.
struct AnalyzeSettings {
    AnalysisConfig config;
    std::optional<DopplerInterval> mask;
    std::size_t mask_block = 512;
    bool dump_lsf = false;
};

void load_config_file(const std::string& path, AnalyzeSettings& s) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open config " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw IoError(std::string("config: ") + e.what());
    }
    try {
        if (!j.is_object()) {
            throw ValidationError("config: top level must be an object");
        }
        auto get_size = [&](const char* key, std::size_t& dst) {
            if (j.contains(key)) dst = j.at(key).get<std::size_t>();
        };
        auto get_double = [&](const char* key, double& dst) {
            if (j.contains(key)) dst = j.at(key).get<double>();
        };
        get_size("n", s.config.n);
        get_size("m", s.config.m);
        get_size("delta_t", s.config.delta_t);
        get_size("delta_f", s.config.delta_f);
        get_double("taper_a_t", s.config.a_t);
        get_double("taper_a_f", s.config.a_f);
        get_size("tapers_t", s.config.tapers_t);
        get_size("tapers_f", s.config.tapers_f);
        get_double("noise_margin_db", s.config.margin_db);
        get_double("gamma_threshold", s.config.gamma_threshold);
        if (j.contains("bandwidth_mhz")) {
            s.config.bandwidth_hz = j.at("bandwidth_mhz").get<double>() * 1e6;
        }
        if (j.contains("m_override")) {
            s.config.m_override = j.at("m_override").get<std::size_t>();
        }
        if (j.contains("noise_floor_db")) {
            s.config.noise_floor_db = j.at("noise_floor_db").get<double>();
        }
        if (j.contains("threads")) {
            s.config.threads = j.at("threads").get<std::size_t>();
        }
        if (j.contains("intervals")) {
            const json& iv = j.at("intervals");
            if (iv.is_string()) {
                s.config.intervals = parse_intervals(iv.get<std::string>());
            } else if (iv.is_array()) {
                s.config.intervals.clear();
                for (const json& pair : iv) {
                    if (!pair.is_array() || pair.size() != 2) {
                        throw ValidationError("config: intervals must be [begin, end] pairs");
                    }
                    s.config.intervals.push_back(
                        {pair[0].get<double>(), pair[1].get<double>()});
                }
            } else {
                throw ValidationError("config: intervals must be a string or array");
            }
        }
        if (j.contains("mask_doppler")) {
            s.mask = parse_interval(j.at("mask_doppler").get<std::string>());
        }
        if (j.contains("mask_block")) {
            s.mask_block = j.at("mask_block").get<std::size_t>();
        }
        if (j.contains("dump_lsf")) {
            s.dump_lsf = j.at("dump_lsf").get<bool>();
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
}

void run_analyze(const AnalyzeArgs& args) {
    AnalyzeSettings s;
    if (!args.config_path.empty()) {
        load_config_file(args.config_path, s);
    }
    if (args.n) s.config.n = *args.n;
    if (args.m) s.config.m = *args.m;
    if (args.delta_t) s.config.delta_t = *args.delta_t;
    if (args.delta_f) s.config.delta_f = *args.delta_f;
    if (args.a_t) s.config.a_t = *args.a_t;
    if (args.a_f) s.config.a_f = *args.a_f;
    if (args.tapers_t) s.config.tapers_t = *args.tapers_t;
    if (args.tapers_f) s.config.tapers_f = *args.tapers_f;
    if (args.margin_db) s.config.margin_db = *args.margin_db;
    if (args.gamma_threshold) s.config.gamma_threshold = *args.gamma_threshold;
    if (args.bandwidth_mhz) s.config.bandwidth_hz = *args.bandwidth_mhz * 1e6;
    if (args.m_override) s.config.m_override = *args.m_override;
    if (args.noise_floor_db) s.config.noise_floor_db = *args.noise_floor_db;
    if (args.threads) s.config.threads = *args.threads;
    if (args.intervals) s.config.intervals = parse_intervals(*args.intervals);
    if (args.mask_doppler) s.mask = parse_interval(*args.mask_doppler);
    if (args.mask_block) s.mask_block = *args.mask_block;
    if (args.dump_lsf) s.dump_lsf = true;

    ChannelRecord record = read_record(args.in);
    if (s.mask) {
        record = doppler_mask(record, s.mask_block, s.mask->lo, s.mask->hi, s.config.threads);
    }
    const StationarityReport report = analyze(record, s.config);

    const fs::path dir(args.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string());
    }
    write_report(report, dir / "report.json");
    write_extent_csv(report.t_stat, report.region_time, "time_s", "t_stat_s",
                     dir / "t_stat.csv");
    write_extent_csv(report.f_stat, report.region_freq, "freq_hz", "f_stat_hz",
                     dir / "f_stat.csv");
    write_matrix_csv(report.time_collinearity.values, dir / "collinearity_time.csv");
    write_matrix_csv(report.freq_collinearity.values, dir / "collinearity_freq.csv");
    write_profile_csv(doppler_power_profile(report.grid), report.region_time,
                      report.grid.doppler_axis, "time_s", "doppler_hz",
                      dir / "doppler_profile.csv");
    if (s.dump_lsf) {
        write_lsf_csv(report.grid, dir / "lsf.csv");
    }

    std::printf("analyzed %s: S=%zu, Q=%zu columns in use\n", args.in.c_str(), report.s,
                report.q_analyzed);
    std::printf("pass 1: regions %zu x %zu (n=%zu, m=%zu)\n", report.grid.plan.k_t_count,
                report.freq_collinearity.side(), report.config.n, report.config.m);
    std::printf("pass 2: regions %zu x %zu (m grown to %zu)\n", report.grid.plan.k_t_count,
                report.grid.plan.k_f_count, report.m_updated);
    std::printf("noise floor: %g dB (%s), margin %g dB\n", report.noise_floor_db,
                report.noise_floor_estimated ? "estimated" : "given", report.config.margin_db);
    std::printf("min f_stat: %g Hz, mean t_stat: %g s\n", report.min_f_stat,
                report.mean_t_stat);
    std::printf("report written to %s\n", (dir / "report.json").string().c_str());
}

std::string cell(const json& v, double scale, const char* unit) {
    if (v.is_null()) {
        return "n/a";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g %s", v.get<double>() * scale, unit);
    return buf;
}

void run_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open report " + path);
    }
    json j;
    try {
        in >> j;
        const json& rec = j.at("record");
        std::printf("record: S=%zu, Q analyzed=%zu, label=%s\n", rec.at("s").get<std::size_t>(),
                    rec.at("q_analyzed").get<std::size_t>(),
                    rec.at("label").get<std::string>().c_str());
        std::printf("noise floor: %s (%s)\n", cell(j.at("noise_floor_db"), 1.0, "dB").c_str(),
                    j.at("noise_floor_estimated").get<bool>() ? "estimated" : "given");
        std::printf("frequency pass: %zu indices, min f_stat %s\n", j.at("f_stat_hz").size(),
                    cell(j.at("summary").at("min_f_stat_hz"), 1e-6, "MHz").c_str());
        std::printf("time pass: m=%zu, %zu indices, mean t_stat %s\n",
                    j.at("m_updated").get<std::size_t>(), j.at("t_stat_s").size(),
                    cell(j.at("summary").at("mean_t_stat_s"), 1e3, "ms").c_str());
        std::size_t censored = 0;
        for (const json& c : j.at("t_censored")) {
            censored += c.get<bool>() ? 1 : 0;
        }
        std::printf("edge-censored time runs: %zu, undefined time indices: %zu\n", censored,
                    j.at("t_undefined").size());
        const json& intervals = j.at("summary").at("intervals");
        if (intervals.empty()) {
            std::printf("intervals: n/a\n");
        } else {
            std::printf("%-12s %-12s %-8s %-10s %s\n", "begin_s", "end_s", "count", "censored",
                        "mean_t_stat");
            for (const json& iv : intervals) {
                std::printf("%-12g %-12g %-8zu %-10zu %s\n", iv.at("begin_s").get<double>(),
                            iv.at("end_s").get<double>(), iv.at("count").get<std::size_t>(),
                            iv.at("censored").get<std::size_t>(),
                            cell(iv.at("mean_t_stat_s"), 1e3, "ms").c_str());
            }
        }
    } catch (const json::exception& e) {
        throw IoError("report " + path + " is not a valid analysis report: " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Channel stationarity estimation pipeline"};
    app.require_subcommand(1);
    std::string kernel_choice;
    app.add_option("--kernels", kernel_choice, "force a compute backend (scalar, avx2)");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic channel record");
    synth->add_option("--scenario", synth_args.scenario, "scenario JSON path")->required();
    synth->add_option("--out", synth_args.out, "output record path")->required();
    synth->add_option("--seed", synth_args.seed, "random seed");

    MaskArgs mask_args;
    CLI::App* mask = app.add_subcommand("mask", "keep only a Doppler band of a record");
    mask->add_option("--in", mask_args.in, "input record path")->required();
    mask->add_option("--out", mask_args.out, "output record path")->required();
    mask->add_option("--mask-doppler", mask_args.interval, "kept Doppler interval \"lo,hi\" Hz")
        ->required();
    mask->add_option("--block", mask_args.block, "time block length in snapshots");
    mask->add_option("--threads", mask_args.threads, "worker threads (0 = auto)");

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "run the two-pass stationarity analysis");
    analyze->add_option("--in", analyze_args.in, "input record path")->required();
    analyze->add_option("--out-dir", analyze_args.out_dir, "output directory")->required();
    analyze->add_option("--config", analyze_args.config_path,
                        "JSON config file (flags override it)");
    analyze->add_option("--n", analyze_args.n, "time region length");
    analyze->add_option("--m", analyze_args.m, "seed frequency region length");
    analyze->add_option("--delta-t", analyze_args.delta_t, "time hop");
    analyze->add_option("--delta-f", analyze_args.delta_f, "frequency hop");
    analyze->add_option("--taper-a-t", analyze_args.a_t, "time half-bandwidth product");
    analyze->add_option("--taper-a-f", analyze_args.a_f, "frequency half-bandwidth product");
    analyze->add_option("--tapers-t", analyze_args.tapers_t, "time tapers");
    analyze->add_option("--tapers-f", analyze_args.tapers_f, "frequency tapers");
    analyze->add_option("--noise-margin-db", analyze_args.margin_db,
                        "threshold margin above the noise floor");
    analyze->add_option("--gamma-threshold", analyze_args.gamma_threshold,
                        "collinearity threshold");
    analyze->add_option("--bandwidth-mhz", analyze_args.bandwidth_mhz,
                        "restrict analysis to the lowest part of the band");
    analyze->add_option("--m-override", analyze_args.m_override,
                        "second-pass frequency region length (skips the update rule)");
    analyze->add_option("--noise-floor-db", analyze_args.noise_floor_db,
                        "per-sample noise power, overrides metadata and estimation");
    analyze->add_option("--intervals", analyze_args.intervals,
                        "summary time windows \"begin:end,begin:end\" seconds");
    analyze->add_option("--mask-doppler", analyze_args.mask_doppler,
                        "apply a Doppler keep-mask \"lo,hi\" Hz before analysis");
    analyze->add_option("--block", analyze_args.mask_block, "mask block length in snapshots");
    analyze->add_option("--threads", analyze_args.threads, "worker threads (0 = auto)");
    analyze->add_flag("--dump-lsf", analyze_args.dump_lsf, "also write the full grid CSV");

    std::string report_path;
    CLI::App* report = app.add_subcommand("report", "print a summary of an analysis report");
    report->add_option("--report", report_path, "report JSON path")->required();

    try {
        app.parse(argc, argv);
        apply_kernel_choice(kernel_choice);
        if (synth->parsed()) {
            run_synth(synth_args);
        } else if (mask->parsed()) {
            run_mask(mask_args);
        } else if (analyze->parsed()) {
            run_analyze(analyze_args);
        } else if (report->parsed()) {
            run_report(report_path);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

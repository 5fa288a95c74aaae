#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "chanstat/synth.hpp"
#include "util.hpp"

using namespace chanstat;
using std::numbers::pi;

namespace {

const Sampling kSampling{129.1e-6, 4.96e6, 60e9};

SpecularPath still_path() {
    SpecularPath p;
    p.delay = Trajectory::constant(0.0);
    p.doppler = Trajectory::constant(0.0);
    return p;
}

}  // namespace

TEST_CASE("static unit path yields a constant record") {
    const ChannelRecord rec = gen_specular({still_path()}, {20, 8}, kSampling, 1);
    CHECK(rec.label == "specular");
    CHECK(rec.t_s == kSampling.t_s);
    CHECK(rec.f_s == kSampling.f_s);
    CHECK_FALSE(rec.noise_floor_db.has_value());
    for (std::size_t s = 0; s < rec.s(); ++s) {
        for (std::size_t q = 0; q < rec.q(); ++q) {
            CHECK(std::abs(rec.data(s, q) - cplx{1.0, 0.0}) < 1e-14);
        }
    }
}

TEST_CASE("doppler and delay phases follow the closed form") {
    SpecularPath p = still_path();
    p.doppler = Trajectory::constant(140.0);
    p.delay = Trajectory::constant(37e-9);
    const ChannelRecord rec = gen_specular({p}, {16, 12}, kSampling, 1);
    for (std::size_t s = 0; s < rec.s(); ++s) {
        const double t = static_cast<double>(s) * kSampling.t_s;
        for (std::size_t q = 0; q < rec.q(); ++q) {
            const cplx want = std::polar(1.0, 2.0 * pi * 140.0 * t) *
                              std::polar(1.0, -2.0 * pi * static_cast<double>(q) *
                                                  kSampling.f_s * 37e-9);
            CHECK(std::abs(rec.data(s, q) - want) < 1e-12);
        }
    }
}

TEST_CASE("trajectory interpolation clamps outside its breakpoints") {
    Trajectory traj;
    traj.points = {{0.1, 2.0}, {0.3, 6.0}};
    CHECK(traj.at(0.0) == 2.0);
    CHECK(traj.at(0.1) == 2.0);
    CHECK(traj.at(0.2) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(traj.at(0.3) == 6.0);
    CHECK(traj.at(5.0) == 6.0);
    CHECK(Trajectory::constant(3.5).at(-1.0) == 3.5);
}

TEST_CASE("aliasing trajectories are rejected") {
    SpecularPath p = still_path();
    p.doppler = Trajectory::constant(0.5 / kSampling.t_s);
    CHECK_THROWS_WITH_AS(static_cast<void>(gen_specular({p}, {4, 4}, kSampling, 1)),
                         "synth: doppler alias: |nu| reaches 1/(2 t_s)", ValidationError);

    p = still_path();
    p.delay = Trajectory::constant(1.0 / kSampling.f_s);
    CHECK_THROWS_WITH_AS(static_cast<void>(gen_specular({p}, {4, 4}, kSampling, 1)),
                         "synth: delay alias: tau outside [0, 1/f_s)", ValidationError);

    p = still_path();
    p.delay = Trajectory::constant(-1e-9);
    CHECK_THROWS_AS(static_cast<void>(gen_specular({p}, {4, 4}, kSampling, 1)),
                    ValidationError);

    // The ramp only violates the limit mid-record, which the breakpoint
    // probes still catch.
    p = still_path();
    p.doppler.points = {{0.0, 0.0}, {1e-3, 2.0 / kSampling.t_s}, {2e-3, 0.0}};
    CHECK_THROWS_AS(static_cast<void>(gen_specular({p}, {40, 4}, kSampling, 1)),
                    ValidationError);
}

TEST_CASE("random phase keeps magnitude and depends on the seed") {
    SpecularPath p = still_path();
    p.randomize_phase = true;
    const ChannelRecord a = gen_specular({p}, {6, 6}, kSampling, 7);
    const ChannelRecord b = gen_specular({p}, {6, 6}, kSampling, 7);
    const ChannelRecord c = gen_specular({p}, {6, 6}, kSampling, 8);
    CHECK(a.data == b.data);
    CHECK_FALSE(a.data == c.data);
    CHECK(std::abs(std::abs(a.data(0, 0)) - 1.0) < 1e-12);
}

TEST_CASE("wssus realizations have near-unit mean power") {
    WssusSpec spec;
    spec.nu_max = 500.0;
    spec.tau_rms = 20e-9;
    spec.num_taps = 4;
    const ChannelRecord rec = gen_wssus(spec, {400, 32}, kSampling, 11);
    CHECK(rec.label == "wssus");
    double power = 0.0;
    for (std::size_t i = 0; i < rec.data.size(); ++i) {
        power += std::norm(rec.data.data()[i]);
    }
    power /= static_cast<double>(rec.data.size());
    CHECK(power == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("jakes shape stays within the doppler limit and is deterministic") {
    WssusSpec spec;
    spec.doppler_shape = WssusSpec::DopplerShape::jakes;
    spec.nu_max = 800.0;
    const ChannelRecord a = gen_wssus(spec, {64, 8}, kSampling, 3);
    const ChannelRecord b = gen_wssus(spec, {64, 8}, kSampling, 3);
    CHECK(a.data == b.data);
    CHECK_FALSE(a.data == gen_wssus(spec, {64, 8}, kSampling, 4).data);
}

TEST_CASE("wssus parameter validation") {
    WssusSpec spec;
    spec.nu_max = 100.0;

    spec.sinusoids_per_tap = 8;
    CHECK_THROWS_AS(static_cast<void>(gen_wssus(spec, {8, 8}, kSampling, 1)),
                    ValidationError);

    spec = WssusSpec{};
    spec.nu_max = 0.5 / kSampling.t_s;
    CHECK_THROWS_AS(static_cast<void>(gen_wssus(spec, {8, 8}, kSampling, 1)),
                    ValidationError);

    spec = WssusSpec{};
    spec.nu_max = 100.0;
    spec.num_taps = 3;
    spec.tau_rms = 0.0;
    CHECK_THROWS_AS(static_cast<void>(gen_wssus(spec, {8, 8}, kSampling, 1)),
                    ValidationError);

    spec.tau_rms = 20e-9;
    spec.tap_powers = {1.0, 2.0};
    CHECK_THROWS_AS(static_cast<void>(gen_wssus(spec, {8, 8}, kSampling, 1)),
                    ValidationError);

    spec.tap_powers = {1.0, 2.0, -1.0};
    CHECK_THROWS_AS(static_cast<void>(gen_wssus(spec, {8, 8}, kSampling, 1)),
                    ValidationError);
}

TEST_CASE("single-segment piecewise reproduces the generator exactly") {
    WssusSpec spec;
    spec.nu_max = 300.0;
    const double duration = 100.0 * kSampling.t_s;
    const ChannelRecord direct = gen_wssus(spec, {100, 16}, kSampling, 9);
    const ChannelRecord wrapped =
        gen_piecewise({Segment{spec, duration}}, {100, 16}, kSampling, 9);
    CHECK(direct.data == wrapped.data);
    CHECK(wrapped.label == "wssus");
}

TEST_CASE("piecewise concatenates segments at their boundaries") {
    std::vector<SpecularPath> up{still_path()};
    up[0].doppler = Trajectory::constant(1000.0);
    std::vector<SpecularPath> down{still_path()};
    down[0].doppler = Trajectory::constant(-1000.0);

    const std::vector<Segment> segments{
        {up, 60.0 * kSampling.t_s},
        {down, 40.0 * kSampling.t_s},
    };
    const ChannelRecord rec = gen_piecewise(segments, {100, 4}, kSampling, 5);
    CHECK(rec.label.rfind("piecewise;boundaries_s=", 0) == 0);

    const ChannelRecord head = gen_specular(up, {60, 4}, kSampling,
                                            substream_seed(5, 0xD1342543DE82EF95ULL, 0));
    for (std::size_t q = 0; q < 4; ++q) {
        CHECK(rec.data(0, q) == head.data(0, q));
        CHECK(rec.data(59, q) == head.data(59, q));
    }
    // Second segment restarts its own clock at its first snapshot.
    const ChannelRecord tail = gen_specular(down, {40, 4}, kSampling,
                                            substream_seed(5, 0xD1342543DE82EF95ULL, 1));
    for (std::size_t q = 0; q < 4; ++q) {
        CHECK(rec.data(60, q) == tail.data(0, q));
    }
}

TEST_CASE("piecewise rejects mismatched durations") {
    WssusSpec spec;
    spec.nu_max = 100.0;
    const std::vector<Segment> segments{{spec, 60.0 * kSampling.t_s},
                                        {spec, 60.0 * kSampling.t_s}};
    CHECK_THROWS_AS(static_cast<void>(gen_piecewise(segments, {100, 4}, kSampling, 1)),
                    ValidationError);
    CHECK_THROWS_AS(
        static_cast<void>(gen_piecewise({Segment{spec, 0.0}}, {100, 4}, kSampling, 1)),
        ValidationError);
}

TEST_CASE("add_noise hits the requested snr and stamps the floor") {
    const ChannelRecord clean = gen_specular({still_path()}, {200, 50}, kSampling, 1);
    const ChannelRecord noisy = add_noise(clean, 20.0, 77);
    REQUIRE(noisy.noise_floor_db.has_value());
    CHECK(*noisy.noise_floor_db == doctest::Approx(-20.0).epsilon(1e-12));

    double noise_power = 0.0;
    for (std::size_t i = 0; i < noisy.data.size(); ++i) {
        noise_power += std::norm(noisy.data.data()[i] - clean.data.data()[i]);
    }
    noise_power /= static_cast<double>(noisy.data.size());
    const double snr_db = -10.0 * std::log10(noise_power);
    CHECK(snr_db == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("infinite snr leaves the record untouched") {
    const ChannelRecord clean = gen_specular({still_path()}, {10, 10}, kSampling, 1);
    const ChannelRecord same =
        add_noise(clean, std::numeric_limits<double>::infinity(), 3);
    CHECK(same.data == clean.data);
    CHECK_FALSE(same.noise_floor_db.has_value());
    CHECK_THROWS_AS(
        static_cast<void>(add_noise(clean, std::numeric_limits<double>::quiet_NaN(), 3)),
        ValidationError);
}

TEST_CASE("substream derivation is stable and keeps index zero transparent") {
    CHECK(substream_seed(123456789, 0xA24BAED4963EE407ULL, 0) == 123456789);
    CHECK(substream_seed(123456789, 0xA24BAED4963EE407ULL, 1) !=
          substream_seed(123456789, 0xA24BAED4963EE407ULL, 2));
    CHECK(substream_seed(1, 2, 3) == substream_seed(1, 2, 3));
}

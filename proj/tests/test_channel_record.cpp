#include <doctest.h>

#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "chanstat/channel_record.hpp"
#include "util.hpp"

using namespace chanstat;
using testutil::TempDir;
using testutil::random_cmat;

namespace {

ChannelRecord sample_record() {
    ChannelRecord rec;
    rec.data = random_cmat(7, 5, 42);
    rec.t_s = 129.1e-6;
    rec.f_s = 4.96e6;
    rec.f_carrier = 60e9;
    rec.noise_floor_db = -31.5;
    rec.label = "fixture";
    return rec;
}

std::vector<unsigned char> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("round trip preserves metadata and quantized samples") {
    TempDir dir;
    const ChannelRecord rec = sample_record();
    write_record(rec, dir.file("rec.bin"));
    const ChannelRecord back = read_record(dir.file("rec.bin"));

    CHECK(back.s() == rec.s());
    CHECK(back.q() == rec.q());
    CHECK(back.t_s == rec.t_s);
    CHECK(back.f_s == rec.f_s);
    CHECK(back.f_carrier == rec.f_carrier);
    CHECK(back.label == rec.label);
    REQUIRE(back.noise_floor_db.has_value());
    CHECK(*back.noise_floor_db == -31.5);
    for (std::size_t i = 0; i < rec.data.size(); ++i) {
        CHECK(back.data.data()[i].real() ==
              static_cast<double>(static_cast<float>(rec.data.data()[i].real())));
        CHECK(back.data.data()[i].imag() ==
              static_cast<double>(static_cast<float>(rec.data.data()[i].imag())));
    }
}

TEST_CASE("second read and write are byte-stable") {
    TempDir dir;
    write_record(sample_record(), dir.file("a.bin"));
    const ChannelRecord once = read_record(dir.file("a.bin"));
    write_record(once, dir.file("b.bin"));
    CHECK(slurp(dir.file("a.bin")) == slurp(dir.file("b.bin")));
    CHECK(slurp(dir.file("a.bin.json")) == slurp(dir.file("b.bin.json")));
}

TEST_CASE("single unit sample serializes to the fixed byte pattern") {
    TempDir dir;
    ChannelRecord rec;
    rec.data = CMat(1, 1, cplx{1.0, 0.0});
    rec.t_s = 1.0;
    rec.f_s = 1.0;
    write_record(rec, dir.file("one.bin"));
    const std::vector<unsigned char> bytes = slurp(dir.file("one.bin"));
    const std::vector<unsigned char> expected{0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x00};
    CHECK(bytes == expected);
}

TEST_CASE("noiseless floor marker survives the round trip") {
    TempDir dir;
    ChannelRecord rec = sample_record();
    rec.noise_floor_db = -std::numeric_limits<double>::infinity();
    write_record(rec, dir.file("quiet.bin"));
    const ChannelRecord back = read_record(dir.file("quiet.bin"));
    REQUIRE(back.noise_floor_db.has_value());
    CHECK(*back.noise_floor_db == -std::numeric_limits<double>::infinity());

    rec.noise_floor_db.reset();
    write_record(rec, dir.file("unset.bin"));
    CHECK_FALSE(read_record(dir.file("unset.bin")).noise_floor_db.has_value());
}

TEST_CASE("validation rejects broken records") {
    ChannelRecord rec = sample_record();
    rec.data = CMat();
    CHECK_THROWS_AS(rec.validate(), ValidationError);

    rec = sample_record();
    rec.t_s = 0.0;
    CHECK_THROWS_AS(rec.validate(), ValidationError);

    rec = sample_record();
    rec.data(2, 2) = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    CHECK_THROWS_AS(rec.validate(), ValidationError);

    rec = sample_record();
    rec.data(0, 0) = cplx(1e60, 0.0);  // fits a double, overflows float32
    CHECK_THROWS_AS(rec.validate(), ValidationError);
}

TEST_CASE("read errors distinguish io from validation") {
    TempDir dir;
    CHECK_THROWS_AS(read_record(dir.file("absent.bin")), IoError);

    write_record(sample_record(), dir.file("rec.bin"));

    {
        std::ofstream bad(dir.file("rec.bin.json"));
        bad << "{ not json";
    }
    CHECK_THROWS_AS(read_record(dir.file("rec.bin")), IoError);

    write_record(sample_record(), dir.file("rec.bin"));
    {
        std::ofstream truncate(dir.file("rec.bin"), std::ios::binary | std::ios::trunc);
        truncate << "xx";
    }
    CHECK_THROWS_AS(read_record(dir.file("rec.bin")), ValidationError);

    write_record(sample_record(), dir.file("rec.bin"));
    {
        std::ofstream meta(dir.file("rec.bin.json"));
        meta << R"({"format_version": 9, "S": 7, "Q": 5, "t_s": 1.0, "f_s": 1.0,)"
             << R"( "f_carrier": 0.0, "noise_floor_db": null, "label": ""})";
    }
    CHECK_THROWS_AS(read_record(dir.file("rec.bin")), ValidationError);

    write_record(sample_record(), dir.file("rec.bin"));
    {
        std::ofstream meta(dir.file("rec.bin.json"));
        meta << R"({"format_version": 1, "S": "seven", "Q": 5, "t_s": 1.0, "f_s": 1.0,)"
             << R"( "f_carrier": 0.0, "noise_floor_db": null, "label": ""})";
    }
    CHECK_THROWS_AS(read_record(dir.file("rec.bin")), ValidationError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "holo/field_io.hpp"

using namespace holo;
namespace ht = holo::testing;

TEST_CASE("plane positions, two planes straddle the volume") {
    WaveConfig cfg = ht::desk_config(64, 2);
    auto z = plane_positions(cfg);
    REQUIRE(z.size() == 2);
    CHECK(z[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(4e-3).epsilon(1e-12));
}

TEST_CASE("plane positions, three planes include the center") {
    WaveConfig cfg = ht::desk_config(64, 3);
    auto z = plane_positions(cfg);
    REQUIRE(z.size() == 3);
    CHECK(z[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(z[1] == doctest::Approx(2e-3).epsilon(1e-12));
    CHECK(z[2] == doctest::Approx(4e-3).epsilon(1e-12));
}

TEST_CASE("plane positions, single plane at the volume center") {
    WaveConfig cfg = ht::desk_config(64, 1);
    auto z = plane_positions(cfg);
    REQUIRE(z.size() == 1);
    CHECK(z[0] == 2e-3);
}

TEST_CASE("plane positions are symmetric and evenly spaced") {
    WaveConfig cfg = ht::desk_config(32, 5);
    cfg.distance = 3.1e-3;
    cfg.volume_depth = 1.7e-3;
    auto z = plane_positions(cfg);
    for (size_t l = 0; l + 1 < z.size(); ++l)
        CHECK(z[l + 1] - z[l] == doctest::Approx(cfg.volume_depth / 4).epsilon(1e-12));
    CHECK(0.5 * (z.front() + z.back()) == doctest::Approx(cfg.distance).epsilon(1e-12));
}

TEST_CASE("config validation rejects bad inputs") {
    WaveConfig cfg = ht::desk_config();
    cfg.pitch = -1.0;
    CHECK_THROWS_AS(cfg.validate(), HoloError);
    cfg = ht::desk_config();
    cfg.wavelengths = {0.0};
    CHECK_THROWS_AS(cfg.validate(), HoloError);
    cfg = ht::desk_config();
    cfg.num_planes = 0;
    CHECK_THROWS_AS(cfg.validate(), HoloError);
    cfg = ht::desk_config();
    cfg.nx = 0;
    CHECK_THROWS_AS(cfg.validate(), HoloError);
    cfg = ht::desk_config();
    cfg.num_planes = 4;
    cfg.volume_depth = 0.0;
    CHECK_THROWS_AS(cfg.validate(), HoloError);
}

TEST_CASE("intensity of a known sample") {
    ComplexField f(2, 1, 1, 1e-6);
    f.at(0, 0, 0) = c64(3.0, 4.0);
    f.at(0, 0, 1) = c64(-1.0, 2.0);
    auto I = intensity(f);
    CHECK(I.at(0, 0, 0) == 25.0);
    CHECK(I.at(0, 0, 1) == 5.0);
}

TEST_CASE("intensity is non-negative and energy splits over channels") {
    WaveConfig cfg = ht::desk_config(32);
    ComplexField f = ht::random_field(cfg, 7);
    auto I = intensity(f);
    for (double v : I.data) CHECK(v >= 0.0);
    double per_ch = 0.0;
    for (int ch = 0; ch < f.c; ++ch) per_ch += energy_channel(f, ch);
    CHECK(energy(f) == doctest::Approx(per_ch).epsilon(1e-14));
}

TEST_CASE("field file round trip is bit exact") {
    WaveConfig cfg = ht::desk_config(17);  // odd size on purpose
    cfg.wavelengths = {639e-9, 532e-9};
    ComplexField f = ht::random_field(cfg, 99);
    auto path = std::filesystem::temp_directory_path() / "holo_test_field.bin";
    write_field(path.string(), f);
    ComplexField g = read_field(path.string(), cfg.pitch);
    REQUIRE(g.w == f.w);
    REQUIRE(g.h == f.h);
    REQUIRE(g.c == f.c);
    CHECK(std::memcmp(f.data.data(), g.data.data(), f.data.size() * sizeof(c64)) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("field reader rejects garbage") {
    auto dir = std::filesystem::temp_directory_path();
    auto bad = dir / "holo_test_bad.bin";
    {
        std::FILE* fp = std::fopen(bad.string().c_str(), "wb");
        const char junk[] = "definitely not a field";
        std::fwrite(junk, 1, sizeof(junk), fp);
        std::fclose(fp);
    }
    CHECK_THROWS_AS(read_field(bad.string()), HoloError);

    // valid header, truncated payload
    WaveConfig cfg = ht::desk_config(8);
    ComplexField f = ht::random_field(cfg, 3);
    auto trunc = dir / "holo_test_trunc.bin";
    write_field(trunc.string(), f);
    std::filesystem::resize_file(trunc, 16 + 12 + 64);
    CHECK_THROWS_AS(read_field(trunc.string()), HoloError);
    std::filesystem::remove(bad);
    std::filesystem::remove(trunc);
}

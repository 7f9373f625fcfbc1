#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "holo/common.hpp"
#include "holo/png_io.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;
    TempDir() : dir(fs::temp_directory_path() / "holo_png_test") {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

std::vector<double> random_values(size_t n, std::uint64_t seed, double lo, double hi) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = uni(rng);
    return v;
}

}  // namespace

TEST_CASE("16 bit grayscale round trip reproduces the quantized values") {
    TempDir tmp;
    const int w = 17, h = 9;
    // includes out-of-range values, which clamp on write
    std::vector<double> v = random_values(static_cast<size_t>(w) * h, 42, -0.2, 1.2);
    v[0] = 0.0;
    v[1] = 1.0;
    write_gray16(tmp.file("g.png"), v.data(), w, h);

    int rw = 0, rh = 0;
    std::vector<double> back = read_gray16(tmp.file("g.png"), rw, rh);
    REQUIRE(rw == w);
    REQUIRE(rh == h);
    REQUIRE(back.size() == v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        const double expected = std::lround(std::clamp(v[i], 0.0, 1.0) * 65535.0) / 65535.0;
        CHECK(back[i] == expected);
    }
}

TEST_CASE("phase round trip stays within half a quantization step") {
    TempDir tmp;
    const int w = 23, h = 11;
    std::vector<double> phi = random_values(static_cast<size_t>(w) * h, 7, -10.0, 10.0);
    phi[0] = 0.0;
    phi[1] = kTwoPi - 1e-9;  // wraps to code zero

    for (int bits : {8, 10}) {
        const std::string path = tmp.file("p" + std::to_string(bits) + ".png");
        write_phase_png(path, phi.data(), w, h, bits);
        int rw = 0, rh = 0;
        std::vector<double> back = read_phase_png(path, rw, rh);
        REQUIRE(rw == w);
        REQUIRE(rh == h);
        const double half_step = kPi / (1 << bits);
        for (size_t i = 0; i < phi.size(); ++i) {
            CHECK(back[i] >= 0.0);
            CHECK(back[i] < kTwoPi);
            CHECK(std::abs(wrap_signed(back[i] - phi[i])) <= half_step * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("ten bit codes survive the sixteen bit carrier exactly") {
    TempDir tmp;
    const int w = 32, h = 32;  // 1024 pixels, one per code
    std::vector<double> phi(static_cast<size_t>(w) * h);
    const double step = kTwoPi / 1024.0;
    for (size_t i = 0; i < phi.size(); ++i) phi[i] = static_cast<double>(i) * step;
    write_phase_png(tmp.file("codes.png"), phi.data(), w, h, 10);

    int rw = 0, rh = 0;
    std::vector<double> back = read_phase_png(tmp.file("codes.png"), rw, rh);
    for (size_t i = 0; i < phi.size(); ++i) CHECK(back[i] == doctest::Approx(phi[i]).epsilon(1e-12));
}

TEST_CASE("srgb composite writes a readable preview") {
    TempDir tmp;
    IntensityImage img(8, 6, 3);
    std::vector<double> v = random_values(img.data.size(), 3, 0.0, 1.5);
    img.data = v;
    write_srgb8(tmp.file("c.png"), img);

    // check the signature rather than decoding: the preview is for eyes,
    // the 16 bit planes are for numbers
    std::FILE* f = std::fopen(tmp.file("c.png").c_str(), "rb");
    REQUIRE(f != nullptr);
    unsigned char sig[8] = {};
    REQUIRE(std::fread(sig, 1, 8, f) == 8u);
    std::fclose(f);
    const unsigned char expected[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    for (int i = 0; i < 8; ++i) CHECK(sig[i] == expected[i]);

    IntensityImage gray(8, 6, 1);
    write_srgb8(tmp.file("c1.png"), gray);
    CHECK(fs::exists(tmp.file("c1.png")));

    IntensityImage two(8, 6, 2);
    CHECK_THROWS_AS(write_srgb8(tmp.file("c2.png"), two), HoloError);

    // a color PNG is not a valid grayscale plane
    int rw = 0, rh = 0;
    CHECK_THROWS_AS(read_gray16(tmp.file("c.png"), rw, rh), HoloError);
}

TEST_CASE("the config tag rides inside the file") {
    TempDir tmp;
    std::vector<double> v(6, 0.25);
    write_gray16(tmp.file("tagged.png"), v.data(), 3, 2, "00ff00ff00ff00ff");
    CHECK(read_png_tag(tmp.file("tagged.png")) == "00ff00ff00ff00ff");

    int rw = 0, rh = 0;
    std::vector<double> back = read_gray16(tmp.file("tagged.png"), rw, rh);  // data unaffected
    CHECK(back[0] == std::lround(0.25 * 65535.0) / 65535.0);

    write_gray16(tmp.file("plain.png"), v.data(), 3, 2);
    CHECK(read_png_tag(tmp.file("plain.png")).empty());

    write_phase_png(tmp.file("ptag.png"), v.data(), 3, 2, 10, "abc123");
    CHECK(read_png_tag(tmp.file("ptag.png")) == "abc123");
}

TEST_CASE("channel paths stay alongside the base name") {
    CHECK(channel_path("out/img.png", 0, 1) == "out/img.png");
    CHECK(channel_path("out/img.png", 0, 3) == "out/img_r.png");
    CHECK(channel_path("out/img.png", 1, 3) == "out/img_g.png");
    CHECK(channel_path("out/img.png", 2, 3) == "out/img_b.png");
    CHECK(channel_path("out/img.png", 1, 4) == "out/img_c1.png");
    CHECK(channel_path("noext", 1, 3) == "noext_g");
    CHECK(channel_path("dir.v2/x", 0, 3) == "dir.v2/x_r");
    CHECK_THROWS_AS(channel_path("x.png", 3, 3), HoloError);
    CHECK_THROWS_AS(channel_path("x.png", -1, 3), HoloError);
}

TEST_CASE("io failures surface as errors, not crashes") {
    TempDir tmp;
    std::vector<double> v(4, 0.5);
    CHECK_THROWS_AS(write_gray16(tmp.file("missing_dir/x.png"), v.data(), 2, 2), HoloError);
    CHECK_THROWS_AS(write_gray16(tmp.file("bad.png"), v.data(), 0, 2), HoloError);
    CHECK_THROWS_AS(write_gray16(tmp.file("bad.png"), nullptr, 2, 2), HoloError);
    CHECK_THROWS_AS(write_phase_png(tmp.file("bad.png"), v.data(), 2, 2, 9), HoloError);

    int rw = 0, rh = 0;
    CHECK_THROWS_AS(read_gray16(tmp.file("absent.png"), rw, rh), HoloError);
    CHECK_THROWS_AS(read_phase_png(tmp.file("absent.png"), rw, rh), HoloError);

    // not a PNG at all
    std::FILE* f = std::fopen(tmp.file("junk.png").c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs("definitely not a png", f);
    std::fclose(f);
    CHECK_THROWS_AS(read_gray16(tmp.file("junk.png"), rw, rh), HoloError);

    // an 8 bit phase file is not a 16 bit data plane
    write_phase_png(tmp.file("p8.png"), v.data(), 2, 2, 8);
    CHECK_THROWS_AS(read_gray16(tmp.file("p8.png"), rw, rh), HoloError);
}

#include "holo/scene_io.hpp"

#include <json.hpp>

#include <cstdio>
#include <memory>

namespace holo {

namespace {
constexpr char kMagic[10] = {'H', 'O', 'L', 'O', 'S', 'C', 'E', 'N', 'E', '1'};

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void write_array(std::FILE* fp, const std::vector<double>& v, const std::string& path) {
    if (std::fwrite(v.data(), sizeof(double), v.size(), fp) != v.size())
        throw HoloError("io", "short write: " + path);
}

void read_array(std::FILE* fp, std::vector<double>& v, size_t n, const std::string& path) {
    v.resize(n);
    if (std::fread(v.data(), sizeof(double), n, fp) != n) throw HoloError("io", "truncated payload: " + path);
}
}  // namespace

void write_scene(const std::string& path, const GaussianScene& s) {
    s.validate();
    nlohmann::json header = {
        {"N", s.size()},
        {"L", s.num_planes},
        {"units",
         {{"positions", "m"},
          {"rotations", "unit_quaternion_wxyz"},
          {"scales", "log_m"},
          {"amplitudes", "linear"},
          {"opacities", "logit"},
          {"phases", "rad"},
          {"plane_logits", "logit"}}},
    };
    const std::string hs = header.dump();
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw HoloError("io", "cannot open for writing: " + path);
    if (std::fwrite(kMagic, 1, 10, fp.get()) != 10) throw HoloError("io", "short write: " + path);
    const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
    if (std::fwrite(&hlen, 4, 1, fp.get()) != 1) throw HoloError("io", "short write: " + path);
    if (std::fwrite(hs.data(), 1, hs.size(), fp.get()) != hs.size()) throw HoloError("io", "short write: " + path);
    write_array(fp.get(), s.positions, path);
    write_array(fp.get(), s.rotations, path);
    write_array(fp.get(), s.log_scales, path);
    write_array(fp.get(), s.amplitudes, path);
    write_array(fp.get(), s.opacity_logits, path);
    write_array(fp.get(), s.phases, path);
    write_array(fp.get(), s.plane_logits, path);
    if (std::fflush(fp.get()) != 0) throw HoloError("io", "flush failed: " + path);
}

GaussianScene read_scene(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + path);
    char magic[10];
    if (std::fread(magic, 1, 10, fp.get()) != 10) throw HoloError("io", "truncated header: " + path);
    if (std::memcmp(magic, kMagic, 10) != 0) throw HoloError("io", "bad magic, not a HOLOSCENE1 file: " + path);
    std::uint32_t hlen = 0;
    if (std::fread(&hlen, 4, 1, fp.get()) != 1) throw HoloError("io", "truncated header: " + path);
    if (hlen == 0 || hlen > (1u << 20)) throw HoloError("io", "implausible header length in " + path);
    std::string hs(hlen, '\0');
    if (std::fread(hs.data(), 1, hlen, fp.get()) != hlen) throw HoloError("io", "truncated header: " + path);

    nlohmann::json header;
    try {
        header = nlohmann::json::parse(hs);
    } catch (const nlohmann::json::exception& e) {
        throw HoloError("io", std::string("scene header is not valid JSON: ") + e.what());
    }
    if (!header.contains("N") || !header.contains("L"))
        throw HoloError("io", "scene header missing N or L: " + path);
    const size_t n = header["N"].get<size_t>();
    const int L = header["L"].get<int>();
    if (L < 1 || n > (1ull << 26)) throw HoloError("io", "implausible scene dimensions in " + path);

    GaussianScene s;
    s.num_planes = L;
    read_array(fp.get(), s.positions, n * 3, path);
    read_array(fp.get(), s.rotations, n * 4, path);
    read_array(fp.get(), s.log_scales, n * 3, path);
    read_array(fp.get(), s.amplitudes, n * 3, path);
    read_array(fp.get(), s.opacity_logits, n, path);
    read_array(fp.get(), s.phases, n * 3, path);
    read_array(fp.get(), s.plane_logits, n * static_cast<size_t>(L), path);
    s.validate();
    return s;
}

}  // namespace holo

#include "holo/field_io.hpp"

#include <bit>
#include <cstdio>
#include <memory>

namespace holo {

static_assert(std::endian::native == std::endian::little, "file formats assume a little endian host");

namespace {
constexpr char kMagic[16] = {'H', 'O', 'L', 'O', 'F', 'I', 'E', 'L', 'D', 0, 0, 0, 0, 0, 0, 0};

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
}  // namespace

void write_field(const std::string& path, const ComplexField& f) {
    if (f.w <= 0 || f.h <= 0 || f.c <= 0) throw HoloError("io", "write_field: empty field");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw HoloError("io", "cannot open for writing: " + path);
    if (std::fwrite(kMagic, 1, 16, fp.get()) != 16) throw HoloError("io", "short write: " + path);
    const std::uint32_t dims[3] = {static_cast<std::uint32_t>(f.w), static_cast<std::uint32_t>(f.h),
                                   static_cast<std::uint32_t>(f.c)};
    if (std::fwrite(dims, sizeof(std::uint32_t), 3, fp.get()) != 3) throw HoloError("io", "short write: " + path);
    // std::complex<double> is layout compatible with double[2] = (re, im)
    const size_t n = f.data.size();
    if (std::fwrite(f.data.data(), sizeof(c64), n, fp.get()) != n) throw HoloError("io", "short write: " + path);
    if (std::fflush(fp.get()) != 0) throw HoloError("io", "flush failed: " + path);
}

ComplexField read_field(const std::string& path, double pitch) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + path);
    char magic[16];
    if (std::fread(magic, 1, 16, fp.get()) != 16) throw HoloError("io", "truncated header: " + path);
    if (std::memcmp(magic, kMagic, 16) != 0) throw HoloError("io", "bad magic, not a HOLOFIELD file: " + path);
    std::uint32_t dims[3];
    if (std::fread(dims, sizeof(std::uint32_t), 3, fp.get()) != 3) throw HoloError("io", "truncated header: " + path);
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0 || dims[2] > 64)
        throw HoloError("io", "implausible dimensions in " + path);
    const size_t n = static_cast<size_t>(dims[0]) * dims[1] * dims[2];
    if (n > (1ull << 28)) throw HoloError("io", "field too large in " + path);
    ComplexField f(static_cast<int>(dims[0]), static_cast<int>(dims[1]), static_cast<int>(dims[2]), pitch);
    if (std::fread(f.data.data(), sizeof(c64), n, fp.get()) != n) throw HoloError("io", "truncated payload: " + path);
    return f;
}

}  // namespace holo

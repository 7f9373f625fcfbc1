#include "holo/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "holo/common.hpp"

namespace holo {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// libpng reports fatal problems through this callback, which must not
// return; throwing unwinds through the C frames and the RAII guards below
// release the structs
[[noreturn]] void on_png_error(png_structp, png_const_charp msg) {
    throw HoloError("io", std::string("png: ") + (msg ? msg : "unknown error"));
}

void on_png_warning(png_structp, png_const_charp) {}

struct PngWriter {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngWriter() {
        png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw HoloError("io", "png: allocation failed");
    }
    ~PngWriter() { png_destroy_write_struct(&png, info ? &info : nullptr); }
};

struct PngReader {
    png_structp png = nullptr;
    png_infop info = nullptr;
    PngReader() {
        png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
        if (png) info = png_create_info_struct(png);
        if (!png || !info) throw HoloError("io", "png: allocation failed");
    }
    ~PngReader() { png_destroy_read_struct(&png, info ? &info : nullptr, nullptr); }
};

void check_dims(int w, int h) {
    if (w <= 0 || h <= 0) throw HoloError("io", "png: empty image");
}

void write_rows(const std::string& path, int w, int h, int depth, int color_type,
                std::vector<png_bytep>& rows, const std::string& tag) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw HoloError("io", "cannot open for writing: " + path);
    PngWriter pw;
    png_init_io(pw.png, fp.get());
    png_set_IHDR(pw.png, pw.info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), depth,
                 color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (!tag.empty()) {
        char key[] = "config_hash";
        png_text text;
        std::memset(&text, 0, sizeof(text));
        text.compression = PNG_TEXT_COMPRESSION_NONE;
        text.key = key;
        text.text = const_cast<char*>(tag.c_str());
        text.text_length = tag.size();
        png_set_text(pw.png, pw.info, &text, 1);
    }
    png_write_info(pw.png, pw.info);
    if (depth == 16) png_set_swap(pw.png);  // buffers are host (little) endian
    png_write_image(pw.png, rows.data());
    png_write_end(pw.png, nullptr);
}

// reads a grayscale PNG of depth 8 or 16 into a uint16 buffer (8 bit
// samples land in the low byte)
std::vector<std::uint16_t> read_gray_any(const std::string& path, int& w, int& h, int& depth) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + path);
    PngReader pr;
    png_init_io(pr.png, fp.get());
    png_read_info(pr.png, pr.info);
    w = static_cast<int>(png_get_image_width(pr.png, pr.info));
    h = static_cast<int>(png_get_image_height(pr.png, pr.info));
    depth = png_get_bit_depth(pr.png, pr.info);
    const int color = png_get_color_type(pr.png, pr.info);
    if (color != PNG_COLOR_TYPE_GRAY) throw HoloError("io", "png: expected grayscale: " + path);
    if (depth != 8 && depth != 16) throw HoloError("io", "png: unsupported bit depth: " + path);
    if (png_get_interlace_type(pr.png, pr.info) != PNG_INTERLACE_NONE)
        throw HoloError("io", "png: interlaced input not supported: " + path);
    if (depth == 16) png_set_swap(pr.png);

    std::vector<std::uint16_t> out(static_cast<size_t>(w) * h);
    std::vector<std::uint8_t> row8(depth == 8 ? static_cast<size_t>(w) : 0);
    for (int y = 0; y < h; ++y) {
        if (depth == 16) {
            png_read_row(pr.png, reinterpret_cast<png_bytep>(out.data() + static_cast<size_t>(y) * w), nullptr);
        } else {
            png_read_row(pr.png, row8.data(), nullptr);
            for (int x = 0; x < w; ++x) out[static_cast<size_t>(y) * w + x] = row8[x];
        }
    }
    png_read_end(pr.png, nullptr);
    return out;
}

double srgb_encode(double linear) {
    const double l = std::clamp(linear, 0.0, 1.0);
    return l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
}

}  // namespace

void write_gray16(const std::string& path, const double* data, int w, int h,
                  const std::string& tag) {
    check_dims(w, h);
    if (!data) throw HoloError("io", "png: null data");
    std::vector<std::uint16_t> buf(static_cast<size_t>(w) * h);
    for (size_t i = 0; i < buf.size(); ++i) {
        const double v = std::clamp(data[i], 0.0, 1.0);
        buf[i] = static_cast<std::uint16_t>(std::lround(v * 65535.0));
    }
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = reinterpret_cast<png_bytep>(buf.data() + static_cast<size_t>(y) * w);
    write_rows(path, w, h, 16, PNG_COLOR_TYPE_GRAY, rows, tag);
}

std::vector<double> read_gray16(const std::string& path, int& w, int& h) {
    int depth = 0;
    std::vector<std::uint16_t> raw = read_gray_any(path, w, h, depth);
    if (depth != 16) throw HoloError("io", "png: expected 16 bit samples: " + path);
    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / 65535.0;
    return out;
}

void write_srgb8(const std::string& path, const IntensityImage& img, const std::string& tag) {
    check_dims(img.w, img.h);
    if (img.c != 1 && img.c != 3)
        throw HoloError("io", "png: composite needs 1 or 3 channels");
    const int color = img.c == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
    std::vector<std::uint8_t> buf(static_cast<size_t>(img.w) * img.h * img.c);
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            for (int ch = 0; ch < img.c; ++ch) {
                const double v = srgb_encode(img.at(ch, y, x));
                buf[(static_cast<size_t>(y) * img.w + x) * img.c + ch] =
                    static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
    std::vector<png_bytep> rows(img.h);
    for (int y = 0; y < img.h; ++y) rows[y] = buf.data() + static_cast<size_t>(y) * img.w * img.c;
    write_rows(path, img.w, img.h, 8, color, rows, tag);
}

void write_phase_png(const std::string& path, const double* phase, int w, int h, int bits,
                     const std::string& tag) {
    check_dims(w, h);
    if (!phase) throw HoloError("io", "png: null data");
    if (bits != 8 && bits != 10) throw HoloError("io", "png: phase bit depth must be 8 or 10");
    const int levels = 1 << bits;
    const double step = kTwoPi / levels;
    const size_t n = static_cast<size_t>(w) * h;
    std::vector<std::uint16_t> buf16;
    std::vector<std::uint8_t> buf8;
    std::vector<png_bytep> rows(h);
    if (bits == 8) {
        buf8.resize(n);
        for (size_t i = 0; i < n; ++i)
            buf8[i] = static_cast<std::uint8_t>(std::lround(wrap_phase(phase[i]) / step) % levels);
        for (int y = 0; y < h; ++y) rows[y] = buf8.data() + static_cast<size_t>(y) * w;
        write_rows(path, w, h, 8, PNG_COLOR_TYPE_GRAY, rows, tag);
    } else {
        buf16.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const auto code = static_cast<std::uint16_t>(std::lround(wrap_phase(phase[i]) / step) % levels);
            buf16[i] = static_cast<std::uint16_t>((code << 6) | (code >> 4));
        }
        for (int y = 0; y < h; ++y)
            rows[y] = reinterpret_cast<png_bytep>(buf16.data() + static_cast<size_t>(y) * w);
        write_rows(path, w, h, 16, PNG_COLOR_TYPE_GRAY, rows, tag);
    }
}

std::vector<double> read_phase_png(const std::string& path, int& w, int& h) {
    int depth = 0;
    std::vector<std::uint16_t> raw = read_gray_any(path, w, h, depth);
    const int bits = depth == 8 ? 8 : 10;
    const double step = kTwoPi / (1 << bits);
    std::vector<double> out(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        const std::uint16_t code = depth == 8 ? raw[i] : static_cast<std::uint16_t>(raw[i] >> 6);
        out[i] = code * step;
    }
    return out;
}

std::string read_png_tag(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + path);
    PngReader pr;
    png_init_io(pr.png, fp.get());
    png_read_info(pr.png, pr.info);
    png_textp texts = nullptr;
    int count = 0;
    png_get_text(pr.png, pr.info, &texts, &count);
    for (int i = 0; i < count; ++i)
        if (texts[i].key && std::string(texts[i].key) == "config_hash" && texts[i].text)
            return std::string(texts[i].text);
    return {};
}

std::string channel_path(const std::string& base, int ch, int channels) {
    if (channels <= 0 || ch < 0 || ch >= channels) throw HoloError("io", "png: bad channel index");
    if (channels == 1) return base;
    static const char* rgb[3] = {"_r", "_g", "_b"};
    const std::string suffix = channels == 3 ? rgb[ch] : "_c" + std::to_string(ch);
    const size_t dot = base.find_last_of('.');
    const size_t slash = base.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return base + suffix;
    return base.substr(0, dot) + suffix + base.substr(dot);
}

}  // namespace holo

#pragma once

#include <string>
#include <vector>

#include "holo/field.hpp"

namespace holo {

// Writers accept an optional tag, stored as a "config_hash" text chunk so
// artifacts stay traceable to the run that produced them.

// 16 bit grayscale PNG, linear light.  Values are clamped to [0, 1] and
// quantized to 65535 levels; read returns them in [0, 1].
void write_gray16(const std::string& path, const double* data, int w, int h,
                  const std::string& tag = {});
std::vector<double> read_gray16(const std::string& path, int& w, int& h);

// 8 bit sRGB composite preview.  A 3 channel image maps to RGB, a single
// channel one to grayscale; other channel counts are rejected.
void write_srgb8(const std::string& path, const IntensityImage& img, const std::string& tag = {});

// Phase map quantized to 2^bits codes over [0, 2pi), bits 8 or 10.  8 bit
// codes fill an 8 bit PNG; 10 bit codes ride in a 16 bit PNG with the code
// in the top bits (bit replicated), so readers recover them as value >> 6.
// The reader infers the code width from the PNG bit depth and returns
// phases at the code centers, code * 2pi / 2^bits.
void write_phase_png(const std::string& path, const double* phase, int w, int h, int bits,
                     const std::string& tag = {});
std::vector<double> read_phase_png(const std::string& path, int& w, int& h);

// the "config_hash" chunk of a PNG written here, empty when absent
std::string read_png_tag(const std::string& path);

// Per channel file naming: "dir/out.png" becomes "dir/out_r.png" for
// channel 0 of 3 (then _g, _b), "_c<k>" for other channel counts, and a
// single channel image keeps the name unchanged.
std::string channel_path(const std::string& base, int ch, int channels);

}  // namespace holo

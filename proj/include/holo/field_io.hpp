#pragma once

#include <string>

#include "holo/field.hpp"

namespace holo {

// HOLOFIELD container: 16 byte magic ("HOLOFIELD" zero padded), then
// u32 W, H, C little endian, then W*H*C (re, im) f64 pairs, row major
// with channels outermost.  Pixel pitch is not part of the container;
// readers supply it (CLI flag / config).
void write_field(const std::string& path, const ComplexField& f);
ComplexField read_field(const std::string& path, double pitch = 3.74e-6);

}  // namespace holo

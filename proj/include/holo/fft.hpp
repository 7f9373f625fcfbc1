#pragma once

#include "holo/common.hpp"

namespace holo {

// 2D c2c FFT on row-major data.  Convention: forward applies
// exp(-j 2 pi f x) unnormalized, inverse carries the 1/(w*h) factor.
// Plans are cached per size and reused; planning is mutex guarded
// (FFTW planning is not thread safe, execution with per-call arrays is).
void fft2(c64* data, int w, int h);
void ifft2(c64* data, int w, int h);

}  // namespace holo

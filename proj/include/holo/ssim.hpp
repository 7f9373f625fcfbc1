#pragma once

#include "holo/field.hpp"

namespace holo {

// Mean structural similarity between two images of the same shape,
// averaged over channels and all fully-interior 11x11 window positions
// (gaussian window, sigma 1.5; stability constants for dynamic range 1).
// When grad_x is given it receives d(mean ssim)/dx, same shape as x.
double ssim_mean(const IntensityImage& x, const IntensityImage& y, IntensityImage* grad_x = nullptr);

}  // namespace holo

#pragma once

#include <vector>

#include "holo/field.hpp"

namespace holo {

// Per-plane losses over focal stacks (vectors of 3-channel intensity
// images).  Every function averages over planes; gradient outputs
// ACCUMULATE into caller-allocated images so terms can be stacked.

// (1/L) sum_l mean((I - I_gt)^2)
double loss_mse(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                std::vector<IntensityImage>* grad = nullptr);

// (1/L) sum_l [ mean((I-I_gt)^2) + mean((M I - M I_gt)^2) + mean((I_gt I - I_gt I_gt)^2) ]
// with per-plane single-channel masks broadcast across channels
double loss_recon(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                  const std::vector<IntensityImage>& masks, std::vector<IntensityImage>* grad = nullptr);

// (1/L) sum_l lambda (1 - SSIM(I_l, I_gt,l))
double loss_ssim(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                 double lambda, std::vector<IntensityImage>* grad = nullptr);

// 10 log10(1 / MSE), capped at 99 dB
double psnr(const IntensityImage& I, const IntensityImage& I_gt);

}  // namespace holo

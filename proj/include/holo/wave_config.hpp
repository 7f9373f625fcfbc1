#pragma once

#include <vector>

#include "holo/common.hpp"

namespace holo {

// Optical geometry shared by propagation, rasterization and training.
// Distances are meters, wavelengths are meters, one channel per wavelength.
struct WaveConfig {
    int nx = 128;                    // grid width in pixels
    int ny = 128;                    // grid height in pixels
    double pitch = 3.74e-6;          // pixel pitch
    std::vector<double> wavelengths = {639e-9, 532e-9, 473e-9};
    double distance = 2e-3;          // hologram plane to volume center
    double volume_depth = 4e-3;      // axial extent of the plane stack
    int num_planes = 2;

    int channels() const { return static_cast<int>(wavelengths.size()); }

    void validate() const;
};

// Axial positions of the depth planes relative to the hologram plane.
// Planes sit symmetrically around `distance`; a single plane sits at
// `distance` itself.  Spacing is volume_depth / (L - 1).
std::vector<double> plane_positions(const WaveConfig& cfg);

}  // namespace holo

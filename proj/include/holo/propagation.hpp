#pragma once

#include <vector>

#include "holo/field.hpp"
#include "holo/wave_config.hpp"

namespace holo {

struct PropagationOptions {
    bool pad2x = false;             // zero-pad to 2W x 2H around the field, crop after
    bool local_band_limit = false;  // extra local-frequency limit for long throws
};

// Angular-spectrum transfer function for one propagation distance,
// sampled on the wrapped (DC first) frequency grid, one plane per
// wavelength channel.  Inside the propagating band |H| = 1, evanescent
// bins are zeroed.
struct TransferFunction {
    int w = 0, h = 0, c = 0;
    double z = 0.0;
    std::vector<c64> hz;  // same layout as ComplexField

    const c64* channel(int ch) const { return hz.data() + static_cast<size_t>(ch) * h * w; }
};

TransferFunction transfer_function(const WaveConfig& cfg, double z, const PropagationOptions& opt = {});

// u(z) = IFFT( H_z . FFT(u) ), per channel.
ComplexField propagate(const ComplexField& u, const WaveConfig& cfg, double z, const PropagationOptions& opt = {});

// Coherent hologram-plane field: sum of every depth layer propagated to
// the hologram plane (distance +Z_l each).
ComplexField forward_record(const std::vector<ComplexField>& layers, const WaveConfig& cfg,
                            const PropagationOptions& opt = {});

// Focal stack: the hologram field propagated back to each depth plane
// (distance -Z_l each).
std::vector<ComplexField> inverse_propagate(const ComplexField& hologram, const WaveConfig& cfg,
                                            const PropagationOptions& opt = {});

// Ideal point emitters evaluated directly on the hologram plane grid.
struct PointSource {
    double x = 0.0, y = 0.0;  // transverse position, meters, grid-centered coords
    double z = 0.0;           // distance in front of the hologram plane, > 0
    std::vector<double> amps; // one per channel (size 1 broadcasts)
    double phase0 = 0.0;      // optional intrinsic phase offset
};

struct PointSourceOptions {
    bool paraxial = false;   // quadratic phase approximation
    bool inverse_r = false;  // scale amplitude by 1/D instead of constant
    // principal point in pixels; negative means grid center (n/2)
    double cx = -1.0, cy = -1.0;
};

ComplexField point_source_field(const WaveConfig& cfg, const std::vector<PointSource>& sources,
                                const PointSourceOptions& opt = {});

// exact spherical phase 2 pi D / lambda wrapped to [0, 2pi)
double point_phase_exact(double lambda, double dx, double dy, double z);
// quadratic approximation 2 pi (z + r^2 / 2z) / lambda wrapped to [0, 2pi)
double point_phase_paraxial(double lambda, double dx, double dy, double z);

}  // namespace holo

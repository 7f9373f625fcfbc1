#pragma once

#include <vector>

#include "holo/field.hpp"
#include "holo/propagation.hpp"
#include "holo/wave_config.hpp"

namespace holo {

// Unit-amplitude hologram parameterized by its phase; the field is
// e^{j phase} by construction, so the amplitude cannot drift from one.
struct PhaseOnlyHologram {
    int w = 0, h = 0, c = 0;
    std::vector<double> phase;  // (ch * h + y) * w + x, radians

    ComplexField field(double pitch) const;
};

struct PhaseOnlyOptions {
    double lambda_ssim = 1.0;  // structural term weight, applied to squared magnitudes
    PropagationOptions prop;
    bool use_adam = false;

    // Conversion propagates padded by default.  At this pitch every grid
    // frequency propagates with unit gain, so on the periodic (unpadded)
    // grid the matching term is a plane-independent pointwise distance
    // that the initialization already minimizes; padding lets energy
    // leave the frame, which is what gives the optimizer room to work.
    PhaseOnlyOptions() { prop.pad2x = true; }
};

// Matching loss between the replayed stacks of a complex hologram and a
// unit-amplitude candidate e^{j theta}: both fields travel back to every
// depth plane, and the loss is the per-plane mean squared field difference
// plus a structural term on the squared magnitudes, averaged over planes.
// When grad is given it receives d loss / d theta, same layout as theta.
double phase_only_loss(const ComplexField& P, const std::vector<double>& theta, const WaveConfig& cfg,
                       const PhaseOnlyOptions& opt = {}, std::vector<double>* grad = nullptr);

struct PhaseOnlyResult {
    PhaseOnlyHologram hologram;  // best iterate found
    std::vector<double> trace;   // loss at initialization plus one entry per iteration
};

// Conversion by gradient descent on theta with adaptive moments, starting
// from arg(P).  Whenever the loss rises the step size halves and the
// parameters fall back to the best iterate seen so far, so the returned
// hologram never scores worse than the initialization.
PhaseOnlyResult convert_phase_only(const ComplexField& P, const WaveConfig& cfg, int iters = 1000,
                                   double lr = 0.02, const PhaseOnlyOptions& opt = {});

// Central finite differences of the matching loss for the sampled phase
// entries (every entry when indices is empty; unsampled entries stay
// zero).  Grids above 64x64 are rejected, as is an empty plane stack.
std::vector<double> phase_gradient_oracle(const ComplexField& P, const std::vector<double>& theta,
                                          const WaveConfig& cfg, const std::vector<size_t>& indices = {},
                                          double fd_step = 1e-5, const PhaseOnlyOptions& opt = {});

}  // namespace holo

#pragma once

#include <cstdint>

#include "holo/camera.hpp"
#include "holo/field.hpp"
#include "holo/scene.hpp"
#include "holo/wave_config.hpp"

namespace holo {

struct RenderSettings {
    double near_clip = 0.0;            // meters; <= 0 derives 0.2 * cfg.distance
    double dilation = 0.3;             // px^2 added to the projected covariance diagonal
    double plane_eps = 0.5;            // plane gate for the hard assignment
    double term_eps = 1e-4;            // early termination transmittance
    double alpha_floor = 1.0 / 255.0;  // contributions below this are skipped
    double alpha_clamp = 0.999;        // keeps 1/(1-alpha) finite in the backward pass
    double radius_form_cap = 0.0;      // quadratic-form cutoff; 0 = derive from alpha_floor
    double ste_tau = 1e-3;             // straight-through softmax temperature
    bool soft_assignment = false;      // relaxed plane weights, used by gradient checks
    double soft_tau = 1.0;
    int tile = 16;

    double effective_near(const WaveConfig& cfg) const {
        return near_clip > 0.0 ? near_clip : 0.2 * cfg.distance;
    }
};

namespace detail {

// screen-space footprint of one Gaussian plus everything the backward
// chain needs that is cheaper to keep than to recompute
struct Projected {
    bool valid = false;
    int n = -1;
    double mu_x = 0, mu_y = 0;            // pixel coords of the projected center
    double inv00 = 0, inv01 = 0, inv11 = 0;  // inverse of the dilated 2D covariance
    double radius = 0;                    // support radius, pixels
    double xc = 0, yc = 0, zc = 0;        // camera-space center, zc is the depth key
    double alpha_sig = 0;                 // sigmoid(opacity logit)
    double amp[3] = {0, 0, 0};
    double phase[3] = {0, 0, 0};
    int plane = 0;                        // hard assignment
};

Projected project_gaussian(const GaussianScene& scene, size_t n, const CameraView& cam,
                           const Eigen::Matrix3d& world_to_cam, const WaveConfig& cfg,
                           const RenderSettings& settings);

struct Entry {
    std::int32_t bucket;  // plane * num_tiles + tile
    std::int32_t gidx;    // index into the projected array
    double depth;
};

}  // namespace detail

// Forward rasterization output plus the auxiliary state the backward pass
// replays: per pixel per plane final transmittance and the number of
// composited contributions, the sorted tile work lists, and the cached
// projections.  Gaussian responses are recomputed in the backward pass.
struct RasterForward {
    std::vector<ComplexField> layers;  // one field per plane
    std::vector<double> t_final;       // L * h * w
    std::vector<std::int32_t> n_contrib;  // L * h * w
    std::vector<detail::Projected> projected;
    std::vector<double> rho;           // N * L plane weights actually used
    std::vector<std::uint8_t> touched;  // Gaussian overlapped at least one tile
    std::vector<detail::Entry> entries;   // bucket-major, depth sorted
    std::vector<std::uint32_t> bucket_start;
    int tiles_x = 0, tiles_y = 0;
};

RasterForward raster_forward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                             const RenderSettings& settings);

// upstream: d(loss)/d(layer fields), treating re/im as independent reals
SceneGradients raster_backward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                               const RenderSettings& settings, const RasterForward& fwd,
                               const std::vector<ComplexField>& grad_layers);

// reference path: same per-pixel math, no tiles, no support-radius culling,
// no early termination; used as the equivalence oracle
std::vector<ComplexField> brute_force_forward(const GaussianScene& scene, const CameraView& cam,
                                              const WaveConfig& cfg, const RenderSettings& settings);

}  // namespace holo

#pragma once

#include <vector>

#include "holo/camera.hpp"
#include "holo/field.hpp"
#include "holo/propagation.hpp"
#include "holo/rasterizer.hpp"
#include "holo/scene.hpp"

namespace holo {

// Supervision for one camera view: per-plane target intensities plus the
// disjoint per-plane binary masks used by the focus-weighted loss term.
struct FocalStackTarget {
    std::vector<IntensityImage> images;  // one 3-channel image per plane
    std::vector<IntensityImage> masks;   // one single-channel binary image per plane
    CameraView camera;

    void validate(const WaveConfig& cfg) const;
};

struct PipelineOptions {
    RenderSettings raster;
    PropagationOptions prop;
    double lambda_ssim = 0.005;
    double lambda_opacity = 1e-4;  // opacity decay, stands in for opacity resets
    bool use_plain_mse = false;    // ablation: plain MSE instead of the masked term
};

// One full forward evaluation: rasterize per-plane complex layers,
// coherently record them at the hologram plane, replay the hologram back
// to every plane, and square to intensities.
struct PipelineForward {
    RasterForward raster;
    ComplexField hologram;
    std::vector<ComplexField> replayed;
    std::vector<IntensityImage> intensities;
};

PipelineForward pipeline_forward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                                 const PipelineOptions& opt);

struct LossBreakdown {
    double total = 0.0, recon = 0.0, ssim = 0.0, opacity = 0.0;
    double psnr_mean = 0.0;
    std::vector<double> psnr;  // per plane
};

// Loss over the replayed focal stack; when grads is given, backpropagates
// through the propagation stages into the rasterizer and adds the opacity
// decay term.  fwd_out, when given, receives the forward evaluation (the
// trainer reads visibility flags from it).
LossBreakdown total_loss(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                         const FocalStackTarget& target, const PipelineOptions& opt,
                         SceneGradients* grads = nullptr, PipelineForward* fwd_out = nullptr);

// Self-consistent supervision: run the pipeline on a known scene, take the
// replayed intensities as targets and build disjoint masks from the plane
// whose rasterized amplitude dominates at each pixel.
FocalStackTarget make_target_from_scene(const GaussianScene& oracle, const CameraView& cam,
                                        const WaveConfig& cfg, const PipelineOptions& opt);

}  // namespace holo

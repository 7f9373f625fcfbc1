#pragma once

#include <random>
#include <string>
#include <vector>

#include "holo/optimizer.hpp"
#include "holo/pipeline.hpp"
#include "holo/scene.hpp"

namespace holo {

struct TrainHyper {
    long long steps = 20000;  // total step budget (global, not per call)
    OptimizerConfig optim;
    PipelineOptions pipeline;
    DensifyParams densify;
    long long densify_interval = 300;  // 0 disables densification
    long long densify_start = 500;     // first eligible step
    long long densify_until = 15000;   // last eligible step
    bool random_views = false;         // round-robin otherwise
};

// Everything the training loop mutates; checkpointable as one unit.
struct TrainerState {
    GaussianScene scene;
    OptimState optim;
    DensifyStats stats;      // screen-gradient accumulators since the last round
    std::mt19937_64 rng;     // drives split/clone sampling and random view picks
    long long global_step = 0;
    std::uint64_t config_hash = 0;

    // fresh state around an initial scene
    static TrainerState fresh(GaussianScene scene, std::uint64_t seed, std::uint64_t config_hash = 0);
};

struct MetricsRow {
    long long step = 0;  // state index the losses were measured at
    double loss = 0.0, loss_recon = 0.0, loss_ssim = 0.0, psnr_mean = 0.0;
};

struct TrainResult {
    std::vector<MetricsRow> metrics;  // one row per executed step + final eval row
    long long steps_run = 0;
    int densify_rounds = 0;
};

// Runs the optimization loop until state.global_step reaches hyper.steps:
// pick a view, evaluate the focal-stack loss and its gradients, apply one
// optimizer update, and densify on the configured cadence.  The final row
// of the metrics log is an evaluation pass averaged over all views with no
// parameter update.
TrainResult train(TrainerState& state, const std::vector<FocalStackTarget>& views, const WaveConfig& cfg,
                  const TrainHyper& hyper);

// CSV serialization of the metrics log, header step,loss,loss_recon,loss_ssim,psnr_mean
std::string metrics_csv(const std::vector<MetricsRow>& rows);

// Checkpoint: scene container next to a JSON sidecar naming the optimizer
// moments file and recording step, rng state and config hash.  `json_path`
// is the sidecar; sibling files get the same stem with .scene / .moments
// extensions.
void save_checkpoint(const std::string& json_path, const TrainerState& state);
TrainerState load_checkpoint(const std::string& json_path);

// Naive imported supervision: one RGB image plus a depth map in [0,1],
// quantized into L equal-depth bins for the masks; every plane shares the
// full RGB image as its target.
FocalStackTarget make_target_from_rgbd(const IntensityImage& rgb, const IntensityImage& depth,
                                       const CameraView& cam, const WaveConfig& cfg);

}  // namespace holo

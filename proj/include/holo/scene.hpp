#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <vector>

#include "holo/common.hpp"
#include "holo/wave_config.hpp"

namespace holo {

// Learnable complex Gaussian primitives, struct-of-arrays.  Channel count
// is fixed at 3 (one per wavelength).  Stored parameterizations:
// rotations are unit quaternions (w, x, y, z), scales are logs of the
// world-space standard deviations, opacities are pre-sigmoid logits,
// phases are radians, plane_logits drive the straight-through plane pick.
struct GaussianScene {
    static constexpr int kChannels = 3;

    int num_planes = 1;
    std::vector<double> positions;       // N * 3, meters
    std::vector<double> rotations;       // N * 4
    std::vector<double> log_scales;      // N * 3
    std::vector<double> amplitudes;      // N * 3, non-negative
    std::vector<double> opacity_logits;  // N
    std::vector<double> phases;          // N * 3
    std::vector<double> plane_logits;    // N * num_planes

    size_t size() const { return opacity_logits.size(); }
    void resize(size_t n);
    void validate() const;

    // keep stored invariants after optimizer steps: unit quaternions,
    // non-negative amplitudes
    void renormalize();
};

// gradient (or accumulator) with the same shapes as the scene
struct SceneGradients {
    std::vector<double> positions, rotations, log_scales, amplitudes, opacity_logits, phases, plane_logits;
    // screen-space mean gradient, pixels; kept separate for densification stats
    std::vector<double> mu_screen;  // N * 2
    void resize_like(const GaussianScene& s);
    void clear();
};

// Sigma = R S S^T R^T from a (not necessarily unit) quaternion and log scales.
Eigen::Matrix3d covariance_3d(const double* quat, const double* log_scales);

namespace detail {
// rotation matrix of the normalized quaternion
Eigen::Matrix3d quat_to_rot(const double* q);
// chain d(loss)/d(Sigma) -> d(loss)/d(raw quat), d(loss)/d(log scales);
// includes the normalization of q
void covariance_backward(const double* quat, const double* log_scales, const Eigen::Matrix3d& dL_dSigma,
                         double* dL_dquat, double* dL_dlogs);
}  // namespace detail

// Straight-through plane pick: forward returns the argmax one-hot (ties
// resolved to the lowest index), backward weights are softmax(logits / tau).
struct SteAssign {
    int index = 0;
    std::vector<double> onehot;
    std::vector<double> backward_weights;
};
SteAssign ste_assign(const double* logits, int L, double tau);

// seed points for initialization
struct SeedPoint {
    Eigen::Vector3d pos;
    std::optional<Eigen::Vector3d> color;  // per-channel amplitude if present
};

struct InitParams {
    double amplitude = 0.5;          // used when seeds carry no color
    double opacity = 0.1;            // initial sigmoid(opacity)
    int knn = 3;                     // neighbors for the isotropic scale
    double scale_fallback_frac = 0.01;  // of volume_depth, for degenerate seed sets
};

GaussianScene init_scene(const std::vector<SeedPoint>& seeds, const WaveConfig& cfg, std::uint64_t seed,
                         const InitParams& params = {});

// largest distance from the position centroid; reference length for
// densification thresholds
double scene_extent(const GaussianScene& s);

struct DensifyParams {
    double grad_threshold = 2e-4;    // mean screen-space gradient norm, NDC units
    double scale_threshold_frac = 0.01;  // of scene extent: split above, clone below
    double prune_opacity = 0.005;    // sigmoid space
    double prune_scale_frac = 0.5;   // of scene extent: oversized Gaussians go
    double split_shrink = 1.6;       // children scales divide by this
    double perturb_sigma = 0.01;     // noise on inherited phases / plane logits
};

// per-Gaussian running stats collected between densification rounds
struct DensifyStats {
    std::vector<double> grad_norm_sum;  // NDC-scaled screen gradient norms
    std::vector<int> visible_count;
    void resize(size_t n);
    void clear();
};

struct DensifyResult {
    // for every Gaussian in the new scene, the index it came from in the
    // old scene, or -1 for freshly sampled split children; lets the
    // optimizer carry moments across
    std::vector<int> src_index;
    int pruned = 0, split = 0, cloned = 0;
};

DensifyResult densify_and_prune(GaussianScene& scene, const DensifyStats& stats, const DensifyParams& params,
                                std::mt19937_64& rng);

}  // namespace holo

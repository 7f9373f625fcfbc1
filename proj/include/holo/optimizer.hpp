#pragma once

#include <cstdint>
#include <vector>

#include "holo/scene.hpp"

namespace holo {

// Adan-style optimizer over the seven scene parameter groups with the
// decay-factor convention of the reference implementation:
//   m <- b1 m + (1-b1) g
//   v <- b2 v + (1-b2) (g - g_prev)
//   n <- b3 n + (1-b3) (g + b2 (g - g_prev))^2
//   theta -= lr (m_hat + b2 v_hat) / (sqrt(n_hat) + eps)
// with per-moment bias corrections.  A plain two-moment fallback
// (m / sqrt(second moment), same betas) sits behind use_adam.
struct OptimizerConfig {
    double lr_positions = 0.01;
    double lr_rotations = 0.001;
    double lr_log_scales = 0.005;
    double lr_amplitudes = 0.0025;
    double lr_phases = 0.0025;
    double lr_opacities = 0.025;
    double lr_plane_logits = 0.01;
    double beta1 = 0.9, beta2 = 0.99, beta3 = 0.99;
    double eps = 1e-8;
    bool use_adam = false;
    // cosine annealing, applied only to positions and plane logits
    long long schedule_total = 20000;
    double lr_floor = 1e-5;
};

// annealed learning rate at step t (0-based), continuous and
// non-increasing from base down to the floor at t >= total
double cosine_lr(double base, double floor, long long t, long long total);

struct OptimState {
    struct Moments {
        std::vector<double> m, v, n, prev_grad;
        void resize(size_t count);
        void remap_rows(const std::vector<int>& src_index, size_t stride);
    };
    Moments positions, rotations, log_scales, amplitudes, opacities, phases, plane_logits;
    long long step = 0;     // completed updates
    long long skipped = 0;  // steps rejected for non-finite gradients

    void resize_like(const GaussianScene& s);
    // carry moments across densification: src_index[j] is the old row for
    // new row j, or -1 for fresh rows whose moments start at zero
    void remap(const std::vector<int>& src_index, const GaussianScene& new_scene);
};

// one in-place update; returns false (and counts a skip) when any gradient
// entry is non-finite, leaving scene and moments untouched
bool optimizer_step(OptimState& st, GaussianScene& scene, const SceneGradients& grads,
                    const OptimizerConfig& cfg);

// single-group update over a flat parameter vector, `step` is the number
// of this update counted from 1; optimizer_step applies this to every
// scene group, and standalone loops (phase-only conversion) reuse it
void adaptive_moment_update(std::vector<double>& params, const std::vector<double>& grads,
                            OptimState::Moments& mom, double lr, long long step, const OptimizerConfig& cfg);

}  // namespace holo

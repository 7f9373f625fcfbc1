#include "holo/optimizer.hpp"

#include <cmath>

namespace holo {

double cosine_lr(double base, double floor, long long t, long long total) {
    if (total <= 0 || t >= total) return floor;
    const double phase = kPi * static_cast<double>(t) / static_cast<double>(total);
    return floor + 0.5 * (base - floor) * (1.0 + std::cos(phase));
}

void OptimState::Moments::resize(size_t count) {
    m.assign(count, 0.0);
    v.assign(count, 0.0);
    n.assign(count, 0.0);
    prev_grad.assign(count, 0.0);
}

void OptimState::Moments::remap_rows(const std::vector<int>& src_index, size_t stride) {
    const size_t rows = src_index.size();
    std::vector<double> nm(rows * stride, 0.0), nv(rows * stride, 0.0), nn(rows * stride, 0.0),
        ng(rows * stride, 0.0);
    for (size_t j = 0; j < rows; ++j) {
        const int src = src_index[j];
        if (src < 0) continue;
        for (size_t k = 0; k < stride; ++k) {
            nm[j * stride + k] = m[src * stride + k];
            nv[j * stride + k] = v[src * stride + k];
            nn[j * stride + k] = n[src * stride + k];
            ng[j * stride + k] = prev_grad[src * stride + k];
        }
    }
    m.swap(nm);
    v.swap(nv);
    n.swap(nn);
    prev_grad.swap(ng);
}

void OptimState::resize_like(const GaussianScene& s) {
    positions.resize(s.positions.size());
    rotations.resize(s.rotations.size());
    log_scales.resize(s.log_scales.size());
    amplitudes.resize(s.amplitudes.size());
    opacities.resize(s.opacity_logits.size());
    phases.resize(s.phases.size());
    plane_logits.resize(s.plane_logits.size());
}

void OptimState::remap(const std::vector<int>& src_index, const GaussianScene& new_scene) {
    positions.remap_rows(src_index, 3);
    rotations.remap_rows(src_index, 4);
    log_scales.remap_rows(src_index, 3);
    amplitudes.remap_rows(src_index, 3);
    opacities.remap_rows(src_index, 1);
    phases.remap_rows(src_index, 3);
    plane_logits.remap_rows(src_index, static_cast<size_t>(new_scene.num_planes));
}

namespace {

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void adaptive_moment_update(std::vector<double>& params, const std::vector<double>& grads,
                            OptimState::Moments& mom, double lr, long long step, const OptimizerConfig& cfg) {
    const double b1 = cfg.beta1, b2 = cfg.beta2, b3 = cfg.beta3;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step));
    const double bc3 = 1.0 - std::pow(b3, static_cast<double>(step));
    const bool first = step == 1;

    if (cfg.use_adam) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(params.size()); ++i) {
            const double g = grads[i];
            mom.m[i] = b1 * mom.m[i] + (1.0 - b1) * g;
            mom.n[i] = b2 * mom.n[i] + (1.0 - b2) * g * g;
            params[i] -= lr * (mom.m[i] / bc1) / (std::sqrt(mom.n[i] / bc2) + cfg.eps);
        }
        return;
    }

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(params.size()); ++i) {
        const double g = grads[i];
        const double diff = first ? 0.0 : g - mom.prev_grad[i];
        const double upd = g + b2 * diff;
        mom.m[i] = b1 * mom.m[i] + (1.0 - b1) * g;
        mom.v[i] = b2 * mom.v[i] + (1.0 - b2) * diff;
        mom.n[i] = b3 * mom.n[i] + (1.0 - b3) * upd * upd;
        mom.prev_grad[i] = g;
        const double num = mom.m[i] / bc1 + b2 * (mom.v[i] / bc2);
        params[i] -= lr * num / (std::sqrt(mom.n[i] / bc3) + cfg.eps);
    }
}

bool optimizer_step(OptimState& st, GaussianScene& scene, const SceneGradients& grads,
                    const OptimizerConfig& cfg) {
    if (grads.positions.size() != scene.positions.size() || grads.plane_logits.size() != scene.plane_logits.size())
        throw HoloError("config", "optimizer: gradient shapes do not match the scene");
    if (st.positions.m.size() != scene.positions.size())
        throw HoloError("config", "optimizer: moment buffers do not match the scene");

    if (!all_finite(grads.positions) || !all_finite(grads.rotations) || !all_finite(grads.log_scales) ||
        !all_finite(grads.amplitudes) || !all_finite(grads.opacity_logits) || !all_finite(grads.phases) ||
        !all_finite(grads.plane_logits)) {
        ++st.skipped;
        return false;
    }

    const long long t = st.step;  // 0-based schedule position
    ++st.step;

    const double lr_pos = cosine_lr(cfg.lr_positions, cfg.lr_floor, t, cfg.schedule_total);
    const double lr_rho = cosine_lr(cfg.lr_plane_logits, cfg.lr_floor, t, cfg.schedule_total);

    adaptive_moment_update(scene.positions, grads.positions, st.positions, lr_pos, st.step, cfg);
    adaptive_moment_update(scene.rotations, grads.rotations, st.rotations, cfg.lr_rotations, st.step, cfg);
    adaptive_moment_update(scene.log_scales, grads.log_scales, st.log_scales, cfg.lr_log_scales, st.step, cfg);
    adaptive_moment_update(scene.amplitudes, grads.amplitudes, st.amplitudes, cfg.lr_amplitudes, st.step, cfg);
    adaptive_moment_update(scene.opacity_logits, grads.opacity_logits, st.opacities, cfg.lr_opacities, st.step, cfg);
    adaptive_moment_update(scene.phases, grads.phases, st.phases, cfg.lr_phases, st.step, cfg);
    adaptive_moment_update(scene.plane_logits, grads.plane_logits, st.plane_logits, lr_rho, st.step, cfg);

    scene.renormalize();
    return true;
}

}  // namespace holo

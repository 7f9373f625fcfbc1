#pragma once

#include <random>

#include "holo/camera.hpp"
#include "holo/field.hpp"
#include "holo/fft.hpp"
#include "holo/rasterizer.hpp"
#include "holo/scene.hpp"
#include "holo/wave_config.hpp"

namespace holo::testing {

inline WaveConfig desk_config(int n = 128, int planes = 2) {
    WaveConfig cfg;
    cfg.nx = n;
    cfg.ny = n;
    cfg.pitch = 3.74e-6;
    cfg.wavelengths = {639e-9, 532e-9, 473e-9};
    cfg.distance = 2e-3;
    cfg.volume_depth = 4e-3;
    cfg.num_planes = planes;
    return cfg;
}

inline ComplexField random_field(const WaveConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexField f(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
    for (auto& v : f.data) v = c64(g(rng), g(rng));
    return f;
}

// random field with its spectrum restricted to the propagating band of
// every wavelength, so ASM round trips are exact
inline ComplexField random_bandlimited_field(const WaveConfig& cfg, std::uint64_t seed) {
    ComplexField f = random_field(cfg, seed);
    for (int ch = 0; ch < f.c; ++ch) {
        const double lambda = cfg.wavelengths[ch];
        const double inv_l2 = 1.0 / (lambda * lambda);
        c64* base = f.channel(ch);
        fft2(base, f.w, f.h);
        for (int y = 0; y < f.h; ++y) {
            const int ky = (y < (f.h + 1) / 2) ? y : y - f.h;
            const double fy = static_cast<double>(ky) / (f.h * cfg.pitch);
            for (int x = 0; x < f.w; ++x) {
                const int kx = (x < (f.w + 1) / 2) ? x : x - f.w;
                const double fx = static_cast<double>(kx) / (f.w * cfg.pitch);
                if (fx * fx + fy * fy > inv_l2) base[static_cast<size_t>(y) * f.w + x] = c64(0, 0);
            }
        }
        ifft2(base, f.w, f.h);
    }
    return f;
}

inline double max_abs_diff(const ComplexField& a, const ComplexField& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

// camera at the origin looking down +z, matching the hologram grid
inline CameraView front_camera(const WaveConfig& cfg, double focal = 150.0) {
    CameraView cam;
    cam.focal_px = focal;
    cam.width = cfg.nx;
    cam.height = cfg.ny;
    return cam;
}

// random scene in front of the camera: positions fill the view frustum at
// 0.25..0.45 m, footprints a few pixels wide, opacities away from the clamp
inline GaussianScene random_scene(size_t n, const WaveConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uxy(-0.05, 0.05);
    std::uniform_real_distribution<double> uz(0.25, 0.45);
    std::uniform_real_distribution<double> uscale(0.003, 0.012);
    std::uniform_real_distribution<double> uamp(0.2, 1.0);
    std::uniform_real_distribution<double> uop(-2.0, 2.0);
    std::uniform_real_distribution<double> uphase(0.0, kTwoPi);
    std::normal_distribution<double> g(0.0, 1.0);

    GaussianScene s;
    s.num_planes = cfg.num_planes;
    s.resize(n);
    for (size_t i = 0; i < n; ++i) {
        s.positions[i * 3] = uxy(rng);
        s.positions[i * 3 + 1] = uxy(rng);
        s.positions[i * 3 + 2] = uz(rng);
        double q[4] = {g(rng), g(rng), g(rng), g(rng)};
        const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        for (int k = 0; k < 4; ++k) s.rotations[i * 4 + k] = norm > 1e-9 ? q[k] / norm : (k == 0 ? 1.0 : 0.0);
        for (int d = 0; d < 3; ++d) s.log_scales[i * 3 + d] = std::log(uscale(rng));
        for (int d = 0; d < 3; ++d) s.amplitudes[i * 3 + d] = uamp(rng);
        s.opacity_logits[i] = uop(rng);
        for (int d = 0; d < 3; ++d) s.phases[i * 3 + d] = uphase(rng);
        for (int l = 0; l < s.num_planes; ++l) s.plane_logits[i * s.num_planes + l] = g(rng);
    }
    return s;
}

// rasterizer settings for finite-difference checks: no contribution floor,
// no early termination, and a wide footprint cutoff so the loss is smooth
inline RenderSettings gradcheck_settings() {
    RenderSettings st;
    st.alpha_floor = 0.0;
    st.term_eps = 0.0;
    st.radius_form_cap = 80.0;
    return st;
}

// mild pose: rotations stay well inside the narrow field of view of the
// small test canvases
inline CameraView mild_posed_camera(const WaveConfig& cfg) {
    CameraView cam = front_camera(cfg);
    cam.pose = {0.005, -0.003, -0.02, 0.01, -0.02, 0.015};
    return cam;
}

// random scene squeezed laterally so the footprints overlap on canvas and
// interfere; gaussians alternate their preferred plane
inline GaussianScene overlapping_scene(size_t n, const WaveConfig& cfg, std::uint64_t seed) {
    GaussianScene s = random_scene(n, cfg, seed);
    for (size_t i = 0; i < n; ++i) {
        s.positions[3 * i] *= 0.25;
        s.positions[3 * i + 1] *= 0.25;
        for (int l = 0; l < s.num_planes; ++l) s.plane_logits[i * s.num_planes + l] = 0.1 * l;
        s.plane_logits[i * s.num_planes + i % s.num_planes] = 2.0;
    }
    return s;
}

}  // namespace holo::testing

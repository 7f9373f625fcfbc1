#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"

using namespace holo;
namespace ht = holo::testing;

namespace {

// scalar probe: real inner product of the rendered layers against fixed
// random weights, so the upstream gradient is just the weight field
double raster_loss(const GaussianScene& s, const CameraView& cam, const WaveConfig& cfg,
                   const RenderSettings& st, const std::vector<ComplexField>& weights) {
    RasterForward fwd = raster_forward(s, cam, cfg, st);
    double acc = 0.0;
    for (size_t l = 0; l < weights.size(); ++l) acc += dot_real(fwd.layers[l], weights[l]);
    return acc;
}

bool grad_close(double analytic, double fd, double rel = 1e-4, double floor = 1e-8) {
    const double denom = std::max(std::abs(analytic), std::abs(fd));
    return std::abs(analytic - fd) <= rel * denom + floor;
}

// central difference of the raster loss wrt one entry of one scene array
double fd_loss(GaussianScene s, std::vector<double> GaussianScene::* field, size_t idx, double h,
               const CameraView& cam, const WaveConfig& cfg, const RenderSettings& st,
               const std::vector<ComplexField>& weights) {
    (s.*field)[idx] += h;
    const double up = raster_loss(s, cam, cfg, st, weights);
    (s.*field)[idx] -= 2.0 * h;
    const double down = raster_loss(s, cam, cfg, st, weights);
    return (up - down) / (2.0 * h);
}

struct FdCase {
    const char* name;
    std::vector<double> GaussianScene::* field;
    std::vector<double> SceneGradients::* grad;
    size_t per_gaussian;
};

}  // namespace

TEST_CASE("covariance gradients match finite differences") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        double quat[4] = {g(rng), g(rng), g(rng), g(rng)};  // deliberately not unit
        double logs[3] = {0.3 * g(rng), 0.3 * g(rng), 0.3 * g(rng)};
        Eigen::Matrix3d G;
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) G(r, c) = G(c, r) = g(rng);

        double gq[4], gl[3];
        detail::covariance_backward(quat, logs, G, gq, gl);

        auto loss = [&](const double* q, const double* l) {
            return (G.array() * covariance_3d(q, l).array()).sum();
        };
        const double h = 1e-6;
        for (int k = 0; k < 4; ++k) {
            double qp[4] = {quat[0], quat[1], quat[2], quat[3]};
            qp[k] += h;
            double qm[4] = {quat[0], quat[1], quat[2], quat[3]};
            qm[k] -= h;
            const double fd = (loss(qp, logs) - loss(qm, logs)) / (2.0 * h);
            CHECK(grad_close(gq[k], fd, 1e-6, 1e-10));
        }
        for (int k = 0; k < 3; ++k) {
            double lp[3] = {logs[0], logs[1], logs[2]};
            lp[k] += h;
            double lm[3] = {logs[0], logs[1], logs[2]};
            lm[k] -= h;
            const double fd = (loss(quat, lp) - loss(quat, lm)) / (2.0 * h);
            CHECK(grad_close(gl[k], fd, 1e-6, 1e-10));
        }
    }
}

TEST_CASE("unit quaternion gradients stay tangent to the sphere") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        double quat[4] = {g(rng), g(rng), g(rng), g(rng)};
        const double n = std::sqrt(quat[0] * quat[0] + quat[1] * quat[1] + quat[2] * quat[2] + quat[3] * quat[3]);
        for (double& q : quat) q /= n;
        double logs[3] = {0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng)};
        Eigen::Matrix3d G;
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) G(r, c) = G(c, r) = g(rng);
        double gq[4], gl[3];
        detail::covariance_backward(quat, logs, G, gq, gl);
        const double radial = quat[0] * gq[0] + quat[1] * gq[1] + quat[2] * gq[2] + quat[3] * gq[3];
        CHECK(std::abs(radial) < 1e-12);
    }
}

TEST_CASE("rasterizer gradients match finite differences") {
    WaveConfig cfg = ht::desk_config(32, 2);
    CameraView cam = ht::front_camera(cfg);
    // rotated, shifted camera so the world-to-camera chain is exercised
    cam.pose = {0.02, -0.01, -0.05, 0.1, -0.2, 0.15};

    GaussianScene s = ht::random_scene(4, cfg, 51);
    RenderSettings st = ht::gradcheck_settings();

    std::vector<ComplexField> weights;
    for (int l = 0; l < cfg.num_planes; ++l) weights.push_back(ht::random_field(cfg, 900 + l));

    RasterForward fwd = raster_forward(s, cam, cfg, st);
    SceneGradients grads = raster_backward(s, cam, cfg, st, fwd, weights);

    const FdCase cases[] = {
        {"positions", &GaussianScene::positions, &SceneGradients::positions, 3},
        {"rotations", &GaussianScene::rotations, &SceneGradients::rotations, 4},
        {"log_scales", &GaussianScene::log_scales, &SceneGradients::log_scales, 3},
        {"amplitudes", &GaussianScene::amplitudes, &SceneGradients::amplitudes, 3},
        {"phases", &GaussianScene::phases, &SceneGradients::phases, 3},
        {"opacity_logits", &GaussianScene::opacity_logits, &SceneGradients::opacity_logits, 1},
    };
    const double h = 1e-5;
    for (const FdCase& c : cases) {
        CAPTURE(c.name);
        for (size_t i = 0; i < s.size() * c.per_gaussian; ++i) {
            const double fd = fd_loss(s, c.field, i, h, cam, cfg, st, weights);
            const double an = (grads.*c.grad)[i];
            CAPTURE(i);
            CAPTURE(an);
            CAPTURE(fd);
            CHECK(grad_close(an, fd));
        }
    }
}

TEST_CASE("plane logit gradients match finite differences in the relaxed mode") {
    WaveConfig cfg = ht::desk_config(32, 3);
    CameraView cam = ht::front_camera(cfg);
    GaussianScene s = ht::random_scene(3, cfg, 77);
    RenderSettings st = ht::gradcheck_settings();
    st.soft_assignment = true;
    st.soft_tau = 1.0;

    std::vector<ComplexField> weights;
    for (int l = 0; l < cfg.num_planes; ++l) weights.push_back(ht::random_field(cfg, 700 + l));

    RasterForward fwd = raster_forward(s, cam, cfg, st);
    SceneGradients grads = raster_backward(s, cam, cfg, st, fwd, weights);

    const double h = 1e-5;
    for (size_t i = 0; i < s.plane_logits.size(); ++i) {
        const double fd = fd_loss(s, &GaussianScene::plane_logits, i, h, cam, cfg, st, weights);
        CAPTURE(i);
        CHECK(grad_close(grads.plane_logits[i], fd));
    }
}

TEST_CASE("hard assignment still reports straight-through logit gradients") {
    WaveConfig cfg = ht::desk_config(32, 2);
    CameraView cam = ht::front_camera(cfg);
    GaussianScene s = ht::random_scene(2, cfg, 5);
    // close logits: the straight-through softmax spreads real weight
    s.plane_logits = {0.01, 0.0, 0.0, 0.02};
    RenderSettings st = ht::gradcheck_settings();
    st.ste_tau = 0.5;  // mild temperature so both entries get weight

    std::vector<ComplexField> weights;
    for (int l = 0; l < cfg.num_planes; ++l) weights.push_back(ht::random_field(cfg, 80 + l));

    RasterForward fwd = raster_forward(s, cam, cfg, st);
    SceneGradients grads = raster_backward(s, cam, cfg, st, fwd, weights);

    // only the assigned plane composites, so only its logit carries signal
    SteAssign a0 = ste_assign(&s.plane_logits[0], 2, st.ste_tau);
    CHECK(a0.index == 0);
    CHECK(grads.plane_logits[0] != 0.0);
    CHECK(grads.plane_logits[1] == 0.0);
    CHECK(ste_assign(&s.plane_logits[2], 2, st.ste_tau).index == 1);
    CHECK(grads.plane_logits[2] == 0.0);
    CHECK(grads.plane_logits[3] != 0.0);

    // the surrogate multiplies the accumulated weight gradient by the
    // straight-through softmax; rerunning with a colder temperature rescales
    // the logit gradient by exactly the weight ratio
    RenderSettings cold = st;
    cold.ste_tau = 1e-2;
    SceneGradients gcold = raster_backward(s, cam, cfg, cold, fwd, weights);
    const double want = a0.backward_weights[0] / ste_assign(&s.plane_logits[0], 2, 1e-2).backward_weights[0];
    CHECK(grads.plane_logits[0] / gcold.plane_logits[0] == doctest::Approx(want).epsilon(1e-9));
}

TEST_CASE("culled gaussians receive zero geometry gradients") {
    WaveConfig cfg = ht::desk_config(32, 2);
    CameraView cam = ht::front_camera(cfg);
    GaussianScene s = ht::random_scene(2, cfg, 13);
    s.positions[2] = -0.4;  // behind the camera

    RenderSettings st;
    std::vector<ComplexField> weights;
    for (int l = 0; l < cfg.num_planes; ++l) weights.push_back(ht::random_field(cfg, 60 + l));

    RasterForward fwd = raster_forward(s, cam, cfg, st);
    SceneGradients grads = raster_backward(s, cam, cfg, st, fwd, weights);

    for (int d = 0; d < 3; ++d) CHECK(grads.positions[d] == 0.0);
    for (int d = 0; d < 4; ++d) CHECK(grads.rotations[d] == 0.0);
    CHECK(grads.opacity_logits[0] == 0.0);
    CHECK(grads.mu_screen[0] == 0.0);
    CHECK(grads.mu_screen[1] == 0.0);
    // the visible one still gets signal
    double mag = 0.0;
    for (int d = 0; d < 3; ++d) mag += std::abs(grads.positions[3 + d]);
    CHECK(mag > 0.0);
}

TEST_CASE("backward validates the upstream gradient count") {
    WaveConfig cfg = ht::desk_config(32, 2);
    CameraView cam = ht::front_camera(cfg);
    GaussianScene s = ht::random_scene(2, cfg, 1);
    RasterForward fwd = raster_forward(s, cam, cfg, RenderSettings{});
    std::vector<ComplexField> wrong = {ht::random_field(cfg, 1)};
    CHECK_THROWS_AS(raster_backward(s, cam, cfg, RenderSettings{}, fwd, wrong), HoloError);
}

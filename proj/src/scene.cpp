#include "holo/scene.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

void GaussianScene::resize(size_t n) {
    positions.assign(n * 3, 0.0);
    rotations.assign(n * 4, 0.0);
    for (size_t i = 0; i < n; ++i) rotations[i * 4] = 1.0;  // identity
    log_scales.assign(n * 3, 0.0);
    amplitudes.assign(n * 3, 0.0);
    opacity_logits.assign(n, 0.0);
    phases.assign(n * 3, 0.0);
    plane_logits.assign(n * static_cast<size_t>(num_planes), 0.0);
}

void GaussianScene::validate() const {
    const size_t n = size();
    if (num_planes < 1) throw HoloError("config", "scene needs at least one plane");
    if (positions.size() != n * 3 || rotations.size() != n * 4 || log_scales.size() != n * 3 ||
        amplitudes.size() != n * 3 || phases.size() != n * 3 || plane_logits.size() != n * static_cast<size_t>(num_planes))
        throw HoloError("config", "scene arrays have inconsistent sizes");
    for (size_t i = 0; i < n; ++i) {
        const double* q = &rotations[i * 4];
        const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (!(norm > 1e-8)) throw HoloError("config", "degenerate quaternion in scene");
    }
    for (double a : amplitudes)
        if (a < 0.0) throw HoloError("config", "amplitudes must be non-negative");
}

void GaussianScene::renormalize() {
    const size_t n = size();
    for (size_t i = 0; i < n; ++i) {
        double* q = &rotations[i * 4];
        const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (norm > 1e-12) {
            for (int k = 0; k < 4; ++k) q[k] /= norm;
        } else {
            q[0] = 1.0;
            q[1] = q[2] = q[3] = 0.0;
        }
    }
    for (double& a : amplitudes) a = std::max(a, 0.0);
}

void SceneGradients::resize_like(const GaussianScene& s) {
    positions.assign(s.positions.size(), 0.0);
    rotations.assign(s.rotations.size(), 0.0);
    log_scales.assign(s.log_scales.size(), 0.0);
    amplitudes.assign(s.amplitudes.size(), 0.0);
    opacity_logits.assign(s.opacity_logits.size(), 0.0);
    phases.assign(s.phases.size(), 0.0);
    plane_logits.assign(s.plane_logits.size(), 0.0);
    mu_screen.assign(s.size() * 2, 0.0);
}

void SceneGradients::clear() {
    auto zero = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
    zero(positions);
    zero(rotations);
    zero(log_scales);
    zero(amplitudes);
    zero(opacity_logits);
    zero(phases);
    zero(plane_logits);
    zero(mu_screen);
}

namespace detail {

Eigen::Matrix3d quat_to_rot(const double* q) {
    const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
    const double w = q[0] / norm, x = q[1] / norm, y = q[2] / norm, z = q[3] / norm;
    Eigen::Matrix3d r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

void covariance_backward(const double* quat, const double* log_scales, const Eigen::Matrix3d& dL_dSigma,
                         double* dL_dquat, double* dL_dlogs) {
    const double norm = std::sqrt(quat[0] * quat[0] + quat[1] * quat[1] + quat[2] * quat[2] + quat[3] * quat[3]);
    const double w = quat[0] / norm, x = quat[1] / norm, y = quat[2] / norm, z = quat[3] / norm;
    const Eigen::Matrix3d R = quat_to_rot(quat);
    const Eigen::Vector3d s(std::exp(log_scales[0]), std::exp(log_scales[1]), std::exp(log_scales[2]));

    // Sigma = M M^T with M = R diag(s)
    Eigen::Matrix3d M = R;
    for (int k = 0; k < 3; ++k) M.col(k) *= s[k];
    const Eigen::Matrix3d dM = (dL_dSigma + dL_dSigma.transpose()) * M;

    for (int k = 0; k < 3; ++k) {
        const double ds = dM.col(k).dot(R.col(k));
        dL_dlogs[k] = ds * s[k];  // chain through exp
    }

    Eigen::Matrix3d dR;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) dR(i, k) = dM(i, k) * s[k];

    // derivative of the rotation entries wrt the normalized quaternion
    Eigen::Matrix3d dw, dx, dy, dz;
    dw << 0, -z, y, z, 0, -x, -y, x, 0;
    dx << 0, y, z, y, -2 * x, -w, z, w, -2 * x;
    dy << -2 * y, x, w, x, 0, z, -w, z, -2 * y;
    dz << -2 * z, -w, x, w, -2 * z, y, x, y, 0;
    Eigen::Vector4d g_unit;
    g_unit[0] = 2.0 * (dR.array() * dw.array()).sum();
    g_unit[1] = 2.0 * (dR.array() * dx.array()).sum();
    g_unit[2] = 2.0 * (dR.array() * dy.array()).sum();
    g_unit[3] = 2.0 * (dR.array() * dz.array()).sum();

    // through the normalization q_n = q / |q|
    const Eigen::Vector4d qn(w, x, y, z);
    const Eigen::Vector4d g = (g_unit - qn * qn.dot(g_unit)) / norm;
    for (int k = 0; k < 4; ++k) dL_dquat[k] = g[k];
}

}  // namespace detail

Eigen::Matrix3d covariance_3d(const double* quat, const double* log_scales) {
    const Eigen::Matrix3d R = detail::quat_to_rot(quat);
    Eigen::Matrix3d M = R;
    for (int k = 0; k < 3; ++k) M.col(k) *= std::exp(log_scales[k]);
    return M * M.transpose();
}

SteAssign ste_assign(const double* logits, int L, double tau) {
    if (L < 1) throw HoloError("config", "ste_assign needs at least one plane");
    if (tau <= 0.0) throw HoloError("config", "ste temperature must be positive");
    SteAssign out;
    out.onehot.assign(L, 0.0);
    out.backward_weights.assign(L, 0.0);
    int best = 0;
    for (int l = 1; l < L; ++l)
        if (logits[l] > logits[best]) best = l;  // ties keep the lowest index
    out.index = best;
    out.onehot[best] = 1.0;
    // softmax(logits / tau), shifted for stability
    double denom = 0.0;
    const double top = logits[best];
    for (int l = 0; l < L; ++l) {
        out.backward_weights[l] = std::exp((logits[l] - top) / tau);
        denom += out.backward_weights[l];
    }
    for (int l = 0; l < L; ++l) out.backward_weights[l] /= denom;
    return out;
}

GaussianScene init_scene(const std::vector<SeedPoint>& seeds, const WaveConfig& cfg, std::uint64_t seed,
                         const InitParams& params) {
    cfg.validate();
    if (seeds.empty()) throw HoloError("config", "init_scene needs at least one seed point");
    const size_t n = seeds.size();

    GaussianScene s;
    s.num_planes = cfg.num_planes;
    s.resize(n);

    // isotropic scale from the mean distance to the k nearest neighbors
    const double fallback = params.scale_fallback_frac * cfg.volume_depth;
    std::vector<double> mean_dist(n, 0.0);
    if (n > 1) {
        const int k = std::min<int>(params.knn, static_cast<int>(n) - 1);
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            std::vector<double> d2;
            d2.reserve(n - 1);
            for (size_t j = 0; j < n; ++j) {
                if (j == static_cast<size_t>(i)) continue;
                d2.push_back((seeds[i].pos - seeds[j].pos).squaredNorm());
            }
            std::partial_sort(d2.begin(), d2.begin() + k, d2.end());
            double acc = 0.0;
            for (int m = 0; m < k; ++m) acc += std::sqrt(d2[m]);
            mean_dist[i] = acc / k;
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uphase(0.0, kTwoPi);
    const double op_logit = logit(params.opacity);

    for (size_t i = 0; i < n; ++i) {
        for (int d = 0; d < 3; ++d) s.positions[i * 3 + d] = seeds[i].pos[d];
        // identity rotation already set by resize()
        double sc = (n > 1) ? mean_dist[i] : fallback;
        if (!(sc > 0.0)) sc = fallback;
        if (!(sc > 0.0)) throw HoloError("config", "cannot derive an initial scale (zero volume depth?)");
        for (int d = 0; d < 3; ++d) s.log_scales[i * 3 + d] = std::log(sc);
        for (int d = 0; d < 3; ++d)
            s.amplitudes[i * 3 + d] = seeds[i].color ? (*seeds[i].color)[d] : params.amplitude;
        s.opacity_logits[i] = op_logit;
        for (int d = 0; d < 3; ++d) s.phases[i * 3 + d] = uphase(rng);
        // plane logits stay zero: uniform preference, argmax picks plane 0
    }
    s.validate();
    return s;
}

double scene_extent(const GaussianScene& s) {
    const size_t n = s.size();
    if (n == 0) return 0.0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < n; ++i) c += Eigen::Vector3d(&s.positions[i * 3]);
    c /= static_cast<double>(n);
    double m = 0.0;
    for (size_t i = 0; i < n; ++i) m = std::max(m, (Eigen::Vector3d(&s.positions[i * 3]) - c).norm());
    return m;
}

void DensifyStats::resize(size_t n) {
    grad_norm_sum.assign(n, 0.0);
    visible_count.assign(n, 0);
}

void DensifyStats::clear() {
    std::fill(grad_norm_sum.begin(), grad_norm_sum.end(), 0.0);
    std::fill(visible_count.begin(), visible_count.end(), 0);
}

namespace {

void copy_row(const GaussianScene& src, size_t i, GaussianScene& dst) {
    for (int d = 0; d < 3; ++d) dst.positions.push_back(src.positions[i * 3 + d]);
    for (int d = 0; d < 4; ++d) dst.rotations.push_back(src.rotations[i * 4 + d]);
    for (int d = 0; d < 3; ++d) dst.log_scales.push_back(src.log_scales[i * 3 + d]);
    for (int d = 0; d < 3; ++d) dst.amplitudes.push_back(src.amplitudes[i * 3 + d]);
    dst.opacity_logits.push_back(src.opacity_logits[i]);
    for (int d = 0; d < 3; ++d) dst.phases.push_back(src.phases[i * 3 + d]);
    for (int l = 0; l < src.num_planes; ++l)
        dst.plane_logits.push_back(src.plane_logits[i * src.num_planes + l]);
}

void perturb_child(GaussianScene& dst, const DensifyParams& p, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, p.perturb_sigma);
    const size_t i = dst.opacity_logits.size() - 1;
    for (int d = 0; d < 3; ++d) dst.phases[i * 3 + d] = wrap_phase(dst.phases[i * 3 + d] + g(rng));
    for (int l = 0; l < dst.num_planes; ++l) dst.plane_logits[i * dst.num_planes + l] += g(rng);
}

}  // namespace

DensifyResult densify_and_prune(GaussianScene& scene, const DensifyStats& stats, const DensifyParams& params,
                                std::mt19937_64& rng) {
    const size_t n = scene.size();
    if (stats.grad_norm_sum.size() != n || stats.visible_count.size() != n)
        throw HoloError("config", "densify stats do not match the scene");

    const double extent = std::max(scene_extent(scene), 1e-12);
    const double split_above = params.scale_threshold_frac * extent;
    const double prune_above = params.prune_scale_frac * extent;

    GaussianScene out;
    out.num_planes = scene.num_planes;
    DensifyResult res;

    for (size_t i = 0; i < n; ++i) {
        const double op = sigmoid(scene.opacity_logits[i]);
        const double max_scale = std::exp(std::max({scene.log_scales[i * 3], scene.log_scales[i * 3 + 1],
                                                    scene.log_scales[i * 3 + 2]}));
        if (op < params.prune_opacity || max_scale > prune_above) {
            ++res.pruned;
            continue;
        }
        const double mean_grad =
            stats.visible_count[i] > 0 ? stats.grad_norm_sum[i] / stats.visible_count[i] : 0.0;
        if (mean_grad > params.grad_threshold) {
            if (max_scale > split_above) {
                // split: two children drawn from the parent's density, tighter scales
                ++res.split;
                const Eigen::Matrix3d R = detail::quat_to_rot(&scene.rotations[i * 4]);
                const Eigen::Vector3d s(std::exp(scene.log_scales[i * 3]), std::exp(scene.log_scales[i * 3 + 1]),
                                        std::exp(scene.log_scales[i * 3 + 2]));
                std::normal_distribution<double> g(0.0, 1.0);
                for (int child = 0; child < 2; ++child) {
                    copy_row(scene, i, out);
                    const size_t j = out.opacity_logits.size() - 1;
                    const Eigen::Vector3d xi(g(rng), g(rng), g(rng));
                    const Eigen::Vector3d off = R * (s.cwiseProduct(xi));
                    for (int d = 0; d < 3; ++d) out.positions[j * 3 + d] = scene.positions[i * 3 + d] + off[d];
                    for (int d = 0; d < 3; ++d)
                        out.log_scales[j * 3 + d] = scene.log_scales[i * 3 + d] - std::log(params.split_shrink);
                    perturb_child(out, params, rng);
                    res.src_index.push_back(-1);
                }
                continue;
            }
            // clone: keep the original and add a perturbed copy
            ++res.cloned;
            copy_row(scene, i, out);
            res.src_index.push_back(static_cast<int>(i));
            copy_row(scene, i, out);
            perturb_child(out, params, rng);
            res.src_index.push_back(-1);
            continue;
        }
        copy_row(scene, i, out);
        res.src_index.push_back(static_cast<int>(i));
    }

    scene = std::move(out);
    return res;
}

}  // namespace holo

#include "holo/rasterizer.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace detail {

Projected project_gaussian(const GaussianScene& scene, size_t n, const CameraView& cam,
                           const Eigen::Matrix3d& world_to_cam, const WaveConfig& cfg,
                           const RenderSettings& settings) {
    Projected p;
    p.n = static_cast<int>(n);

    const Eigen::Vector3d xw(&scene.positions[n * 3]);
    const Eigen::Vector3d xc = world_to_cam * (xw - cam.position());
    if (!(xc.z() > settings.effective_near(cfg))) return p;  // behind the near clip

    p.xc = xc.x();
    p.yc = xc.y();
    p.zc = xc.z();

    const double f = cam.focal_px;
    const double iz = 1.0 / xc.z();
    p.mu_x = f * xc.x() * iz + cam.principal_x();
    p.mu_y = f * xc.y() * iz + cam.principal_y();

    // local affine approximation of the projection at the center
    Eigen::Matrix<double, 2, 3> J = Eigen::Matrix<double, 2, 3>::Zero();
    J(0, 0) = f * iz;
    J(1, 1) = f * iz;
    J(0, 2) = -f * xc.x() * iz * iz;
    J(1, 2) = -f * xc.y() * iz * iz;

    const Eigen::Matrix3d sigma = covariance_3d(&scene.rotations[n * 4], &scene.log_scales[n * 3]);
    const Eigen::Matrix<double, 2, 3> M = J * world_to_cam;
    Eigen::Matrix2d cov2 = M * sigma * M.transpose();
    cov2(0, 0) += settings.dilation;
    cov2(1, 1) += settings.dilation;

    const double det = cov2(0, 0) * cov2(1, 1) - cov2(0, 1) * cov2(0, 1);
    if (!(det > 0.0) || !std::isfinite(det)) return p;  // cannot happen for finite inputs, belt and braces
    const double idet = 1.0 / det;
    p.inv00 = cov2(1, 1) * idet;
    p.inv01 = -cov2(0, 1) * idet;
    p.inv11 = cov2(0, 0) * idet;

    p.alpha_sig = sigmoid(scene.opacity_logits[n]);
    if (settings.alpha_floor > 0.0 && !(p.alpha_sig > settings.alpha_floor)) return p;  // can never contribute

    // support radius: covers at least 3 sigma, widened until every pixel
    // beyond it falls under the contribution floor
    double form_cap = settings.radius_form_cap;
    if (form_cap <= 0.0) {
        form_cap = 9.0;
        if (settings.alpha_floor > 0.0)
            form_cap = std::max(form_cap, 2.0 * std::log(p.alpha_sig / settings.alpha_floor));
    }
    const double mid = 0.5 * (cov2(0, 0) + cov2(1, 1));
    const double lambda_max = mid + std::sqrt(std::max(0.0, mid * mid - det));
    p.radius = std::sqrt(form_cap * lambda_max);

    for (int ch = 0; ch < 3; ++ch) {
        p.amp[ch] = scene.amplitudes[n * 3 + ch];
        p.phase[ch] = scene.phases[n * 3 + ch];
    }
    p.valid = true;
    return p;
}

}  // namespace detail

namespace {

using detail::Entry;
using detail::Projected;

// plane weights actually used by the kernels: hard one-hot (production)
// or the relaxed softmax (gradient checks)
std::vector<double> compute_rho(const GaussianScene& scene, const RenderSettings& settings,
                                std::vector<detail::Projected>& projected) {
    const size_t n = scene.size();
    const int L = scene.num_planes;
    std::vector<double> rho(n * static_cast<size_t>(L), 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        if (settings.soft_assignment) {
            SteAssign a = ste_assign(&scene.plane_logits[i * L], L, settings.soft_tau);
            for (int l = 0; l < L; ++l) rho[i * L + l] = a.backward_weights[l];
            projected[i].plane = a.index;
        } else {
            SteAssign a = ste_assign(&scene.plane_logits[i * L], L, settings.ste_tau);
            rho[i * L + a.index] = 1.0;
            projected[i].plane = a.index;
        }
    }
    return rho;
}

struct TileSpan {
    int x0, x1, y0, y1;  // half open tile ranges
    bool empty() const { return x0 >= x1 || y0 >= y1; }
};

TileSpan tile_span(const Projected& p, int tile, int tiles_x, int tiles_y) {
    TileSpan s;
    s.x0 = std::max(0, static_cast<int>(std::floor((p.mu_x - p.radius) / tile)));
    s.x1 = std::min(tiles_x, static_cast<int>(std::floor((p.mu_x + p.radius) / tile)) + 1);
    s.y0 = std::max(0, static_cast<int>(std::floor((p.mu_y - p.radius) / tile)));
    s.y1 = std::min(tiles_y, static_cast<int>(std::floor((p.mu_y + p.radius) / tile)) + 1);
    return s;
}

// per-pixel response of one projected Gaussian; shared by the tiled pass,
// the brute-force oracle and the backward replay
struct Response {
    double g;          // exp(-form/2)
    double alpha_eff;  // alpha_sig * g * rho, clamped
    double dx, dy;
    bool accept;
};

inline Response evaluate(const Projected& p, double rho, double px, double py, const RenderSettings& st) {
    Response r;
    r.dx = px - p.mu_x;
    r.dy = py - p.mu_y;
    const double form = p.inv00 * r.dx * r.dx + 2.0 * p.inv01 * r.dx * r.dy + p.inv11 * r.dy * r.dy;
    r.g = std::exp(-0.5 * form);
    double a = p.alpha_sig * r.g * rho;
    if (a > st.alpha_clamp) a = st.alpha_clamp;
    r.alpha_eff = a;
    r.accept = (a > st.alpha_floor) || (st.alpha_floor <= 0.0 && a > 0.0);
    return r;
}

}  // namespace

RasterForward raster_forward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                             const RenderSettings& settings) {
    scene.validate();
    cam.validate();
    cfg.validate();
    if (scene.num_planes != cfg.num_planes)
        throw HoloError("config", "scene plane count does not match the wave config");
    if (cam.width != cfg.nx || cam.height != cfg.ny)
        throw HoloError("config", "camera resolution must match the hologram grid");

    const int L = cfg.num_planes;
    const int W = cfg.nx, H = cfg.ny;
    const int tile = settings.tile;
    const size_t N = scene.size();

    RasterForward out;
    out.tiles_x = (W + tile - 1) / tile;
    out.tiles_y = (H + tile - 1) / tile;
    const int num_tiles = out.tiles_x * out.tiles_y;

    out.layers.assign(L, ComplexField(W, H, GaussianScene::kChannels, cfg.pitch));
    out.t_final.assign(static_cast<size_t>(L) * H * W, 1.0);
    out.n_contrib.assign(static_cast<size_t>(L) * H * W, 0);
    out.projected.resize(N);
    out.touched.assign(N, 0);

    const Eigen::Matrix3d world_to_cam = cam.rot_world_to_cam();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(N); ++i)
        out.projected[i] = detail::project_gaussian(scene, i, cam, world_to_cam, cfg, settings);

    out.rho = compute_rho(scene, settings, out.projected);

    // emit (bucket, gaussian) work items: one per overlapped tile and per
    // plane whose weight passes the gate
    std::vector<std::uint32_t> emit_count(N + 1, 0);
    const double gate = settings.soft_assignment ? 0.0 : settings.plane_eps;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(N); ++i) {
        const Projected& p = out.projected[i];
        if (!p.valid) continue;
        const TileSpan s = tile_span(p, tile, out.tiles_x, out.tiles_y);
        if (s.empty()) continue;
        std::uint32_t planes = 0;
        for (int l = 0; l < L; ++l)
            if (out.rho[i * L + l] > gate) ++planes;
        emit_count[i + 1] = planes * static_cast<std::uint32_t>((s.x1 - s.x0) * (s.y1 - s.y0));
    }
    for (size_t i = 0; i < N; ++i) emit_count[i + 1] += emit_count[i];

    out.entries.resize(emit_count[N]);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(N); ++i) {
        std::uint32_t at = emit_count[i];
        if (emit_count[i + 1] == at) continue;
        const Projected& p = out.projected[i];
        const TileSpan s = tile_span(p, tile, out.tiles_x, out.tiles_y);
        out.touched[i] = 1;
        for (int l = 0; l < L; ++l) {
            if (!(out.rho[i * L + l] > gate)) continue;
            for (int ty = s.y0; ty < s.y1; ++ty)
                for (int tx = s.x0; tx < s.x1; ++tx)
                    out.entries[at++] = Entry{l * num_tiles + ty * out.tiles_x + tx, static_cast<std::int32_t>(i),
                                              p.zc};
        }
    }

    // counting sort by bucket, then depth order within each bucket
    const int num_buckets = L * num_tiles;
    out.bucket_start.assign(num_buckets + 1, 0);
    for (const Entry& e : out.entries) ++out.bucket_start[e.bucket + 1];
    for (int b = 0; b < num_buckets; ++b) out.bucket_start[b + 1] += out.bucket_start[b];
    {
        std::vector<std::uint32_t> cursor(out.bucket_start.begin(), out.bucket_start.end() - 1);
        std::vector<Entry> sorted(out.entries.size());
        for (const Entry& e : out.entries) sorted[cursor[e.bucket]++] = e;
        out.entries.swap(sorted);
    }
#pragma omp parallel for schedule(dynamic, 8)
    for (int b = 0; b < num_buckets; ++b) {
        auto first = out.entries.begin() + out.bucket_start[b];
        auto last = out.entries.begin() + out.bucket_start[b + 1];
        std::sort(first, last, [](const Entry& a, const Entry& c) {
            if (a.depth != c.depth) return a.depth < c.depth;
            return a.gidx < c.gidx;
        });
    }

    // composite front to back, per plane, per tile
#pragma omp parallel for schedule(dynamic, 4)
    for (int b = 0; b < num_buckets; ++b) {
        const std::uint32_t e0 = out.bucket_start[b], e1 = out.bucket_start[b + 1];
        if (e0 == e1) continue;
        const int plane = b / num_tiles;
        const int t = b % num_tiles;
        const int px0 = (t % out.tiles_x) * tile, py0 = (t / out.tiles_x) * tile;
        const int px1 = std::min(px0 + tile, W), py1 = std::min(py0 + tile, H);
        ComplexField& canvas = out.layers[plane];
        for (int py = py0; py < py1; ++py) {
            for (int px = px0; px < px1; ++px) {
                const double sx = px + 0.5, sy = py + 0.5;
                double T = 1.0;
                std::int32_t contrib = 0;
                c64 acc[3] = {};
                for (std::uint32_t e = e0; e < e1; ++e) {
                    if (T < settings.term_eps) break;  // early termination: the dropped
                                                       // tail is bounded by T * max|c|
                    const Projected& p = out.projected[out.entries[e].gidx];
                    const Response r = evaluate(p, out.rho[static_cast<size_t>(p.n) * L + plane], sx, sy, settings);
                    if (!r.accept) continue;
                    const double w = r.alpha_eff * T;
                    for (int ch = 0; ch < 3; ++ch)
                        acc[ch] += c64(p.amp[ch] * w * std::cos(p.phase[ch]), p.amp[ch] * w * std::sin(p.phase[ch]));
                    T *= 1.0 - r.alpha_eff;
                    ++contrib;
                }
                const size_t ai = (static_cast<size_t>(plane) * H + py) * W + px;
                out.t_final[ai] = T;
                out.n_contrib[ai] = contrib;
                for (int ch = 0; ch < 3; ++ch) canvas.at(ch, py, px) = acc[ch];
            }
        }
    }
    return out;
}

std::vector<ComplexField> brute_force_forward(const GaussianScene& scene, const CameraView& cam,
                                              const WaveConfig& cfg, const RenderSettings& settings) {
    scene.validate();
    cam.validate();
    cfg.validate();
    const int L = cfg.num_planes;
    const int W = cfg.nx, H = cfg.ny;
    const size_t N = scene.size();

    const Eigen::Matrix3d world_to_cam = cam.rot_world_to_cam();
    std::vector<Projected> projected(N);
    for (size_t i = 0; i < N; ++i)
        projected[i] = detail::project_gaussian(scene, i, cam, world_to_cam, cfg, settings);
    std::vector<double> rho = compute_rho(scene, settings, projected);

    // global front-to-back order over every valid Gaussian
    std::vector<int> order;
    for (size_t i = 0; i < N; ++i)
        if (projected[i].valid) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (projected[a].zc != projected[b].zc) return projected[a].zc < projected[b].zc;
        return a < b;
    });

    std::vector<ComplexField> layers(L, ComplexField(W, H, GaussianScene::kChannels, cfg.pitch));
    const double gate = settings.soft_assignment ? 0.0 : settings.plane_eps;
    for (int plane = 0; plane < L; ++plane) {
        ComplexField& canvas = layers[plane];
#pragma omp parallel for schedule(static)
        for (int py = 0; py < H; ++py) {
            for (int px = 0; px < W; ++px) {
                const double sx = px + 0.5, sy = py + 0.5;
                double T = 1.0;
                c64 acc[3] = {};
                for (int gi : order) {
                    const Projected& p = projected[gi];
                    const double rv = rho[static_cast<size_t>(p.n) * L + plane];
                    if (!(rv > gate)) continue;
                    const Response r = evaluate(p, rv, sx, sy, settings);
                    if (!r.accept) continue;
                    const double w = r.alpha_eff * T;
                    for (int ch = 0; ch < 3; ++ch)
                        acc[ch] += c64(p.amp[ch] * w * std::cos(p.phase[ch]), p.amp[ch] * w * std::sin(p.phase[ch]));
                    T *= 1.0 - r.alpha_eff;
                }
                for (int ch = 0; ch < 3; ++ch) canvas.at(ch, py, px) = acc[ch];
            }
        }
    }
    return layers;
}

namespace {

// gradients accumulated per work item during the tile replay, merged in a
// fixed order afterwards so results do not depend on the thread count
struct EntryGrad {
    double mu_x = 0, mu_y = 0;
    double inv00 = 0, inv01 = 0, inv11 = 0;
    double alpha_sig = 0;
    double rho = 0;
    double amp[3] = {0, 0, 0};
    double phase[3] = {0, 0, 0};
};

}  // namespace

SceneGradients raster_backward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                               const RenderSettings& settings, const RasterForward& fwd,
                               const std::vector<ComplexField>& grad_layers) {
    const int L = cfg.num_planes;
    const int W = cfg.nx, H = cfg.ny;
    const int tile = settings.tile;
    const int num_tiles = fwd.tiles_x * fwd.tiles_y;
    const int num_buckets = L * num_tiles;
    const size_t N = scene.size();
    if (grad_layers.size() != static_cast<size_t>(L))
        throw HoloError("config", "raster_backward: upstream gradient count mismatch");

    std::vector<EntryGrad> egrad(fwd.entries.size());

    // per-pixel contribution record for the reverse sweep
    struct Hit {
        std::uint32_t e;
        double alpha_eff, g, dx, dy;
    };

#pragma omp parallel
    {
        std::vector<Hit> hits;
#pragma omp for schedule(dynamic, 4)
        for (int b = 0; b < num_buckets; ++b) {
            const std::uint32_t e0 = fwd.bucket_start[b], e1 = fwd.bucket_start[b + 1];
            if (e0 == e1) continue;
            const int plane = b / num_tiles;
            const int t = b % num_tiles;
            const int px0 = (t % fwd.tiles_x) * tile, py0 = (t / fwd.tiles_x) * tile;
            const int px1 = std::min(px0 + tile, W), py1 = std::min(py0 + tile, H);
            const ComplexField& gl = grad_layers[plane];
            for (int py = py0; py < py1; ++py) {
                for (int px = px0; px < px1; ++px) {
                    const size_t ai = (static_cast<size_t>(plane) * H + py) * W + px;
                    const std::int32_t contrib = fwd.n_contrib[ai];
                    if (contrib == 0) continue;
                    const double sx = px + 0.5, sy = py + 0.5;
                    double g_re[3], g_im[3];
                    bool any = false;
                    for (int ch = 0; ch < 3; ++ch) {
                        const c64 gv = gl.at(ch, py, px);
                        g_re[ch] = gv.real();
                        g_im[ch] = gv.imag();
                        any = any || g_re[ch] != 0.0 || g_im[ch] != 0.0;
                    }
                    if (!any) continue;

                    // replay the forward traversal to recover the accepted set
                    hits.clear();
                    for (std::uint32_t e = e0; e < e1 && static_cast<std::int32_t>(hits.size()) < contrib; ++e) {
                        const Projected& p = fwd.projected[fwd.entries[e].gidx];
                        const Response r =
                            evaluate(p, fwd.rho[static_cast<size_t>(p.n) * L + plane], sx, sy, settings);
                        if (!r.accept) continue;
                        hits.push_back(Hit{e, r.alpha_eff, r.g, r.dx, r.dy});
                    }

                    // back-to-front sweep, recovering the running transmittance
                    double T = fwd.t_final[ai];
                    double accum_re[3] = {0, 0, 0}, accum_im[3] = {0, 0, 0};
                    double last_alpha = 0.0, last_re[3] = {0, 0, 0}, last_im[3] = {0, 0, 0};
                    for (size_t k = hits.size(); k-- > 0;) {
                        const Hit& hit = hits[k];
                        const Projected& p = fwd.projected[fwd.entries[hit.e].gidx];
                        EntryGrad& eg = egrad[hit.e];
                        T /= 1.0 - hit.alpha_eff;
                        const double aw = hit.alpha_eff * T;
                        double d_alpha = 0.0;
                        for (int ch = 0; ch < 3; ++ch) {
                            const double cosp = std::cos(p.phase[ch]);
                            const double sinp = std::sin(p.phase[ch]);
                            const double vre = p.amp[ch] * cosp;
                            const double vim = p.amp[ch] * sinp;
                            accum_re[ch] = last_alpha * last_re[ch] + (1.0 - last_alpha) * accum_re[ch];
                            accum_im[ch] = last_alpha * last_im[ch] + (1.0 - last_alpha) * accum_im[ch];
                            last_re[ch] = vre;
                            last_im[ch] = vim;
                            d_alpha += (vre - accum_re[ch]) * g_re[ch] + (vim - accum_im[ch]) * g_im[ch];
                            eg.amp[ch] += aw * (cosp * g_re[ch] + sinp * g_im[ch]);
                            eg.phase[ch] += aw * p.amp[ch] * (-sinp * g_re[ch] + cosp * g_im[ch]);
                        }
                        last_alpha = hit.alpha_eff;
                        d_alpha *= T;

                        // alpha_eff = alpha_sig * G * rho, unless the clamp was active
                        if (hit.alpha_eff >= settings.alpha_clamp) continue;
                        const double rho_v = fwd.rho[static_cast<size_t>(p.n) * L + plane];
                        eg.alpha_sig += d_alpha * hit.g * rho_v;
                        eg.rho += d_alpha * p.alpha_sig * hit.g;
                        const double d_g = d_alpha * p.alpha_sig * rho_v;
                        const double gg = d_g * hit.g;
                        eg.mu_x += gg * (p.inv00 * hit.dx + p.inv01 * hit.dy);
                        eg.mu_y += gg * (p.inv01 * hit.dx + p.inv11 * hit.dy);
                        eg.inv00 += gg * (-0.5 * hit.dx * hit.dx);
                        eg.inv01 += gg * (-hit.dx * hit.dy);
                        eg.inv11 += gg * (-0.5 * hit.dy * hit.dy);
                    }
                }
            }
        }
    }

    // merge the work-item gradients in entry order (fixed regardless of
    // threading), into per-Gaussian accumulators
    SceneGradients grads;
    grads.resize_like(scene);
    std::vector<EntryGrad> acc(N);
    std::vector<double> rho_grad(N * static_cast<size_t>(L), 0.0);
    for (size_t e = 0; e < fwd.entries.size(); ++e) {
        const EntryGrad& eg = egrad[e];
        const int gi = fwd.entries[e].gidx;
        const int plane = fwd.entries[e].bucket / num_tiles;
        EntryGrad& a = acc[gi];
        a.mu_x += eg.mu_x;
        a.mu_y += eg.mu_y;
        a.inv00 += eg.inv00;
        a.inv01 += eg.inv01;
        a.inv11 += eg.inv11;
        a.alpha_sig += eg.alpha_sig;
        rho_grad[static_cast<size_t>(gi) * L + plane] += eg.rho;
        for (int ch = 0; ch < 3; ++ch) {
            a.amp[ch] += eg.amp[ch];
            a.phase[ch] += eg.phase[ch];
        }
    }

    // per-Gaussian chain back to the stored parameters
    const Eigen::Matrix3d world_to_cam = cam.rot_world_to_cam();
    const double f = cam.focal_px;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(N); ++i) {
        const Projected& p = fwd.projected[i];
        const EntryGrad& a = acc[i];

        // straight-through (or relaxed) route from plane weights to logits
        {
            SteAssign sa = ste_assign(&scene.plane_logits[i * L], L,
                                      settings.soft_assignment ? settings.soft_tau : settings.ste_tau);
            if (settings.soft_assignment) {
                // full softmax Jacobian: (diag(s) - s s^T) / tau
                double dot = 0.0;
                for (int l = 0; l < L; ++l) dot += sa.backward_weights[l] * rho_grad[i * L + l];
                for (int l = 0; l < L; ++l)
                    grads.plane_logits[i * L + l] =
                        sa.backward_weights[l] * (rho_grad[i * L + l] - dot) / settings.soft_tau;
            } else {
                for (int l = 0; l < L; ++l)
                    grads.plane_logits[i * L + l] = rho_grad[i * L + l] * sa.backward_weights[l];
            }
        }
        if (!p.valid) continue;

        grads.mu_screen[i * 2] = a.mu_x;
        grads.mu_screen[i * 2 + 1] = a.mu_y;

        for (int ch = 0; ch < 3; ++ch) {
            grads.amplitudes[i * 3 + ch] = a.amp[ch];
            grads.phases[i * 3 + ch] = a.phase[ch];
        }
        grads.opacity_logits[i] = a.alpha_sig * p.alpha_sig * (1.0 - p.alpha_sig);

        // d(loss)/d(Sigma') from the inverse-covariance accumulators
        Eigen::Matrix2d ginv;
        ginv << a.inv00, 0.5 * a.inv01, 0.5 * a.inv01, a.inv11;
        Eigen::Matrix2d inv;
        inv << p.inv00, p.inv01, p.inv01, p.inv11;
        const Eigen::Matrix2d gcov2 = -inv * ginv * inv;  // dilation shifts by a constant only

        const double iz = 1.0 / p.zc;
        Eigen::Matrix<double, 2, 3> J = Eigen::Matrix<double, 2, 3>::Zero();
        J(0, 0) = f * iz;
        J(1, 1) = f * iz;
        J(0, 2) = -f * p.xc * iz * iz;
        J(1, 2) = -f * p.yc * iz * iz;
        const Eigen::Matrix<double, 2, 3> M = J * world_to_cam;
        const Eigen::Matrix3d sigma = covariance_3d(&scene.rotations[i * 4], &scene.log_scales[i * 3]);

        const Eigen::Matrix3d gsigma = M.transpose() * gcov2 * M;
        detail::covariance_backward(&scene.rotations[i * 4], &scene.log_scales[i * 3], gsigma,
                                    &grads.rotations[i * 4], &grads.log_scales[i * 3]);

        // camera-space center gradient: through the projected mean and
        // through the Jacobian's dependence on the center
        const Eigen::Matrix<double, 2, 3> gM = (gcov2 + gcov2.transpose()) * M * sigma;
        const Eigen::Matrix<double, 2, 3> gJ = gM * world_to_cam.transpose();
        Eigen::Vector3d gxc = J.transpose() * Eigen::Vector2d(a.mu_x, a.mu_y);
        gxc.x() += gJ(0, 2) * (-f * iz * iz);
        gxc.y() += gJ(1, 2) * (-f * iz * iz);
        gxc.z() += (gJ(0, 0) + gJ(1, 1)) * (-f * iz * iz) + gJ(0, 2) * (2.0 * f * p.xc * iz * iz * iz) +
                   gJ(1, 2) * (2.0 * f * p.yc * iz * iz * iz);

        const Eigen::Vector3d gxw = world_to_cam.transpose() * gxc;
        for (int d = 0; d < 3; ++d) grads.positions[i * 3 + d] = gxw[d];
    }
    return grads;
}

}  // namespace holo

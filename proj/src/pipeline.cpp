#include "holo/pipeline.hpp"

#include <cmath>

#include "holo/losses.hpp"

namespace holo {

void FocalStackTarget::validate(const WaveConfig& cfg) const {
    if (images.size() != static_cast<size_t>(cfg.num_planes) || masks.size() != images.size())
        throw HoloError("config", "target plane count does not match the wave config");
    for (size_t l = 0; l < images.size(); ++l) {
        if (images[l].w != cfg.nx || images[l].h != cfg.ny || images[l].c != cfg.channels())
            throw HoloError("config", "target image shape does not match the grid");
        if (masks[l].w != cfg.nx || masks[l].h != cfg.ny || masks[l].c != 1)
            throw HoloError("config", "target masks must be single-channel at grid size");
    }
}

PipelineForward pipeline_forward(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                                 const PipelineOptions& opt) {
    PipelineForward f;
    f.raster = raster_forward(scene, cam, cfg, opt.raster);
    f.hologram = forward_record(f.raster.layers, cfg, opt.prop);
    f.replayed = inverse_propagate(f.hologram, cfg, opt.prop);
    f.intensities.reserve(f.replayed.size());
    for (const ComplexField& v : f.replayed) f.intensities.push_back(intensity(v));
    return f;
}

LossBreakdown total_loss(const GaussianScene& scene, const CameraView& cam, const WaveConfig& cfg,
                         const FocalStackTarget& target, const PipelineOptions& opt, SceneGradients* grads,
                         PipelineForward* fwd_out) {
    target.validate(cfg);
    PipelineForward f = pipeline_forward(scene, cam, cfg, opt);

    std::vector<IntensityImage> grad_i;
    std::vector<IntensityImage>* gi = nullptr;
    if (grads) {
        for (const IntensityImage& im : f.intensities) grad_i.emplace_back(im.w, im.h, im.c);
        gi = &grad_i;
    }

    LossBreakdown out;
    out.recon = opt.use_plain_mse ? loss_mse(f.intensities, target.images, gi)
                                  : loss_recon(f.intensities, target.images, target.masks, gi);
    out.ssim = loss_ssim(f.intensities, target.images, opt.lambda_ssim, gi);

    const size_t n = scene.size();
    if (n > 0 && opt.lambda_opacity != 0.0) {
        std::vector<double> parts(n);
        for (size_t i = 0; i < n; ++i) parts[i] = sigmoid(scene.opacity_logits[i]);
        out.opacity = opt.lambda_opacity * fold_partials(parts) / static_cast<double>(n);
    }
    out.total = out.recon + out.ssim + out.opacity;

    out.psnr.reserve(f.intensities.size());
    for (size_t l = 0; l < f.intensities.size(); ++l) out.psnr.push_back(psnr(f.intensities[l], target.images[l]));
    double acc = 0.0;
    for (double p : out.psnr) acc += p;
    out.psnr_mean = acc / static_cast<double>(out.psnr.size());

    if (grads) {
        // intensity to field: treating re/im as independent reals,
        // d|v|^2/dv = 2v scaled by the upstream intensity gradient
        const auto z = plane_positions(cfg);
        ComplexField grad_hologram(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
        for (size_t l = 0; l < f.replayed.size(); ++l) {
            ComplexField gv = f.replayed[l];
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(gv.data.size()); ++i)
                gv.data[i] = 2.0 * gv.data[i] * grad_i[l].data[i];
            // adjoint of the backward replay (propagate by -z) is propagate by +z
            ComplexField gp = propagate(gv, cfg, z[l], opt.prop);
            for (size_t i = 0; i < gp.data.size(); ++i) grad_hologram.data[i] += gp.data[i];
        }
        // adjoint of the recording sum: propagate the hologram gradient back
        std::vector<ComplexField> grad_layers;
        grad_layers.reserve(z.size());
        for (size_t l = 0; l < z.size(); ++l) grad_layers.push_back(propagate(grad_hologram, cfg, -z[l], opt.prop));

        *grads = raster_backward(scene, cam, cfg, opt.raster, f.raster, grad_layers);

        if (n > 0 && opt.lambda_opacity != 0.0) {
            const double w = opt.lambda_opacity / static_cast<double>(n);
            for (size_t i = 0; i < n; ++i) {
                const double s = sigmoid(scene.opacity_logits[i]);
                grads->opacity_logits[i] += w * s * (1.0 - s);
            }
        }
    }
    if (fwd_out) *fwd_out = std::move(f);
    return out;
}

FocalStackTarget make_target_from_scene(const GaussianScene& oracle, const CameraView& cam,
                                        const WaveConfig& cfg, const PipelineOptions& opt) {
    PipelineForward f = pipeline_forward(oracle, cam, cfg, opt);

    FocalStackTarget t;
    t.camera = cam;
    t.images = std::move(f.intensities);
    const int L = cfg.num_planes;
    t.masks.assign(L, IntensityImage(cfg.nx, cfg.ny, 1));

    // a pixel belongs to the plane whose rasterized (pre-propagation)
    // amplitude dominates; pixels nothing touched stay unmasked
#pragma omp parallel for schedule(static)
    for (int y = 0; y < cfg.ny; ++y) {
        for (int x = 0; x < cfg.nx; ++x) {
            int best = -1;
            double best_amp = 0.0;
            for (int l = 0; l < L; ++l) {
                double amp = 0.0;
                for (int ch = 0; ch < f.raster.layers[l].c; ++ch) amp += std::abs(f.raster.layers[l].at(ch, y, x));
                if (amp > best_amp) {
                    best_amp = amp;
                    best = l;
                }
            }
            if (best >= 0) t.masks[best].at(0, y, x) = 1.0;
        }
    }
    return t;
}

}  // namespace holo

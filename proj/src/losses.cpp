#include "holo/losses.hpp"

#include <cmath>

#include "holo/ssim.hpp"

namespace holo {

namespace {

void check_stack(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt) {
    if (I.size() != I_gt.size() || I.empty()) throw HoloError("config", "focal stacks have different plane counts");
    for (size_t l = 0; l < I.size(); ++l)
        if (I[l].w != I_gt[l].w || I[l].h != I_gt[l].h || I[l].c != I_gt[l].c)
            throw HoloError("config", "focal stack image shapes differ");
}

void check_grad(const std::vector<IntensityImage>& I, std::vector<IntensityImage>* grad) {
    if (!grad) return;
    if (grad->size() != I.size()) throw HoloError("config", "loss gradient stack has the wrong plane count");
    for (size_t l = 0; l < I.size(); ++l)
        if ((*grad)[l].data.size() != I[l].data.size())
            throw HoloError("config", "loss gradient image shapes differ");
}

}  // namespace

double loss_mse(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                std::vector<IntensityImage>* grad) {
    check_stack(I, I_gt);
    check_grad(I, grad);
    const double inv_l = 1.0 / static_cast<double>(I.size());
    double total = 0.0;
    for (size_t l = 0; l < I.size(); ++l) {
        const size_t n = I[l].data.size();
        const double inv_n = 1.0 / static_cast<double>(n);
        std::vector<double> rows(I[l].h * I[l].c, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
        for (int ch = 0; ch < I[l].c; ++ch) {
            for (int y = 0; y < I[l].h; ++y) {
                const double* a = I[l].channel(ch) + static_cast<size_t>(y) * I[l].w;
                const double* b = I_gt[l].channel(ch) + static_cast<size_t>(y) * I[l].w;
                double* g = grad ? (*grad)[l].channel(ch) + static_cast<size_t>(y) * I[l].w : nullptr;
                double acc = 0.0;
                for (int x = 0; x < I[l].w; ++x) {
                    const double e = a[x] - b[x];
                    acc += e * e;
                    if (g) g[x] += 2.0 * inv_l * inv_n * e;
                }
                rows[static_cast<size_t>(ch) * I[l].h + y] = acc;
            }
        }
        total += inv_l * inv_n * fold_partials(rows);
    }
    return total;
}

double loss_recon(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                  const std::vector<IntensityImage>& masks, std::vector<IntensityImage>* grad) {
    check_stack(I, I_gt);
    check_grad(I, grad);
    if (masks.size() != I.size()) throw HoloError("config", "mask stack has the wrong plane count");
    for (size_t l = 0; l < I.size(); ++l)
        if (masks[l].w != I[l].w || masks[l].h != I[l].h || masks[l].c != 1)
            throw HoloError("config", "masks must be single-channel and match the image size");

    const double inv_l = 1.0 / static_cast<double>(I.size());
    double total = 0.0;
    for (size_t l = 0; l < I.size(); ++l) {
        const size_t n = I[l].data.size();
        const double inv_n = 1.0 / static_cast<double>(n);
        std::vector<double> rows(I[l].h * I[l].c, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
        for (int ch = 0; ch < I[l].c; ++ch) {
            for (int y = 0; y < I[l].h; ++y) {
                const double* a = I[l].channel(ch) + static_cast<size_t>(y) * I[l].w;
                const double* b = I_gt[l].channel(ch) + static_cast<size_t>(y) * I[l].w;
                const double* m = masks[l].channel(0) + static_cast<size_t>(y) * I[l].w;
                double* g = grad ? (*grad)[l].channel(ch) + static_cast<size_t>(y) * I[l].w : nullptr;
                double acc = 0.0;
                for (int x = 0; x < I[l].w; ++x) {
                    const double e = a[x] - b[x];
                    const double weight = 1.0 + m[x] * m[x] + b[x] * b[x];
                    acc += weight * e * e;
                    if (g) g[x] += 2.0 * inv_l * inv_n * weight * e;
                }
                rows[static_cast<size_t>(ch) * I[l].h + y] = acc;
            }
        }
        total += inv_l * inv_n * fold_partials(rows);
    }
    return total;
}

double loss_ssim(const std::vector<IntensityImage>& I, const std::vector<IntensityImage>& I_gt,
                 double lambda, std::vector<IntensityImage>* grad) {
    check_stack(I, I_gt);
    check_grad(I, grad);
    const double scale = lambda / static_cast<double>(I.size());
    double total = 0.0;
    for (size_t l = 0; l < I.size(); ++l) {
        IntensityImage gs;
        const double s = ssim_mean(I[l], I_gt[l], grad ? &gs : nullptr);
        total += scale * (1.0 - s);
        if (grad) {
            double* g = (*grad)[l].data.data();
            for (size_t i = 0; i < gs.data.size(); ++i) g[i] -= scale * gs.data[i];
        }
    }
    return total;
}

double psnr(const IntensityImage& I, const IntensityImage& I_gt) {
    if (I.w != I_gt.w || I.h != I_gt.h || I.c != I_gt.c) throw HoloError("config", "psnr: image shapes differ");
    std::vector<double> rows(I.h * I.c, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
    for (int ch = 0; ch < I.c; ++ch) {
        for (int y = 0; y < I.h; ++y) {
            const double* a = I.channel(ch) + static_cast<size_t>(y) * I.w;
            const double* b = I_gt.channel(ch) + static_cast<size_t>(y) * I.w;
            double acc = 0.0;
            for (int x = 0; x < I.w; ++x) {
                const double e = a[x] - b[x];
                acc += e * e;
            }
            rows[static_cast<size_t>(ch) * I.h + y] = acc;
        }
    }
    const double mse = fold_partials(rows) / static_cast<double>(I.data.size());
    if (mse <= 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

}  // namespace holo

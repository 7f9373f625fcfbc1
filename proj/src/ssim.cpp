#include "holo/ssim.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace holo {

namespace {

constexpr int kWin = 11;
constexpr int kHalf = kWin / 2;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWin> window() {
    std::array<double, kWin> w;
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double d = i - kHalf;
        w[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// separable correlation with zero extension outside the grid; callers only
// read positions where the window fits, or feed inputs that are zero there
void corr_h(const double* src, double* dst, int w, int h, const std::array<double, kWin>& win) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        double* out = dst + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            const int k0 = std::max(0, kHalf - x), k1 = std::min(kWin, w + kHalf - x);
            for (int k = k0; k < k1; ++k) acc += win[k] * row[x + k - kHalf];
            out[x] = acc;
        }
    }
}

void corr_v(const double* src, double* dst, int w, int h, const std::array<double, kWin>& win) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        const int k0 = std::max(0, kHalf - y), k1 = std::min(kWin, h + kHalf - y);
        double* out = dst + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = k0; k < k1; ++k) acc += win[k] * src[static_cast<size_t>(y + k - kHalf) * w + x];
            out[x] = acc;
        }
    }
}

void blur(const double* src, double* dst, double* scratch, int w, int h, const std::array<double, kWin>& win) {
    corr_h(src, scratch, w, h, win);
    corr_v(scratch, dst, w, h, win);
}

}  // namespace

double ssim_mean(const IntensityImage& x, const IntensityImage& y, IntensityImage* grad_x) {
    if (x.w != y.w || x.h != y.h || x.c != y.c) throw HoloError("config", "ssim: image shapes differ");
    if (x.w < kWin || x.h < kWin)
        throw HoloError("config", "ssim needs images at least 11 pixels in each dimension");

    const auto win = window();
    const int w = x.w, h = x.h;
    const size_t plane = static_cast<size_t>(w) * h;
    const int vx0 = kHalf, vx1 = w - kHalf;  // fully interior window centers
    const int vy0 = kHalf, vy1 = h - kHalf;
    const size_t n_valid = static_cast<size_t>(vx1 - vx0) * (vy1 - vy0) * x.c;

    if (grad_x) {
        *grad_x = IntensityImage(w, h, x.c);
    }

    std::vector<double> mx(plane), my(plane), qx(plane), qy(plane), qxy(plane);
    std::vector<double> prod(plane), scratch(plane);
    std::vector<double> gmu(plane), gqx(plane), gqxy(plane), t1(plane), t2(plane), t3(plane);

    double total = 0.0;
    for (int ch = 0; ch < x.c; ++ch) {
        const double* xa = x.channel(ch);
        const double* ya = y.channel(ch);

        blur(xa, mx.data(), scratch.data(), w, h, win);
        blur(ya, my.data(), scratch.data(), w, h, win);
        for (size_t i = 0; i < plane; ++i) prod[i] = xa[i] * xa[i];
        blur(prod.data(), qx.data(), scratch.data(), w, h, win);
        for (size_t i = 0; i < plane; ++i) prod[i] = ya[i] * ya[i];
        blur(prod.data(), qy.data(), scratch.data(), w, h, win);
        for (size_t i = 0; i < plane; ++i) prod[i] = xa[i] * ya[i];
        blur(prod.data(), qxy.data(), scratch.data(), w, h, win);

        if (grad_x) {
            std::fill(gmu.begin(), gmu.end(), 0.0);
            std::fill(gqx.begin(), gqx.end(), 0.0);
            std::fill(gqxy.begin(), gqxy.end(), 0.0);
        }

        std::vector<double> row_sums(vy1 - vy0, 0.0);
#pragma omp parallel for schedule(static)
        for (int py = vy0; py < vy1; ++py) {
            double rsum = 0.0;
            for (int px = vx0; px < vx1; ++px) {
                const size_t i = static_cast<size_t>(py) * w + px;
                const double ux = mx[i], uy = my[i];
                const double vxv = qx[i] - ux * ux;
                const double vyv = qy[i] - uy * uy;
                const double vxy = qxy[i] - ux * uy;
                const double a1 = 2.0 * ux * uy + kC1;
                const double a2 = 2.0 * vxy + kC2;
                const double b1 = ux * ux + uy * uy + kC1;
                const double b2 = vxv + vyv + kC2;
                const double d = b1 * b2;
                const double s = (a1 * a2) / d;
                rsum += s;
                if (grad_x) {
                    // derivative in the raw-moment parameterization: the mean
                    // also feeds the variance and covariance terms
                    gmu[i] = (2.0 * uy * (a2 - a1) - s * 2.0 * ux * (b2 - b1)) / d;
                    gqx[i] = -s / b2;
                    gqxy[i] = 2.0 * a1 / d;
                }
            }
            row_sums[py - vy0] = rsum;
        }
        total += fold_partials(row_sums);

        if (grad_x) {
            // adjoint of the valid-window blur is the same separable
            // correlation applied to the (zero outside the valid set) maps
            blur(gmu.data(), t1.data(), scratch.data(), w, h, win);
            blur(gqx.data(), t2.data(), scratch.data(), w, h, win);
            blur(gqxy.data(), t3.data(), scratch.data(), w, h, win);
            double* gx = grad_x->channel(ch);
            const double inv_n = 1.0 / static_cast<double>(n_valid);
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(plane); ++i)
                gx[i] = inv_n * (t1[i] + 2.0 * xa[i] * t2[i] + ya[i] * t3[i]);
        }
    }
    return total / static_cast<double>(n_valid);
}

}  // namespace holo

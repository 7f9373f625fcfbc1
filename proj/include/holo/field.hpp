#pragma once

#include <vector>

#include "holo/common.hpp"

namespace holo {

// Complex scalar field sampled on a regular grid.  Storage is channel
// outermost, then rows: index = (c * h + y) * w + x.
struct ComplexField {
    int w = 0, h = 0, c = 0;
    double pitch = 0.0;  // meters per pixel
    std::vector<c64> data;

    ComplexField() = default;
    ComplexField(int w_, int h_, int c_, double pitch_)
        : w(w_), h(h_), c(c_), pitch(pitch_), data(static_cast<size_t>(w_) * h_ * c_) {}

    c64& at(int ch, int y, int x) { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
    const c64& at(int ch, int y, int x) const { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
    c64* channel(int ch) { return data.data() + static_cast<size_t>(ch) * h * w; }
    const c64* channel(int ch) const { return data.data() + static_cast<size_t>(ch) * h * w; }

    size_t pixels() const { return static_cast<size_t>(w) * h; }
    bool same_shape(const ComplexField& o) const { return w == o.w && h == o.h && c == o.c; }
};

// Real-valued image with the same layout.
struct IntensityImage {
    int w = 0, h = 0, c = 0;
    std::vector<double> data;

    IntensityImage() = default;
    IntensityImage(int w_, int h_, int c_) : w(w_), h(h_), c(c_), data(static_cast<size_t>(w_) * h_ * c_, 0.0) {}

    double& at(int ch, int y, int x) { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
    double at(int ch, int y, int x) const { return data[(static_cast<size_t>(ch) * h + y) * w + x]; }
    double* channel(int ch) { return data.data() + static_cast<size_t>(ch) * h * w; }
    const double* channel(int ch) const { return data.data() + static_cast<size_t>(ch) * h * w; }
    size_t pixels() const { return static_cast<size_t>(w) * h; }
};

// |u|^2 per sample
IntensityImage intensity(const ComplexField& u);

// sum of |u|^2 over all samples and channels, fixed reduction order
double energy(const ComplexField& u);
double energy_channel(const ComplexField& u, int ch);

// real inner product treating re/im as independent reals:
// sum(re(a)re(b) + im(a)im(b)); used by the adjoint tests
double dot_real(const ComplexField& a, const ComplexField& b);

}  // namespace holo

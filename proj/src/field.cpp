#include "holo/field.hpp"

namespace holo {

IntensityImage intensity(const ComplexField& u) {
    IntensityImage out(u.w, u.h, u.c);
    const size_t n = u.data.size();
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const c64 v = u.data[i];
        out.data[i] = v.real() * v.real() + v.imag() * v.imag();
    }
    return out;
}

double energy_channel(const ComplexField& u, int ch) {
    std::vector<double> rows(u.h, 0.0);
    const c64* base = u.channel(ch);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < u.h; ++y) {
        double acc = 0.0;
        const c64* row = base + static_cast<size_t>(y) * u.w;
        for (int x = 0; x < u.w; ++x) acc += row[x].real() * row[x].real() + row[x].imag() * row[x].imag();
        rows[y] = acc;
    }
    return fold_partials(rows);
}

double energy(const ComplexField& u) {
    double acc = 0.0;
    for (int ch = 0; ch < u.c; ++ch) acc += energy_channel(u, ch);
    return acc;
}

double dot_real(const ComplexField& a, const ComplexField& b) {
    if (!a.same_shape(b)) throw HoloError("numeric", "dot_real: shape mismatch");
    std::vector<double> rows(static_cast<size_t>(a.h) * a.c, 0.0);
#pragma omp parallel for schedule(static) collapse(2)
    for (int ch = 0; ch < a.c; ++ch) {
        for (int y = 0; y < a.h; ++y) {
            double acc = 0.0;
            const c64* ra = a.channel(ch) + static_cast<size_t>(y) * a.w;
            const c64* rb = b.channel(ch) + static_cast<size_t>(y) * a.w;
            for (int x = 0; x < a.w; ++x)
                acc += ra[x].real() * rb[x].real() + ra[x].imag() * rb[x].imag();
            rows[static_cast<size_t>(ch) * a.h + y] = acc;
        }
    }
    return fold_partials(rows);
}

}  // namespace holo

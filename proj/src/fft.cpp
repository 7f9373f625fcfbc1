#include "holo/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace holo {

namespace {

std::mutex g_plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> g_plans;

fftw_plan plan_for(int w, int h, int sign) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_tuple(w, h, sign);
    auto it = g_plans.find(key);
    if (it != g_plans.end()) return it->second;
    // FFTW_ESTIMATE keeps the plan choice deterministic and avoids touching
    // the input; FFTW_UNALIGNED lets us execute on any heap buffer.
    std::vector<c64> dummy(static_cast<size_t>(w) * h);
    fftw_plan p = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(dummy.data()),
                                   reinterpret_cast<fftw_complex*>(dummy.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw HoloError("numeric", "fftw plan creation failed");
    g_plans.emplace(key, p);
    return p;
}

}  // namespace

void fft2(c64* data, int w, int h) {
    fftw_plan p = plan_for(w, h, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
}

void ifft2(c64* data, int w, int h) {
    fftw_plan p = plan_for(w, h, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data), reinterpret_cast<fftw_complex*>(data));
    const double s = 1.0 / (static_cast<double>(w) * h);
    const size_t n = static_cast<size_t>(w) * h;
    for (size_t i = 0; i < n; ++i) data[i] *= s;
}

}  // namespace holo

#include "holo/wave_config.hpp"

namespace holo {

void WaveConfig::validate() const {
    if (nx <= 0 || ny <= 0) throw HoloError("config", "resolution must be positive");
    if (pitch <= 0.0) throw HoloError("config", "pixel pitch must be positive");
    if (wavelengths.empty()) throw HoloError("config", "at least one wavelength required");
    for (double l : wavelengths)
        if (l <= 0.0) throw HoloError("config", "wavelengths must be positive");
    if (distance <= 0.0) throw HoloError("config", "propagation distance must be positive");
    if (volume_depth < 0.0) throw HoloError("config", "volume depth must be non-negative");
    if (num_planes < 1) throw HoloError("config", "need at least one depth plane");
    if (num_planes > 1 && volume_depth <= 0.0)
        throw HoloError("config", "multiple planes need a positive volume depth");
}

std::vector<double> plane_positions(const WaveConfig& cfg) {
    cfg.validate();
    const int L = cfg.num_planes;
    std::vector<double> z(L);
    if (L == 1) {
        z[0] = cfg.distance;
        return z;
    }
    const double dz = cfg.volume_depth / (L - 1);
    const double z0 = cfg.distance - 0.5 * (L - 1) * dz;
    for (int l = 0; l < L; ++l) z[l] = z0 + l * dz;
    return z;
}

}  // namespace holo

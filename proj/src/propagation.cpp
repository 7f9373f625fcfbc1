#include "holo/propagation.hpp"

#include <cmath>

#include "holo/fft.hpp"

namespace holo {

namespace {

// wrapped frequency for bin i of n samples at pitch dx: i in [0, n) maps
// to k in [-n/2, n/2), f = k / (n dx)
inline double freq_at(int i, int n, double dx) {
    const int k = (i < (n + 1) / 2) ? i : i - n;
    return static_cast<double>(k) / (static_cast<double>(n) * dx);
}

TransferFunction build_tf(int w, int h, double pitch, const std::vector<double>& wavelengths, double z,
                          bool local_limit) {
    TransferFunction tf;
    tf.w = w;
    tf.h = h;
    tf.c = static_cast<int>(wavelengths.size());
    tf.z = z;
    tf.hz.assign(static_cast<size_t>(w) * h * tf.c, c64(0.0, 0.0));

    for (int ch = 0; ch < tf.c; ++ch) {
        const double lambda = wavelengths[ch];
        const double inv_l2 = 1.0 / (lambda * lambda);
        // local frequency limit (only meaningful with |z| > 0)
        double fx_lim = 0.0, fy_lim = 0.0;
        if (local_limit && z != 0.0) {
            const double du = 1.0 / (w * pitch);
            const double dv = 1.0 / (h * pitch);
            fx_lim = 1.0 / (lambda * std::sqrt((2.0 * du * z) * (2.0 * du * z) + 1.0));
            fy_lim = 1.0 / (lambda * std::sqrt((2.0 * dv * z) * (2.0 * dv * z) + 1.0));
        }
        c64* out = tf.hz.data() + static_cast<size_t>(ch) * h * w;
#pragma omp parallel for schedule(static)
        for (int y = 0; y < h; ++y) {
            const double fy = freq_at(y, h, pitch);
            c64* row = out + static_cast<size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                const double fx = freq_at(x, w, pitch);
                const double arg = inv_l2 - fx * fx - fy * fy;
                if (arg < 0.0) continue;  // evanescent, stays zero
                if (local_limit && z != 0.0 && (std::abs(fx) > fx_lim || std::abs(fy) > fy_lim)) continue;
                const double phase = kTwoPi * z * std::sqrt(arg);
                row[x] = c64(std::cos(phase), std::sin(phase));
            }
        }
    }
    return tf;
}

// apply H in the frequency domain for one channel, in place
void apply_tf_channel(c64* data, int w, int h, const c64* hz) {
    fft2(data, w, h);
    const size_t n = static_cast<size_t>(w) * h;
    for (size_t i = 0; i < n; ++i) data[i] *= hz[i];
    ifft2(data, w, h);
}

ComplexField pad_center(const ComplexField& u, int pw, int ph) {
    ComplexField out(pw, ph, u.c, u.pitch);
    const int ox = (pw - u.w) / 2;
    const int oy = (ph - u.h) / 2;
    for (int ch = 0; ch < u.c; ++ch)
        for (int y = 0; y < u.h; ++y)
            std::memcpy(&out.at(ch, y + oy, ox), &u.at(ch, y, 0), sizeof(c64) * u.w);
    return out;
}

ComplexField crop_center(const ComplexField& u, int cw, int chh) {
    ComplexField out(cw, chh, u.c, u.pitch);
    const int ox = (u.w - cw) / 2;
    const int oy = (u.h - chh) / 2;
    for (int ch = 0; ch < u.c; ++ch)
        for (int y = 0; y < chh; ++y)
            std::memcpy(&out.at(ch, y, 0), &u.at(ch, y + oy, ox), sizeof(c64) * cw);
    return out;
}

}  // namespace

TransferFunction transfer_function(const WaveConfig& cfg, double z, const PropagationOptions& opt) {
    cfg.validate();
    const int w = opt.pad2x ? 2 * cfg.nx : cfg.nx;
    const int h = opt.pad2x ? 2 * cfg.ny : cfg.ny;
    return build_tf(w, h, cfg.pitch, cfg.wavelengths, z, opt.local_band_limit);
}

ComplexField propagate(const ComplexField& u, const WaveConfig& cfg, double z, const PropagationOptions& opt) {
    if (u.w != cfg.nx || u.h != cfg.ny || u.c != cfg.channels())
        throw HoloError("config", "propagate: field does not match the configured grid");
    const TransferFunction tf = transfer_function(cfg, z, opt);
    ComplexField work = opt.pad2x ? pad_center(u, 2 * cfg.nx, 2 * cfg.ny) : u;
#pragma omp parallel for schedule(static)
    for (int ch = 0; ch < work.c; ++ch) apply_tf_channel(work.channel(ch), work.w, work.h, tf.channel(ch));
    return opt.pad2x ? crop_center(work, cfg.nx, cfg.ny) : work;
}

ComplexField forward_record(const std::vector<ComplexField>& layers, const WaveConfig& cfg,
                            const PropagationOptions& opt) {
    const std::vector<double> zs = plane_positions(cfg);
    if (layers.size() != zs.size())
        throw HoloError("config", "forward_record: layer count does not match num_planes");
    ComplexField acc(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
    for (size_t l = 0; l < layers.size(); ++l) {
        ComplexField p = propagate(layers[l], cfg, zs[l], opt);
        for (size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += p.data[i];
    }
    return acc;
}

std::vector<ComplexField> inverse_propagate(const ComplexField& hologram, const WaveConfig& cfg,
                                            const PropagationOptions& opt) {
    const std::vector<double> zs = plane_positions(cfg);
    std::vector<ComplexField> out;
    out.reserve(zs.size());
    for (double z : zs) out.push_back(propagate(hologram, cfg, -z, opt));
    return out;
}

double point_phase_exact(double lambda, double dx, double dy, double z) {
    const double d = std::sqrt(dx * dx + dy * dy + z * z);
    return wrap_phase(kTwoPi * d / lambda);
}

double point_phase_paraxial(double lambda, double dx, double dy, double z) {
    const double r2 = dx * dx + dy * dy;
    return wrap_phase(kTwoPi * (z + r2 / (2.0 * z)) / lambda);
}

ComplexField point_source_field(const WaveConfig& cfg, const std::vector<PointSource>& sources,
                                const PointSourceOptions& opt) {
    cfg.validate();
    for (const auto& s : sources) {
        if (s.z <= 0.0) throw HoloError("config", "point sources must sit in front of the hologram plane");
        if (s.amps.size() != 1 && s.amps.size() != static_cast<size_t>(cfg.channels()))
            throw HoloError("config", "point source amplitude count must be 1 or match the channels");
    }
    const double cx = (opt.cx >= 0.0) ? opt.cx : cfg.nx / 2.0;
    const double cy = (opt.cy >= 0.0) ? opt.cy : cfg.ny / 2.0;
    ComplexField out(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
    for (int ch = 0; ch < cfg.channels(); ++ch) {
        const double lambda = cfg.wavelengths[ch];
        c64* base = out.channel(ch);
        for (const auto& s : sources) {
            const double amp = (s.amps.size() == 1) ? s.amps[0] : s.amps[ch];
#pragma omp parallel for schedule(static)
            for (int y = 0; y < cfg.ny; ++y) {
                c64* row = base + static_cast<size_t>(y) * cfg.nx;
                const double py = ((y + 0.5) - cy) * cfg.pitch - s.y;
                for (int x = 0; x < cfg.nx; ++x) {
                    const double px = ((x + 0.5) - cx) * cfg.pitch - s.x;
                    const double phi = s.phase0 + (opt.paraxial ? point_phase_paraxial(lambda, px, py, s.z)
                                                                : point_phase_exact(lambda, px, py, s.z));
                    double a = amp;
                    if (opt.inverse_r) a /= std::sqrt(px * px + py * py + s.z * s.z);
                    row[x] += c64(a * std::cos(phi), a * std::sin(phi));
                }
            }
        }
    }
    return out;
}

}  // namespace holo

#include "holo/phase_only.hpp"

#include <cmath>
#include <numeric>

#include "holo/losses.hpp"
#include "holo/optimizer.hpp"

namespace holo {

ComplexField PhaseOnlyHologram::field(double pitch) const {
    ComplexField f(w, h, c, pitch);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(phase.size()); ++i)
        f.data[i] = std::polar(1.0, phase[i]);
    return f;
}

namespace {

// the reference stack never changes during conversion, replay it once
struct MatchTargets {
    std::vector<double> z;
    std::vector<ComplexField> fields;
    std::vector<IntensityImage> images;
};

void check_input(const ComplexField& P, const WaveConfig& cfg) {
    cfg.validate();
    if (P.w != cfg.nx || P.h != cfg.ny || P.c != cfg.channels())
        throw HoloError("config", "hologram shape does not match the wave config");
    for (const c64& v : P.data)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw HoloError("numeric", "hologram contains non-finite samples");
}

MatchTargets replay_targets(const ComplexField& P, const WaveConfig& cfg, const PhaseOnlyOptions& opt) {
    MatchTargets t;
    t.z = plane_positions(cfg);
    t.fields = inverse_propagate(P, cfg, opt.prop);
    t.images.reserve(t.fields.size());
    for (const ComplexField& u : t.fields) t.images.push_back(intensity(u));
    return t;
}

ComplexField unit_field(const std::vector<double>& theta, const WaveConfig& cfg) {
    ComplexField f(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(theta.size()); ++i)
        f.data[i] = std::polar(1.0, theta[i]);
    return f;
}

double eval_loss(const MatchTargets& t, const std::vector<double>& theta, const WaveConfig& cfg,
                 const PhaseOnlyOptions& opt, std::vector<double>* grad) {
    const ComplexField cand = unit_field(theta, cfg);
    const std::vector<ComplexField> replayed = inverse_propagate(cand, cfg, opt.prop);

    const size_t L = replayed.size();
    const size_t samples = cand.data.size();
    const double inv_lm = 1.0 / (static_cast<double>(L) * static_cast<double>(samples));

    std::vector<IntensityImage> images;
    images.reserve(L);
    for (const ComplexField& u : replayed) images.push_back(intensity(u));

    double field_term = 0.0;
    std::vector<double> parts(samples);
    for (size_t l = 0; l < L; ++l) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(samples); ++i)
            parts[i] = std::norm(replayed[l].data[i] - t.fields[l].data[i]);
        field_term += fold_partials(parts) * inv_lm;
    }

    if (!grad) return field_term + loss_ssim(images, t.images, opt.lambda_ssim, nullptr);

    std::vector<IntensityImage> grad_i;
    grad_i.reserve(L);
    for (const IntensityImage& im : images) grad_i.emplace_back(im.w, im.h, im.c);
    const double ssim_term = loss_ssim(images, t.images, opt.lambda_ssim, &grad_i);

    // adjoint of the per-plane replay (propagate by -z) is propagate by +z;
    // the squared magnitude pulls back as d|v|^2/dv = 2v
    ComplexField acc(cfg.nx, cfg.ny, cfg.channels(), cfg.pitch);
    for (size_t l = 0; l < L; ++l) {
        ComplexField gv = replayed[l];
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < static_cast<long long>(samples); ++i)
            gv.data[i] = 2.0 * inv_lm * (replayed[l].data[i] - t.fields[l].data[i]) +
                         2.0 * replayed[l].data[i] * grad_i[l].data[i];
        const ComplexField gp = propagate(gv, cfg, t.z[l], opt.prop);
        for (size_t i = 0; i < samples; ++i) acc.data[i] += gp.data[i];
    }

    grad->assign(samples, 0.0);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(samples); ++i)
        (*grad)[i] = std::imag(acc.data[i] * std::conj(cand.data[i]));

    return field_term + ssim_term;
}

}  // namespace

double phase_only_loss(const ComplexField& P, const std::vector<double>& theta, const WaveConfig& cfg,
                       const PhaseOnlyOptions& opt, std::vector<double>* grad) {
    check_input(P, cfg);
    if (theta.size() != P.data.size())
        throw HoloError("config", "phase vector does not match the hologram shape");
    const MatchTargets targets = replay_targets(P, cfg, opt);
    return eval_loss(targets, theta, cfg, opt, grad);
}

PhaseOnlyResult convert_phase_only(const ComplexField& P, const WaveConfig& cfg, int iters, double lr,
                                   const PhaseOnlyOptions& opt) {
    check_input(P, cfg);
    if (iters < 0) throw HoloError("config", "iteration count must be non-negative");
    if (lr <= 0.0) throw HoloError("config", "step size must be positive");

    PhaseOnlyResult out;
    out.hologram.w = P.w;
    out.hologram.h = P.h;
    out.hologram.c = P.c;

    std::vector<double> theta(P.data.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(theta.size()); ++i) theta[i] = std::arg(P.data[i]);

    const MatchTargets targets = replay_targets(P, cfg, opt);

    std::vector<double> g;
    double loss = eval_loss(targets, theta, cfg, opt, iters > 0 ? &g : nullptr);
    out.trace.reserve(static_cast<size_t>(iters) + 1);
    out.trace.push_back(loss);
    if (iters == 0) {
        out.hologram.phase = std::move(theta);
        return out;
    }

    OptimizerConfig ocfg;
    ocfg.use_adam = opt.use_adam;
    OptimState::Moments mom;
    mom.resize(theta.size());

    std::vector<double> best = theta;
    double best_loss = loss;
    double prev = loss;
    double step_lr = lr;
    for (int it = 1; it <= iters; ++it) {
        adaptive_moment_update(theta, g, mom, step_lr, it, ocfg);
        loss = eval_loss(targets, theta, cfg, opt, &g);
        out.trace.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = theta;
        }
        if (loss > prev) {
            // backtrack: halve the step and restart from the best iterate
            step_lr *= 0.5;
            theta = best;
            loss = eval_loss(targets, theta, cfg, opt, &g);
        }
        prev = loss;
    }

    out.hologram.phase = std::move(best);
    return out;
}

std::vector<double> phase_gradient_oracle(const ComplexField& P, const std::vector<double>& theta,
                                          const WaveConfig& cfg, const std::vector<size_t>& indices,
                                          double fd_step, const PhaseOnlyOptions& opt) {
    if (cfg.num_planes < 1) throw HoloError("config", "oracle needs at least one depth plane");
    if (cfg.nx > 64 || cfg.ny > 64) throw HoloError("config", "oracle is limited to grids up to 64x64");
    check_input(P, cfg);
    if (theta.size() != P.data.size())
        throw HoloError("config", "phase vector does not match the hologram shape");
    if (fd_step <= 0.0) throw HoloError("config", "difference step must be positive");

    std::vector<size_t> idx = indices;
    if (idx.empty()) {
        idx.resize(theta.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
    }

    const MatchTargets targets = replay_targets(P, cfg, opt);
    std::vector<double> g(theta.size(), 0.0);
    std::vector<double> probe = theta;
    for (size_t i : idx) {
        if (i >= theta.size()) throw HoloError("config", "sampled phase index out of range");
        probe[i] = theta[i] + fd_step;
        const double up = eval_loss(targets, probe, cfg, opt, nullptr);
        probe[i] = theta[i] - fd_step;
        const double dn = eval_loss(targets, probe, cfg, opt, nullptr);
        probe[i] = theta[i];
        g[i] = (up - dn) / (2.0 * fd_step);
    }
    return g;
}

}  // namespace holo

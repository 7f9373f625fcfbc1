#include "holo/trainer.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <json.hpp>
#include <sstream>

#include "holo/scene_io.hpp"

namespace holo {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

static_assert(std::endian::native == std::endian::little, "file formats assume a little endian host");

constexpr char kMomentsMagic[8] = {'H', 'O', 'L', 'O', 'M', 'O', 'M', '1'};

void write_raw(std::FILE* f, const void* p, size_t n, const std::string& path) {
    if (n == 0) return;
    if (std::fwrite(p, 1, n, f) != n) throw HoloError("io", "short write: " + path);
}

void read_raw(std::FILE* f, void* p, size_t n, const std::string& path) {
    if (n == 0) return;
    if (std::fread(p, 1, n, f) != n) throw HoloError("io", "truncated checkpoint payload: " + path);
}

void write_doubles(std::FILE* f, const std::vector<double>& v, const std::string& path) {
    const std::uint64_t n = v.size();
    write_raw(f, &n, sizeof(n), path);
    write_raw(f, v.data(), n * sizeof(double), path);
}

std::vector<double> read_doubles(std::FILE* f, const std::string& path) {
    std::uint64_t n = 0;
    read_raw(f, &n, sizeof(n), path);
    if (n > (1ull << 28)) throw HoloError("io", "implausible buffer length in " + path);
    std::vector<double> v(n);
    read_raw(f, v.data(), n * sizeof(double), path);
    return v;
}

void write_moments_file(const std::string& path, const TrainerState& ts) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw HoloError("io", "cannot open for writing: " + path);
    write_raw(fp.get(), kMomentsMagic, sizeof(kMomentsMagic), path);
    const std::uint64_t header[2] = {static_cast<std::uint64_t>(ts.optim.step),
                                     static_cast<std::uint64_t>(ts.optim.skipped)};
    write_raw(fp.get(), header, sizeof(header), path);
    const OptimState::Moments* groups[] = {&ts.optim.positions,  &ts.optim.rotations, &ts.optim.log_scales,
                                           &ts.optim.amplitudes, &ts.optim.opacities, &ts.optim.phases,
                                           &ts.optim.plane_logits};
    for (const auto* g : groups) {
        write_doubles(fp.get(), g->m, path);
        write_doubles(fp.get(), g->v, path);
        write_doubles(fp.get(), g->n, path);
        write_doubles(fp.get(), g->prev_grad, path);
    }
    write_doubles(fp.get(), ts.stats.grad_norm_sum, path);
    const std::uint64_t nvis = ts.stats.visible_count.size();
    write_raw(fp.get(), &nvis, sizeof(nvis), path);
    write_raw(fp.get(), ts.stats.visible_count.data(), nvis * sizeof(int), path);
    if (std::fflush(fp.get()) != 0) throw HoloError("io", "flush failed: " + path);
}

void read_moments_file(const std::string& path, TrainerState& ts) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + path);
    char magic[8];
    read_raw(fp.get(), magic, sizeof(magic), path);
    if (std::memcmp(magic, kMomentsMagic, sizeof(magic)) != 0)
        throw HoloError("io", "bad magic, not a moments file: " + path);
    std::uint64_t header[2];
    read_raw(fp.get(), header, sizeof(header), path);
    ts.optim.step = static_cast<long long>(header[0]);
    ts.optim.skipped = static_cast<long long>(header[1]);
    OptimState::Moments* groups[] = {&ts.optim.positions,  &ts.optim.rotations, &ts.optim.log_scales,
                                     &ts.optim.amplitudes, &ts.optim.opacities, &ts.optim.phases,
                                     &ts.optim.plane_logits};
    for (auto* g : groups) {
        g->m = read_doubles(fp.get(), path);
        g->v = read_doubles(fp.get(), path);
        g->n = read_doubles(fp.get(), path);
        g->prev_grad = read_doubles(fp.get(), path);
    }
    ts.stats.grad_norm_sum = read_doubles(fp.get(), path);
    std::uint64_t nvis = 0;
    read_raw(fp.get(), &nvis, sizeof(nvis), path);
    if (nvis > (1ull << 28)) throw HoloError("io", "implausible buffer length in " + path);
    ts.stats.visible_count.assign(nvis, 0);
    read_raw(fp.get(), ts.stats.visible_count.data(), nvis * sizeof(int), path);
}

}  // namespace

TrainerState TrainerState::fresh(GaussianScene scene, std::uint64_t seed, std::uint64_t config_hash) {
    TrainerState ts;
    ts.scene = std::move(scene);
    ts.optim.resize_like(ts.scene);
    ts.stats.resize(ts.scene.size());
    ts.stats.clear();
    ts.rng.seed(seed);
    ts.config_hash = config_hash;
    return ts;
}

TrainResult train(TrainerState& ts, const std::vector<FocalStackTarget>& views, const WaveConfig& cfg,
                  const TrainHyper& hyper) {
    if (views.empty()) throw HoloError("config", "training needs at least one view");
    for (const FocalStackTarget& v : views) v.validate(cfg);
    ts.scene.validate();
    if (ts.optim.positions.m.size() != ts.scene.positions.size() ||
        ts.stats.grad_norm_sum.size() != ts.scene.size())
        throw HoloError("config", "trainer state buffers do not match the scene");

    TrainResult res;
    std::uniform_int_distribution<size_t> pick(0, views.size() - 1);

    while (ts.global_step < hyper.steps) {
        const size_t vi =
            hyper.random_views ? pick(ts.rng) : static_cast<size_t>(ts.global_step % views.size());
        const FocalStackTarget& view = views[vi];

        SceneGradients grads;
        PipelineForward fwd;
        const LossBreakdown lb =
            total_loss(ts.scene, view.camera, cfg, view, hyper.pipeline, &grads, &fwd);
        res.metrics.push_back({ts.global_step, lb.total, lb.recon, lb.ssim, lb.psnr_mean});

        // densification statistics: screen gradients rescaled to NDC units
        // (half the canvas maps to one unit)
        const double sx = cfg.nx / 2.0, sy = cfg.ny / 2.0;
        for (size_t i = 0; i < ts.scene.size(); ++i) {
            if (!fwd.raster.touched[i]) continue;
            const double gx = grads.mu_screen[i * 2] * sx;
            const double gy = grads.mu_screen[i * 2 + 1] * sy;
            ts.stats.grad_norm_sum[i] += std::sqrt(gx * gx + gy * gy);
            ts.stats.visible_count[i] += 1;
        }

        optimizer_step(ts.optim, ts.scene, grads, hyper.optim);
        ++ts.global_step;
        ++res.steps_run;

        if (hyper.densify_interval > 0 && ts.global_step >= hyper.densify_start &&
            ts.global_step <= hyper.densify_until && ts.global_step % hyper.densify_interval == 0 &&
            ts.scene.size() > 0) {
            const DensifyResult dr = densify_and_prune(ts.scene, ts.stats, hyper.densify, ts.rng);
            ts.optim.remap(dr.src_index, ts.scene);
            ts.stats.resize(ts.scene.size());
            ts.stats.clear();
            ++res.densify_rounds;
        }
    }

    // closing evaluation row, averaged over every view, no update
    MetricsRow eval;
    eval.step = ts.global_step;
    for (const FocalStackTarget& view : views) {
        const LossBreakdown lb = total_loss(ts.scene, view.camera, cfg, view, hyper.pipeline);
        eval.loss += lb.total;
        eval.loss_recon += lb.recon;
        eval.loss_ssim += lb.ssim;
        eval.psnr_mean += lb.psnr_mean;
    }
    const double nv = static_cast<double>(views.size());
    eval.loss /= nv;
    eval.loss_recon /= nv;
    eval.loss_ssim /= nv;
    eval.psnr_mean /= nv;
    res.metrics.push_back(eval);
    return res;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out = "step,loss,loss_recon,loss_ssim,psnr_mean\n";
    char line[256];
    for (const MetricsRow& r : rows) {
        std::snprintf(line, sizeof(line), "%lld,%.17g,%.17g,%.17g,%.17g\n", r.step, r.loss, r.loss_recon,
                      r.loss_ssim, r.psnr_mean);
        out += line;
    }
    return out;
}

void save_checkpoint(const std::string& json_path, const TrainerState& ts) {
    namespace fs = std::filesystem;
    fs::path sidecar(json_path);
    fs::path scene_path = sidecar;
    scene_path.replace_extension(".scene");
    fs::path moments_path = sidecar;
    moments_path.replace_extension(".moments");

    write_scene(scene_path.string(), ts.scene);
    write_moments_file(moments_path.string(), ts);

    std::ostringstream rng_state;
    rng_state << ts.rng;

    nlohmann::json j;
    j["format"] = "holo-checkpoint";
    j["version"] = 1;
    j["step"] = ts.global_step;
    j["scene"] = scene_path.filename().string();
    j["moments"] = moments_path.filename().string();
    j["rng"] = rng_state.str();
    j["config_hash"] = hex64(ts.config_hash);

    FilePtr fp(std::fopen(json_path.c_str(), "wb"));
    if (!fp) throw HoloError("io", "cannot open for writing: " + json_path);
    const std::string text = j.dump(2) + "\n";
    write_raw(fp.get(), text.data(), text.size(), json_path);
    if (std::fflush(fp.get()) != 0) throw HoloError("io", "flush failed: " + json_path);
}

TrainerState load_checkpoint(const std::string& json_path) {
    namespace fs = std::filesystem;
    FilePtr fp(std::fopen(json_path.c_str(), "rb"));
    if (!fp) throw HoloError("io", "cannot open: " + json_path);
    std::string text;
    char buf[4096];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof(buf), fp.get())) > 0) text.append(buf, got);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw HoloError("io", "checkpoint sidecar is not valid JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "holo-checkpoint")
        throw HoloError("io", "not a checkpoint sidecar: " + json_path);

    const fs::path dir = fs::path(json_path).parent_path();
    TrainerState ts;
    try {
        ts.global_step = j.at("step").get<long long>();
        ts.scene = read_scene((dir / j.at("scene").get<std::string>()).string());
        read_moments_file((dir / j.at("moments").get<std::string>()).string(), ts);
        std::istringstream rng_state(j.at("rng").get<std::string>());
        rng_state >> ts.rng;
        if (rng_state.fail()) throw HoloError("io", "unreadable rng state in " + json_path);
        ts.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
    } catch (const nlohmann::json::exception& e) {
        throw HoloError("io", "checkpoint sidecar is missing fields: " + std::string(e.what()));
    }

    if (ts.optim.positions.m.size() != ts.scene.positions.size() ||
        ts.stats.grad_norm_sum.size() != ts.scene.size())
        throw HoloError("io", "checkpoint moments do not match the scene: " + json_path);
    return ts;
}

FocalStackTarget make_target_from_rgbd(const IntensityImage& rgb, const IntensityImage& depth,
                                       const CameraView& cam, const WaveConfig& cfg) {
    if (rgb.w != cfg.nx || rgb.h != cfg.ny || rgb.c != cfg.channels())
        throw HoloError("config", "rgb image shape does not match the grid");
    if (depth.w != cfg.nx || depth.h != cfg.ny || depth.c != 1)
        throw HoloError("config", "depth map must be single-channel at grid size");
    for (double v : rgb.data)
        if (!(v >= 0.0 && v <= 1.0)) throw HoloError("config", "rgb values must lie in [0,1]");
    for (double v : depth.data)
        if (!(v >= 0.0 && v <= 1.0)) throw HoloError("config", "depth values must lie in [0,1]");

    const int L = cfg.num_planes;
    FocalStackTarget t;
    t.camera = cam;
    t.images.assign(L, rgb);
    t.masks.assign(L, IntensityImage(cfg.nx, cfg.ny, 1));
    for (size_t p = 0; p < depth.data.size(); ++p) {
        const int bin = std::min(L - 1, static_cast<int>(depth.data[p] * L));
        t.masks[bin].data[p] = 1.0;
    }
    return t;
}

}  // namespace holo

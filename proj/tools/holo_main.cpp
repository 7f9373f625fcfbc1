#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "holo/field_io.hpp"
#include "holo/phase_only.hpp"
#include "holo/pipeline.hpp"
#include "holo/png_io.hpp"
#include "holo/run_config.hpp"
#include "holo/scene_io.hpp"
#include "holo/trainer.hpp"

using namespace holo;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// thread policy: HOLOFIELD_THREADS beats --threads beats the config value;
// zero leaves the OpenMP hardware default in place
int resolve_threads(int flag_threads, int config_threads) {
    if (const char* env = std::getenv("HOLOFIELD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    if (flag_threads > 0) return flag_threads;
    if (config_threads > 0) return config_threads;
    return 0;
}

void apply_threads(int t) {
    if (t > 0) omp_set_num_threads(t);
}

void print_json(const json& j) { std::cout << j.dump() << "\n"; }

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw HoloError("io", "cannot open for writing: " + path);
    out << text;
    if (!out) throw HoloError("io", "short write: " + path);
}

// deterministic synthetic content for bench and gradcheck: overlapping
// footprints, every plane populated
GaussianScene demo_scene(size_t n, const WaveConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uxy(-0.0125, 0.0125);
    std::uniform_real_distribution<double> uz(0.25, 0.45);
    std::uniform_real_distribution<double> uscale(0.003, 0.012);
    std::uniform_real_distribution<double> uamp(0.2, 1.0);
    std::uniform_real_distribution<double> uop(-2.0, 2.0);
    std::uniform_real_distribution<double> uphase(0.0, kTwoPi);
    std::normal_distribution<double> g(0.0, 1.0);

    GaussianScene s;
    s.num_planes = cfg.num_planes;
    s.resize(n);
    for (size_t i = 0; i < n; ++i) {
        s.positions[i * 3] = uxy(rng);
        s.positions[i * 3 + 1] = uxy(rng);
        s.positions[i * 3 + 2] = uz(rng);
        double q[4] = {g(rng), g(rng), g(rng), g(rng)};
        const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        for (int k = 0; k < 4; ++k) s.rotations[i * 4 + k] = norm > 1e-9 ? q[k] / norm : (k == 0 ? 1.0 : 0.0);
        for (int d = 0; d < 3; ++d) s.log_scales[i * 3 + d] = std::log(uscale(rng));
        for (int d = 0; d < 3; ++d) s.amplitudes[i * 3 + d] = uamp(rng);
        s.opacity_logits[i] = uop(rng);
        for (int d = 0; d < 3; ++d) s.phases[i * 3 + d] = uphase(rng);
        for (int l = 0; l < s.num_planes; ++l) s.plane_logits[i * s.num_planes + l] = 0.1 * l;
        s.plane_logits[i * s.num_planes + i % s.num_planes] = 2.0;
    }
    return s;
}

CameraView front_camera(const WaveConfig& cfg, double focal = 150.0) {
    CameraView cam;
    cam.focal_px = focal;
    cam.width = cfg.nx;
    cam.height = cfg.ny;
    return cam;
}

// fill missing wavelengths for containers carrying fewer channels than the
// three stock ones; more channels need explicit flags
std::vector<double> wavelengths_for(const std::vector<double>& flags, int channels) {
    if (!flags.empty()) {
        if (static_cast<int>(flags.size()) != channels)
            throw HoloError("usage", "need one --wavelength per field channel");
        return flags;
    }
    const std::vector<double> stock = {639e-9, 532e-9, 473e-9};
    if (channels > static_cast<int>(stock.size()))
        throw HoloError("usage", "more than three channels need explicit --wavelength flags");
    return {stock.begin(), stock.begin() + channels};
}

IntensityImage load_rgb_planes(const std::string& base) {
    IntensityImage rgb;
    for (int ch = 0; ch < 3; ++ch) {
        int w = 0, h = 0;
        std::vector<double> plane = read_gray16(channel_path(base, ch, 3), w, h);
        if (ch == 0) rgb = IntensityImage(w, h, 3);
        if (w != rgb.w || h != rgb.h) throw HoloError("io", "rgb channel sizes disagree: " + base);
        std::copy(plane.begin(), plane.end(), rgb.channel(ch));
    }
    return rgb;
}

// starting layout for imported supervision: unproject a random pixel per
// seed through the view, depth mapped onto the synthetic working distance;
// positions are free parameters, this only places the first guess
constexpr double kSeedNear = 0.25, kSeedFar = 0.45;

std::vector<SeedPoint> seeds_from_rgbd(const std::vector<FocalStackTarget>& views,
                                       const std::vector<IntensityImage>& rgbs,
                                       const std::vector<IntensityImage>& depths, size_t count,
                                       std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<SeedPoint> seeds;
    seeds.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        const size_t v = i % views.size();
        const CameraView& cam = views[v].camera;
        const IntensityImage& depth = depths[v];
        const int px = static_cast<int>(rng() % static_cast<std::uint64_t>(depth.w));
        const int py = static_cast<int>(rng() % static_cast<std::uint64_t>(depth.h));
        const double z = kSeedNear + depth.at(0, py, px) * (kSeedFar - kSeedNear);
        Eigen::Vector3d pc((px - cam.principal_x()) * z / cam.focal_px,
                           (py - cam.principal_y()) * z / cam.focal_px, z);
        SeedPoint s;
        s.pos = cam.rot_cam_to_world() * pc + cam.position();
        s.color = Eigen::Vector3d(rgbs[v].at(0, py, px), rgbs[v].at(1, py, px), rgbs[v].at(2, py, px));
        seeds.push_back(std::move(s));
    }
    return seeds;
}

std::vector<SeedPoint> seeds_from_scene_box(const GaussianScene& oracle, size_t count, std::uint64_t seed) {
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e30), hi = Eigen::Vector3d::Constant(-1e30);
    for (size_t i = 0; i < oracle.size(); ++i)
        for (int d = 0; d < 3; ++d) {
            lo[d] = std::min(lo[d], oracle.positions[i * 3 + d]);
            hi[d] = std::max(hi[d], oracle.positions[i * 3 + d]);
        }
    for (int d = 0; d < 3; ++d) {
        const double pad = std::max(0.05 * (hi[d] - lo[d]), 1e-4);
        lo[d] -= pad;
        hi[d] += pad;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<SeedPoint> seeds(count);
    for (SeedPoint& s : seeds)
        for (int d = 0; d < 3; ++d) s.pos[d] = lo[d] + uni(rng) * (hi[d] - lo[d]);
    return seeds;
}

json hash_report(const GaussianScene& s) {
    return {{"phase_hash", hex64(fnv1a64_vec(s.phases))},
            {"amplitude_hash", hex64(fnv1a64_vec(s.amplitudes))},
            {"plane_logits_hash", hex64(fnv1a64_vec(s.plane_logits))}};
}

// ---------------------------------------------------------------- train

int cmd_train(const std::string& config_path, int threads_flag) {
    RunConfig cfg = load_run_config(config_path);
    const int threads = resolve_threads(threads_flag, cfg.threads);
    apply_threads(threads);
    if (cfg.views.empty()) throw HoloError("config", "training needs at least one view");

    std::vector<FocalStackTarget> targets;
    std::vector<SeedPoint> seeds;
    if (!cfg.oracle_scene.empty()) {
        if (!fs::exists(cfg.oracle_scene))
            throw HoloError("config", "oracle scene not found: " + cfg.oracle_scene);
        const GaussianScene oracle = read_scene(cfg.oracle_scene);
        for (const CameraView& cam : cfg.views)
            targets.push_back(make_target_from_scene(oracle, cam, cfg.optics, cfg.hyper.pipeline));
        seeds = seeds_from_scene_box(oracle, static_cast<size_t>(cfg.init_gaussians), cfg.seed);
    } else if (!cfg.targets.empty()) {
        std::vector<IntensityImage> rgbs, depths;
        for (size_t v = 0; v < cfg.views.size(); ++v) {
            const auto& files = cfg.targets[v];
            if (!fs::exists(channel_path(files.rgb, 0, 3)) && !fs::exists(files.rgb))
                throw HoloError("config", "target image not found: " + files.rgb);
            rgbs.push_back(load_rgb_planes(files.rgb));
            int w = 0, h = 0;
            IntensityImage depth(0, 0, 1);
            depth.data = read_gray16(files.depth, w, h);
            depth.w = w;
            depth.h = h;
            depths.push_back(std::move(depth));
            targets.push_back(make_target_from_rgbd(rgbs.back(), depths.back(), cfg.views[v], cfg.optics));
        }
        seeds = seeds_from_rgbd(targets, rgbs, depths, static_cast<size_t>(cfg.init_gaussians), cfg.seed);
    } else {
        throw HoloError("config", "training needs paths.oracle_scene or paths.targets");
    }

    TrainerState state = TrainerState::fresh(init_scene(seeds, cfg.optics, cfg.seed), cfg.seed, cfg.hash);
    const TrainResult result = train(state, targets, cfg.optics, cfg.hyper);

    fs::create_directories(cfg.output_dir);
    const std::string checkpoint = (fs::path(cfg.output_dir) / "checkpoint.json").string();
    const std::string metrics = (fs::path(cfg.output_dir) / "metrics.csv").string();
    save_checkpoint(checkpoint, state);
    write_text_file(metrics, metrics_csv(result.metrics));

    const MetricsRow& final_row = result.metrics.back();
    json manifest = {{"command", "train"},
                     {"config_hash", hex64(cfg.hash)},
                     {"seed", cfg.seed},
                     {"threads", threads},
                     {"steps_run", result.steps_run},
                     {"densify_rounds", result.densify_rounds},
                     {"gaussians", state.scene.size()},
                     {"final", {{"loss", final_row.loss}, {"psnr_mean", final_row.psnr_mean}}},
                     {"artifacts", {checkpoint, metrics}}};
    write_text_file((fs::path(cfg.output_dir) / "run.json").string(), manifest.dump(2) + "\n");
    print_json(manifest);
    return 0;
}

// ---------------------------------------------------------------- render

int cmd_render(const std::string& config_path, const std::string& checkpoint_path, int view_index,
               const std::string& camera_json, const std::vector<double>& pose_flag, double focal_flag,
               std::string out_dir, bool composite, int threads_flag) {
    RunConfig cfg = load_run_config(config_path);
    apply_threads(resolve_threads(threads_flag, cfg.threads));

    const int specs = (view_index >= 0) + !camera_json.empty() + !pose_flag.empty();
    if (specs != 1)
        throw HoloError("usage", "give the camera exactly one way: --view-index, --camera or --pose");
    CameraView cam;
    if (view_index >= 0) {
        if (view_index >= static_cast<int>(cfg.views.size()))
            throw HoloError("usage", "view index out of range");
        cam = cfg.views[static_cast<size_t>(view_index)];
    } else if (!camera_json.empty()) {
        cam = parse_camera_json(camera_json, cfg.optics);
    } else {
        if (pose_flag.size() != 6) throw HoloError("usage", "--pose needs six numbers");
        std::copy(pose_flag.begin(), pose_flag.end(), cam.pose.begin());
        cam.focal_px = focal_flag;
        cam.width = cfg.optics.nx;
        cam.height = cfg.optics.ny;
    }
    cam.validate();

    TrainerState state = load_checkpoint(checkpoint_path);
    if (state.config_hash != cfg.hash)
        std::cerr << json{{"warning", "checkpoint was trained under a different config"}}.dump() << "\n";

    const PipelineForward fwd = pipeline_forward(state.scene, cam, cfg.optics, cfg.hyper.pipeline);

    if (out_dir.empty()) out_dir = (fs::path(cfg.output_dir) / "render").string();
    fs::create_directories(out_dir);
    const std::string tag = hex64(cfg.hash);
    const std::string holo_path = (fs::path(out_dir) / "hologram.hfld").string();
    write_field(holo_path, fwd.hologram);

    json files = json::array();
    files.push_back(holo_path);
    const int C = cfg.optics.channels();
    for (size_t l = 0; l < fwd.intensities.size(); ++l) {
        const IntensityImage& img = fwd.intensities[l];
        const std::string base = (fs::path(out_dir) / ("plane" + std::to_string(l) + ".png")).string();
        for (int ch = 0; ch < C; ++ch) {
            const std::string path = channel_path(base, ch, C);
            write_gray16(path, img.channel(ch), img.w, img.h, tag);
            files.push_back(path);
        }
        if (composite) {
            const std::string preview =
                (fs::path(out_dir) / ("plane" + std::to_string(l) + "_preview.png")).string();
            write_srgb8(preview, img, tag);
            files.push_back(preview);
        }
    }

    json report = hash_report(state.scene);
    report["command"] = "render";
    report["config_hash"] = tag;
    report["hologram_hash"] = hex64(fnv1a64_vec(fwd.hologram.data));
    report["planes"] = fwd.intensities.size();
    report["files"] = files;

    // against the matching training view the replay target is available,
    // so the render can restate the evaluation metric
    if (view_index >= 0 && !cfg.oracle_scene.empty() && fs::exists(cfg.oracle_scene)) {
        const GaussianScene oracle = read_scene(cfg.oracle_scene);
        const FocalStackTarget target = make_target_from_scene(oracle, cam, cfg.optics, cfg.hyper.pipeline);
        const LossBreakdown eval = total_loss(state.scene, cam, cfg.optics, target, cfg.hyper.pipeline);
        report["psnr_mean"] = eval.psnr_mean;
    }

    write_text_file((fs::path(out_dir) / "render.json").string(), report.dump(2) + "\n");
    print_json(report);
    return 0;
}

// ------------------------------------------------------------- propagate

int cmd_propagate(const std::string& in_path, const std::string& out_path, double z_meters,
                  double pixel_pitch, const std::vector<double>& wavelength_flags, bool pad2x,
                  bool local_band_limit, int threads_flag) {
    apply_threads(resolve_threads(threads_flag, 0));
    const ComplexField u = read_field(in_path, pixel_pitch);

    WaveConfig cfg;
    cfg.nx = u.w;
    cfg.ny = u.h;
    cfg.pitch = pixel_pitch;
    cfg.wavelengths = wavelengths_for(wavelength_flags, u.c);
    cfg.num_planes = 1;

    PropagationOptions opt;
    opt.pad2x = pad2x;
    opt.local_band_limit = local_band_limit;
    const ComplexField out = propagate(u, cfg, z_meters, opt);
    write_field(out_path, out);

    print_json({{"command", "propagate"},
                {"in", in_path},
                {"out", out_path},
                {"z_meters", z_meters},
                {"energy_in", energy(u)},
                {"energy_out", energy(out)}});
    return 0;
}

// ------------------------------------------------------------ phase-only

int cmd_phase_only(const std::string& in_path, const std::string& out_path, int iters, int bits,
                   double lr, double lambda_ssim, bool no_pad, const std::string& config_path,
                   double pixel_pitch, int threads_flag) {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    apply_threads(resolve_threads(threads_flag, cfg.threads));
    if (bits != 8 && bits != 10) throw HoloError("usage", "--bits must be 8 or 10");

    const double pitch = pixel_pitch > 0.0 ? pixel_pitch : cfg.optics.pitch;
    const ComplexField P = read_field(in_path, pitch);
    WaveConfig optics = cfg.optics;
    optics.nx = P.w;
    optics.ny = P.h;
    optics.pitch = pitch;
    if (optics.channels() != P.c) optics.wavelengths = wavelengths_for({}, P.c);

    PhaseOnlyOptions opt;
    opt.lambda_ssim = lambda_ssim;
    if (no_pad) opt.prop.pad2x = false;
    const PhaseOnlyResult res = convert_phase_only(P, optics, iters, lr, opt);

    const std::string tag = config_path.empty() ? std::string{} : hex64(cfg.hash);
    json files = json::array();
    for (int ch = 0; ch < P.c; ++ch) {
        const std::string path = channel_path(out_path, ch, P.c);
        write_phase_png(path, res.hologram.phase.data() + static_cast<size_t>(ch) * P.h * P.w, P.w, P.h,
                        bits, tag);
        files.push_back(path);
    }

    const double init = res.trace.front();
    const double best = *std::min_element(res.trace.begin(), res.trace.end());
    print_json({{"command", "phase-only"},
                {"iterations", iters},
                {"bits", bits},
                {"initial_loss", init},
                {"final_loss", best},
                {"ratio", init > 0.0 ? best / init : 0.0},
                {"files", files}});
    return 0;
}

// -------------------------------------------------------------- gradcheck

struct GradGroup {
    const char* name;
    std::vector<double> GaussianScene::* field;
    std::vector<double> SceneGradients::* grad;
    bool soft;  // audit under the relaxed plane assignment
};

int cmd_gradcheck(std::uint64_t seed, int gaussians, int grid, int planes, int samples, double fd_step,
                  bool flip_phase_grad, int threads_flag) {
    apply_threads(resolve_threads(threads_flag, 0));
    if (grid < 8 || grid > 64) throw HoloError("usage", "--grid must stay within the 8..64 oracle guard");
    if (planes < 1 || gaussians < 0 || samples < 1 || fd_step <= 0.0)
        throw HoloError("usage", "bad gradcheck sizes");

    if (gaussians == 0) {
        std::cout << "warning: empty scene, nothing to differentiate\n";
        std::cout << "PASS (vacuous)\n";
        return 0;
    }

    WaveConfig cfg;
    cfg.nx = cfg.ny = grid;
    cfg.num_planes = planes;
    const CameraView cam = front_camera(cfg);

    // smooth rasterizer variant: thresholds and early exits off so central
    // differences see a differentiable function
    PipelineOptions opt;
    opt.raster.alpha_floor = 0.0;
    opt.raster.term_eps = 0.0;
    opt.raster.radius_form_cap = 80.0;

    // the hard plane pick trains through a straight-through surrogate, so
    // its finite-difference audit runs in the relaxed assignment mode where
    // forward and backward describe the same function
    PipelineOptions opt_soft = opt;
    opt_soft.raster.soft_assignment = true;

    GaussianScene scene = demo_scene(static_cast<size_t>(gaussians), cfg, seed);
    const FocalStackTarget target =
        make_target_from_scene(demo_scene(static_cast<size_t>(gaussians), cfg, seed + 1), cam, cfg, opt);

    SceneGradients grads, grads_soft;
    total_loss(scene, cam, cfg, target, opt, &grads);
    total_loss(scene, cam, cfg, target, opt_soft, &grads_soft);
    if (flip_phase_grad)
        for (double& v : grads.phases) v = -v;

    const GradGroup groups[] = {
        {"position", &GaussianScene::positions, &SceneGradients::positions, false},
        {"rotation", &GaussianScene::rotations, &SceneGradients::rotations, false},
        {"log_scale", &GaussianScene::log_scales, &SceneGradients::log_scales, false},
        {"amplitude", &GaussianScene::amplitudes, &SceneGradients::amplitudes, false},
        {"opacity", &GaussianScene::opacity_logits, &SceneGradients::opacity_logits, false},
        {"phase", &GaussianScene::phases, &SceneGradients::phases, false},
        {"plane_logit", &GaussianScene::plane_logits, &SceneGradients::plane_logits, true},
    };

    // same acceptance rule as the test suites: |a - fd| <= rel * max(|a|,
    // |fd|) + floor, reported as the equivalent normalized quotient
    const double rel_tol = 1e-4, abs_floor = 1e-8;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    bool all_pass = true;
    std::string worst_group;
    for (const GradGroup& grp : groups) {
        const PipelineOptions& fd_opt = grp.soft ? opt_soft : opt;
        const std::vector<double>& analytic = (grp.soft ? grads_soft : grads).*(grp.grad);
        const size_t len = analytic.size();
        double max_rel = 0.0;
        for (int k = 0; k < samples; ++k) {
            const size_t idx = rng() % len;
            GaussianScene probe = scene;
            (probe.*(grp.field))[idx] += fd_step;
            const double up = total_loss(probe, cam, cfg, target, fd_opt).total;
            (probe.*(grp.field))[idx] -= 2.0 * fd_step;
            const double down = total_loss(probe, cam, cfg, target, fd_opt).total;
            const double fd = (up - down) / (2.0 * fd_step);
            const double denom = std::max(std::abs(analytic[idx]), std::abs(fd)) + abs_floor / rel_tol;
            max_rel = std::max(max_rel, std::abs(analytic[idx] - fd) / denom);
        }
        const bool pass = max_rel < rel_tol;
        if (!pass && all_pass) worst_group = grp.name;
        all_pass = all_pass && pass;
        std::printf("%-12s max_rel %.3e %s\n", grp.name, max_rel, pass ? "ok" : "MISMATCH");
    }
    if (all_pass) {
        std::cout << "PASS\n";
        return 0;
    }
    std::cout << "FAIL " << worst_group << "\n";
    return 1;
}

// ------------------------------------------------------------------ bench

int cmd_bench(const std::string& config_path, std::vector<long long> n_list, std::vector<int> l_list,
              int grid, const std::string& out_path, int threads_flag) {
    RunConfig cfg;
    if (!config_path.empty()) {
        cfg = load_run_config(config_path);
    } else {
        cfg.optics.nx = cfg.optics.ny = grid;
        const std::string canonical = dump_run_config(cfg);
        cfg.hash = fnv1a64(canonical.data(), canonical.size());
    }
    apply_threads(resolve_threads(threads_flag, cfg.threads));
    if (n_list.empty()) n_list = {10000, 20000, 40000, 80000};
    if (l_list.empty()) l_list = {1, 2, 4, 8};

    const CameraView cam = front_camera(cfg.optics);
    std::string csv = "# config " + hex64(cfg.hash) + "\n";
    csv += "n,l,raster_seconds,record_seconds,total_seconds\n";
    for (int L : l_list) {
        if (L < 1) throw HoloError("usage", "plane counts must be positive");
        WaveConfig optics = cfg.optics;
        optics.num_planes = L;
        for (long long n : n_list) {
            if (n < 0) throw HoloError("usage", "gaussian counts must be non-negative");
            const GaussianScene scene = demo_scene(static_cast<size_t>(n), optics, 1234 + L);
            const auto t0 = std::chrono::steady_clock::now();
            const RasterForward fwd = raster_forward(scene, cam, optics, cfg.hyper.pipeline.raster);
            const auto t1 = std::chrono::steady_clock::now();
            const ComplexField holo = forward_record(fwd.layers, optics, cfg.hyper.pipeline.prop);
            const auto t2 = std::chrono::steady_clock::now();
            (void)holo;
            const double raster_s = std::chrono::duration<double>(t1 - t0).count();
            const double record_s = std::chrono::duration<double>(t2 - t1).count();
            char line[128];
            std::snprintf(line, sizeof(line), "%lld,%d,%.6f,%.6f,%.6f\n", n, L, raster_s, record_s,
                          raster_s + record_s);
            csv += line;
        }
    }
    if (out_path.empty())
        std::cout << csv;
    else
        write_text_file(out_path, csv);
    return 0;
}

// ------------------------------------------------------------------ stats

json histogram(const std::vector<double>& values, double lo, double hi) {
    std::vector<long long> counts(16, 0);
    const double span = hi - lo;
    for (double v : values) {
        int bin = span > 0.0 ? static_cast<int>((v - lo) / span * 16.0) : 0;
        counts[std::clamp(bin, 0, 15)] += 1;
    }
    return {{"lo", lo}, {"hi", hi}, {"counts", counts}};
}

json data_histogram(const std::vector<double>& values) {
    if (values.empty()) return histogram(values, 0.0, 0.0);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return histogram(values, *mn, *mx);
}

int cmd_stats(const std::string& checkpoint_path, const std::string& scene_path,
              const std::string& out_path, int threads_flag) {
    apply_threads(resolve_threads(threads_flag, 0));
    if (checkpoint_path.empty() == scene_path.empty())
        throw HoloError("usage", "give exactly one of --checkpoint or --scene");

    GaussianScene scene;
    json report = {{"command", "stats"}};
    if (!checkpoint_path.empty()) {
        TrainerState state = load_checkpoint(checkpoint_path);
        scene = std::move(state.scene);
        report["config_hash"] = hex64(state.config_hash);
        report["step"] = state.global_step;
    } else {
        scene = read_scene(scene_path);
    }

    const size_t n = scene.size();
    std::vector<double> phases(scene.phases.size());
    for (size_t i = 0; i < phases.size(); ++i) phases[i] = wrap_phase(scene.phases[i]);
    std::vector<double> opacities(n);
    for (size_t i = 0; i < n; ++i) opacities[i] = sigmoid(scene.opacity_logits[i]);
    std::vector<double> scales(scene.log_scales.size());
    for (size_t i = 0; i < scales.size(); ++i) scales[i] = std::exp(scene.log_scales[i]);
    std::vector<double> depths(n);
    for (size_t i = 0; i < n; ++i) depths[i] = scene.positions[i * 3 + 2];

    report["gaussians"] = n;
    report["num_planes"] = scene.num_planes;
    report["histograms"] = {{"phase", histogram(phases, 0.0, kTwoPi)},
                            {"amplitude", data_histogram(scene.amplitudes)},
                            {"opacity", histogram(opacities, 0.0, 1.0)},
                            {"scale", data_histogram(scales)},
                            {"depth", data_histogram(depths)}};

    // hard plane pick, ties to the lowest index like the forward pass
    std::vector<long long> plane_counts(static_cast<size_t>(scene.num_planes), 0);
    for (size_t i = 0; i < n; ++i) {
        const double* row = &scene.plane_logits[i * static_cast<size_t>(scene.num_planes)];
        int best = 0;
        for (int l = 1; l < scene.num_planes; ++l)
            if (row[l] > row[best]) best = l;
        plane_counts[static_cast<size_t>(best)] += 1;
    }
    report["plane_counts"] = plane_counts;

    const std::string text = report.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_file(out_path, text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex-valued holographic gaussian pipeline"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads, 0 = hardware (HOLOFIELD_THREADS overrides)");

    // train
    auto* train_cmd = app.add_subcommand("train", "optimize a scene against focal-stack targets");
    std::string train_config;
    train_cmd->add_option("--config", train_config, "run configuration JSON")->required();

    // render
    auto* render_cmd = app.add_subcommand("render", "write the hologram and focal stack of a checkpoint");
    std::string render_config, render_checkpoint, render_camera, render_out;
    int render_view = -1;
    std::vector<double> render_pose;
    double render_focal = 150.0;
    bool render_composite = false;
    render_cmd->add_option("--config", render_config, "run configuration JSON")->required();
    render_cmd->add_option("--checkpoint", render_checkpoint, "checkpoint sidecar path")->required();
    render_cmd->add_option("--view-index", render_view, "camera index into the config views");
    render_cmd->add_option("--camera", render_camera, "camera as a JSON fragment");
    render_cmd->add_option("--pose", render_pose, "x y z yaw pitch roll (meters, radians)")->expected(6);
    render_cmd->add_option("--focal-px", render_focal, "focal length in pixels, used with --pose");
    render_cmd->add_option("--out-dir", render_out, "output directory (default <output_dir>/render)");
    render_cmd->add_flag("--composite", render_composite, "also write 8 bit sRGB previews");

    // propagate
    auto* prop_cmd = app.add_subcommand("propagate", "angular-spectrum propagation of a stored field");
    std::string prop_in, prop_out;
    double prop_z = 0.0, prop_pitch = 3.74e-6;
    std::vector<double> prop_wavelengths;
    bool prop_pad = false, prop_lbl = false;
    prop_cmd->add_option("--in", prop_in, "input field container")->required();
    prop_cmd->add_option("--out", prop_out, "output field container")->required();
    prop_cmd->add_option("--z-meters", prop_z, "propagation distance in meters")->required();
    prop_cmd->add_option("--pixel-pitch", prop_pitch, "pixel pitch in meters");
    prop_cmd->add_option("--wavelength", prop_wavelengths, "wavelength in meters, one per channel");
    prop_cmd->add_flag("--pad2x", prop_pad, "zero-pad to twice the extent during the transform");
    prop_cmd->add_flag("--local-band-limit", prop_lbl, "extra local frequency limit for long throws");

    // phase-only
    auto* po_cmd = app.add_subcommand("phase-only", "convert a complex hologram to a phase-only one");
    std::string po_in, po_out, po_config;
    int po_iters = 1000, po_bits = 8;
    double po_lr = 0.02, po_lambda = 1.0, po_pitch = 0.0;
    bool po_no_pad = false;
    po_cmd->add_option("--in", po_in, "input field container")->required();
    po_cmd->add_option("--out", po_out, "output phase PNG base name")->required();
    po_cmd->add_option("--iters", po_iters, "optimization iterations");
    po_cmd->add_option("--bits", po_bits, "phase quantization depth, 8 or 10");
    po_cmd->add_option("--lr", po_lr, "step size");
    po_cmd->add_option("--lambda-ssim", po_lambda, "structural term weight");
    po_cmd->add_option("--config", po_config, "run configuration JSON for the optics");
    po_cmd->add_option("--pixel-pitch", po_pitch, "pixel pitch in meters (overrides the config)");
    po_cmd->add_flag("--no-pad", po_no_pad, "match on the periodic grid instead of the padded one");

    // gradcheck
    auto* gc_cmd = app.add_subcommand("gradcheck", "finite-difference audit of the analytic gradients");
    std::uint64_t gc_seed = 1;
    int gc_gaussians = 12, gc_grid = 32, gc_planes = 2, gc_samples = 8;
    double gc_step = 1e-5;
    bool gc_flip = false;
    gc_cmd->add_option("--seed", gc_seed, "rng seed");
    gc_cmd->add_option("--gaussians", gc_gaussians, "scene size");
    gc_cmd->add_option("--grid", gc_grid, "grid resolution, 8..64");
    gc_cmd->add_option("--planes", gc_planes, "depth planes");
    gc_cmd->add_option("--samples", gc_samples, "finite-difference probes per group");
    gc_cmd->add_option("--fd-step", gc_step, "central difference step");
    gc_cmd->add_flag("--flip-phase-grad", gc_flip, "negate the analytic phase gradients (harness fault injection)")
        ->group("");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "wall-time scaling of rasterization and recording");
    std::string bench_config, bench_out;
    std::vector<long long> bench_n;
    std::vector<int> bench_l;
    int bench_grid = 512;
    bench_cmd->add_option("--config", bench_config, "run configuration JSON");
    bench_cmd->add_option("--n-list", bench_n, "gaussian counts to measure")->delimiter(',');
    bench_cmd->add_option("--l-list", bench_l, "plane counts to measure")->delimiter(',');
    bench_cmd->add_option("--grid", bench_grid, "resolution when no config is given");
    bench_cmd->add_option("--out", bench_out, "CSV path (default stdout)");

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "parameter histograms and plane usage of a scene");
    std::string stats_checkpoint, stats_scene, stats_out;
    stats_cmd->add_option("--checkpoint", stats_checkpoint, "checkpoint sidecar path");
    stats_cmd->add_option("--scene", stats_scene, "scene container path");
    stats_cmd->add_option("--out", stats_out, "JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }

    try {
        if (*train_cmd) return cmd_train(train_config, threads);
        if (*render_cmd)
            return cmd_render(render_config, render_checkpoint, render_view, render_camera, render_pose,
                              render_focal, render_out, render_composite, threads);
        if (*prop_cmd)
            return cmd_propagate(prop_in, prop_out, prop_z, prop_pitch, prop_wavelengths, prop_pad,
                                 prop_lbl, threads);
        if (*po_cmd)
            return cmd_phase_only(po_in, po_out, po_iters, po_bits, po_lr, po_lambda, po_no_pad, po_config,
                                  po_pitch, threads);
        if (*gc_cmd)
            return cmd_gradcheck(gc_seed, gc_gaussians, gc_grid, gc_planes, gc_samples, gc_step, gc_flip,
                                 threads);
        if (*bench_cmd) return cmd_bench(bench_config, bench_n, bench_l, bench_grid, bench_out, threads);
        if (*stats_cmd) return cmd_stats(stats_checkpoint, stats_scene, stats_out, threads);
    } catch (const HoloError& e) {
        std::cerr << json{{"error", {{"kind", e.kind}, {"message", e.what()}}}}.dump() << "\n";
        return (e.kind == "config_not_found" || e.kind == "config" || e.kind == "usage") ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}

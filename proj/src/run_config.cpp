#include "holo/run_config.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace holo {

namespace {

using nlohmann::json;

void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw HoloError("config", where + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) throw HoloError("config", "unknown key '" + it.key() + "' in " + where);
    }
}

double get_num(const json& j, const char* key, double fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw HoloError("config", where + "." + key + " must be a number");
    return v.get<double>();
}

long long get_int(const json& j, const char* key, long long fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw HoloError("config", where + "." + key + " must be an integer");
    return v.get<long long>();
}

bool get_bool(const json& j, const char* key, bool fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_boolean()) throw HoloError("config", where + "." + key + " must be a boolean");
    return v.get<bool>();
}

std::string get_str(const json& j, const char* key, const std::string& fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw HoloError("config", where + "." + key + " must be a string");
    return v.get<std::string>();
}

void parse_optics(const json& j, WaveConfig& w) {
    expect_keys(j, {"grid_width", "grid_height", "pixel_pitch_m", "wavelengths_m", "distance_m",
                    "volume_depth_m", "num_planes"},
                "optics");
    w.nx = static_cast<int>(get_int(j, "grid_width", w.nx, "optics"));
    w.ny = static_cast<int>(get_int(j, "grid_height", w.ny, "optics"));
    w.pitch = get_num(j, "pixel_pitch_m", w.pitch, "optics");
    w.distance = get_num(j, "distance_m", w.distance, "optics");
    w.volume_depth = get_num(j, "volume_depth_m", w.volume_depth, "optics");
    w.num_planes = static_cast<int>(get_int(j, "num_planes", w.num_planes, "optics"));
    if (j.contains("wavelengths_m")) {
        const json& a = j.at("wavelengths_m");
        if (!a.is_array() || a.empty()) throw HoloError("config", "optics.wavelengths_m must be a non-empty array");
        w.wavelengths.clear();
        for (const json& v : a) {
            if (!v.is_number()) throw HoloError("config", "optics.wavelengths_m entries must be numbers");
            w.wavelengths.push_back(v.get<double>());
        }
    }
}

void parse_optimizer(const json& j, OptimizerConfig& o) {
    expect_keys(j, {"lr_positions", "lr_rotations", "lr_log_scales", "lr_amplitudes", "lr_phases",
                    "lr_opacities", "lr_plane_logits", "beta1", "beta2", "beta3", "eps", "use_adam",
                    "schedule_total", "lr_floor"},
                "training.optimizer");
    const std::string w = "training.optimizer";
    o.lr_positions = get_num(j, "lr_positions", o.lr_positions, w);
    o.lr_rotations = get_num(j, "lr_rotations", o.lr_rotations, w);
    o.lr_log_scales = get_num(j, "lr_log_scales", o.lr_log_scales, w);
    o.lr_amplitudes = get_num(j, "lr_amplitudes", o.lr_amplitudes, w);
    o.lr_phases = get_num(j, "lr_phases", o.lr_phases, w);
    o.lr_opacities = get_num(j, "lr_opacities", o.lr_opacities, w);
    o.lr_plane_logits = get_num(j, "lr_plane_logits", o.lr_plane_logits, w);
    o.beta1 = get_num(j, "beta1", o.beta1, w);
    o.beta2 = get_num(j, "beta2", o.beta2, w);
    o.beta3 = get_num(j, "beta3", o.beta3, w);
    o.eps = get_num(j, "eps", o.eps, w);
    o.use_adam = get_bool(j, "use_adam", o.use_adam, w);
    o.schedule_total = get_int(j, "schedule_total", o.schedule_total, w);
    o.lr_floor = get_num(j, "lr_floor", o.lr_floor, w);
}

void parse_densify(const json& j, TrainHyper& h) {
    expect_keys(j, {"interval", "start", "until", "grad_threshold", "scale_threshold_frac",
                    "prune_opacity", "prune_scale_frac", "split_shrink", "perturb_sigma"},
                "training.densify");
    const std::string w = "training.densify";
    h.densify_interval = get_int(j, "interval", h.densify_interval, w);
    h.densify_start = get_int(j, "start", h.densify_start, w);
    h.densify_until = get_int(j, "until", h.densify_until, w);
    h.densify.grad_threshold = get_num(j, "grad_threshold", h.densify.grad_threshold, w);
    h.densify.scale_threshold_frac = get_num(j, "scale_threshold_frac", h.densify.scale_threshold_frac, w);
    h.densify.prune_opacity = get_num(j, "prune_opacity", h.densify.prune_opacity, w);
    h.densify.prune_scale_frac = get_num(j, "prune_scale_frac", h.densify.prune_scale_frac, w);
    h.densify.split_shrink = get_num(j, "split_shrink", h.densify.split_shrink, w);
    h.densify.perturb_sigma = get_num(j, "perturb_sigma", h.densify.perturb_sigma, w);
}

void parse_training(const json& j, RunConfig& c) {
    expect_keys(j, {"steps", "random_views", "lambda_ssim", "lambda_opacity", "use_plain_mse",
                    "init_gaussians", "optimizer", "densify"},
                "training");
    TrainHyper& h = c.hyper;
    h.steps = get_int(j, "steps", h.steps, "training");
    h.random_views = get_bool(j, "random_views", h.random_views, "training");
    h.pipeline.lambda_ssim = get_num(j, "lambda_ssim", h.pipeline.lambda_ssim, "training");
    h.pipeline.lambda_opacity = get_num(j, "lambda_opacity", h.pipeline.lambda_opacity, "training");
    h.pipeline.use_plain_mse = get_bool(j, "use_plain_mse", h.pipeline.use_plain_mse, "training");
    c.init_gaussians = get_int(j, "init_gaussians", c.init_gaussians, "training");
    if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), h.optim);
    if (j.contains("densify")) parse_densify(j.at("densify"), h);
}

void parse_raster(const json& j, RenderSettings& r) {
    expect_keys(j, {"near_clip_m", "dilation_px2", "plane_eps", "term_eps", "alpha_floor",
                    "alpha_clamp", "radius_form_cap", "ste_tau"},
                "raster");
    const std::string w = "raster";
    r.near_clip = get_num(j, "near_clip_m", r.near_clip, w);
    r.dilation = get_num(j, "dilation_px2", r.dilation, w);
    r.plane_eps = get_num(j, "plane_eps", r.plane_eps, w);
    r.term_eps = get_num(j, "term_eps", r.term_eps, w);
    r.alpha_floor = get_num(j, "alpha_floor", r.alpha_floor, w);
    r.alpha_clamp = get_num(j, "alpha_clamp", r.alpha_clamp, w);
    r.radius_form_cap = get_num(j, "radius_form_cap", r.radius_form_cap, w);
    r.ste_tau = get_num(j, "ste_tau", r.ste_tau, w);
}

CameraView parse_view(const json& j, const WaveConfig& optics, size_t index) {
    const std::string w = "views[" + std::to_string(index) + "]";
    expect_keys(j, {"pose", "focal_px", "cx", "cy"}, w);
    CameraView cam;
    if (!j.contains("pose")) throw HoloError("config", w + " needs a pose");
    const json& p = j.at("pose");
    if (!p.is_array() || p.size() != 6) throw HoloError("config", w + ".pose must have six entries");
    for (size_t i = 0; i < 6; ++i) {
        if (!p[i].is_number()) throw HoloError("config", w + ".pose entries must be numbers");
        cam.pose[i] = p[i].get<double>();
    }
    cam.focal_px = get_num(j, "focal_px", cam.focal_px, w);
    cam.cx = get_num(j, "cx", cam.cx, w);
    cam.cy = get_num(j, "cy", cam.cy, w);
    cam.width = optics.nx;
    cam.height = optics.ny;
    return cam;
}

void parse_paths(const json& j, RunConfig& c) {
    expect_keys(j, {"output_dir", "oracle_scene", "targets"}, "paths");
    c.output_dir = get_str(j, "output_dir", c.output_dir, "paths");
    c.oracle_scene = get_str(j, "oracle_scene", c.oracle_scene, "paths");
    if (j.contains("targets")) {
        const json& a = j.at("targets");
        if (!a.is_array()) throw HoloError("config", "paths.targets must be an array");
        for (size_t i = 0; i < a.size(); ++i) {
            const std::string w = "paths.targets[" + std::to_string(i) + "]";
            expect_keys(a[i], {"rgb", "depth"}, w);
            RunConfig::TargetFiles t;
            t.rgb = get_str(a[i], "rgb", "", w);
            t.depth = get_str(a[i], "depth", "", w);
            if (t.rgb.empty() || t.depth.empty()) throw HoloError("config", w + " needs rgb and depth paths");
            c.targets.push_back(std::move(t));
        }
    }
}

}  // namespace

void RunConfig::validate() const {
    optics.validate();
    if (hyper.steps < 0) throw HoloError("config", "training.steps must be non-negative");
    if (init_gaussians < 1) throw HoloError("config", "training.init_gaussians must be positive");
    const OptimizerConfig& o = hyper.optim;
    for (double lr : {o.lr_positions, o.lr_rotations, o.lr_log_scales, o.lr_amplitudes, o.lr_phases,
                      o.lr_opacities, o.lr_plane_logits})
        if (!(lr > 0.0)) throw HoloError("config", "learning rates must be positive");
    for (double b : {o.beta1, o.beta2, o.beta3})
        if (!(b >= 0.0 && b < 1.0)) throw HoloError("config", "betas must lie in [0, 1)");
    if (!(o.eps > 0.0)) throw HoloError("config", "optimizer eps must be positive");
    if (hyper.densify_interval < 0) throw HoloError("config", "training.densify.interval must be non-negative");
    if (hyper.pipeline.lambda_ssim < 0.0 || hyper.pipeline.lambda_opacity < 0.0)
        throw HoloError("config", "loss weights must be non-negative");
    if (!targets.empty() && targets.size() != views.size())
        throw HoloError("config", "paths.targets must pair up with views");
    for (size_t i = 0; i < views.size(); ++i)
        if (!(views[i].focal_px > 0.0))
            throw HoloError("config", "views[" + std::to_string(i) + "].focal_px must be positive");
    if (threads < 0) throw HoloError("config", "threads must be non-negative");
}

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw HoloError("config", std::string("config is not valid JSON: ") + e.what());
    }
    expect_keys(j, {"optics", "training", "raster", "propagation", "views", "paths", "seed", "threads"},
                "config");

    RunConfig c;
    if (j.contains("optics")) parse_optics(j.at("optics"), c.optics);
    if (j.contains("training")) parse_training(j.at("training"), c);
    if (j.contains("raster")) parse_raster(j.at("raster"), c.hyper.pipeline.raster);
    if (j.contains("propagation")) {
        const json& p = j.at("propagation");
        expect_keys(p, {"pad2x", "local_band_limit"}, "propagation");
        c.hyper.pipeline.prop.pad2x = get_bool(p, "pad2x", c.hyper.pipeline.prop.pad2x, "propagation");
        c.hyper.pipeline.prop.local_band_limit =
            get_bool(p, "local_band_limit", c.hyper.pipeline.prop.local_band_limit, "propagation");
    }
    if (j.contains("views")) {
        const json& a = j.at("views");
        if (!a.is_array()) throw HoloError("config", "views must be an array");
        for (size_t i = 0; i < a.size(); ++i) c.views.push_back(parse_view(a[i], c.optics, i));
    }
    if (j.contains("paths")) parse_paths(j.at("paths"), c);
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw HoloError("config", "seed must be an integer");
        c.seed = v.get<std::uint64_t>();
    }
    c.threads = static_cast<int>(get_int(j, "threads", c.threads, "config"));

    c.validate();
    const std::string canonical = dump_run_config(c);
    c.hash = fnv1a64(canonical.data(), canonical.size());
    return c;
}

CameraView parse_camera_json(const std::string& json_text, const WaveConfig& optics) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw HoloError("usage", std::string("camera spec is not valid JSON: ") + e.what());
    }
    try {
        return parse_view(j, optics, 0);
    } catch (const HoloError& e) {
        throw HoloError("usage", e.what());
    }
}

RunConfig load_run_config(const std::string& path) {
    if (!std::filesystem::exists(path)) throw HoloError("config_not_found", "config file not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw HoloError("io", "cannot open: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_run_config(text.str());
}

std::string dump_run_config(const RunConfig& c) {
    json j;
    j["optics"] = {{"grid_width", c.optics.nx},
                   {"grid_height", c.optics.ny},
                   {"pixel_pitch_m", c.optics.pitch},
                   {"wavelengths_m", c.optics.wavelengths},
                   {"distance_m", c.optics.distance},
                   {"volume_depth_m", c.optics.volume_depth},
                   {"num_planes", c.optics.num_planes}};
    const OptimizerConfig& o = c.hyper.optim;
    j["training"] = {{"steps", c.hyper.steps},
                     {"random_views", c.hyper.random_views},
                     {"lambda_ssim", c.hyper.pipeline.lambda_ssim},
                     {"lambda_opacity", c.hyper.pipeline.lambda_opacity},
                     {"use_plain_mse", c.hyper.pipeline.use_plain_mse},
                     {"init_gaussians", c.init_gaussians},
                     {"optimizer",
                      {{"lr_positions", o.lr_positions},
                       {"lr_rotations", o.lr_rotations},
                       {"lr_log_scales", o.lr_log_scales},
                       {"lr_amplitudes", o.lr_amplitudes},
                       {"lr_phases", o.lr_phases},
                       {"lr_opacities", o.lr_opacities},
                       {"lr_plane_logits", o.lr_plane_logits},
                       {"beta1", o.beta1},
                       {"beta2", o.beta2},
                       {"beta3", o.beta3},
                       {"eps", o.eps},
                       {"use_adam", o.use_adam},
                       {"schedule_total", o.schedule_total},
                       {"lr_floor", o.lr_floor}}},
                     {"densify",
                      {{"interval", c.hyper.densify_interval},
                       {"start", c.hyper.densify_start},
                       {"until", c.hyper.densify_until},
                       {"grad_threshold", c.hyper.densify.grad_threshold},
                       {"scale_threshold_frac", c.hyper.densify.scale_threshold_frac},
                       {"prune_opacity", c.hyper.densify.prune_opacity},
                       {"prune_scale_frac", c.hyper.densify.prune_scale_frac},
                       {"split_shrink", c.hyper.densify.split_shrink},
                       {"perturb_sigma", c.hyper.densify.perturb_sigma}}}};
    const RenderSettings& r = c.hyper.pipeline.raster;
    j["raster"] = {{"near_clip_m", r.near_clip},   {"dilation_px2", r.dilation},
                   {"plane_eps", r.plane_eps},     {"term_eps", r.term_eps},
                   {"alpha_floor", r.alpha_floor}, {"alpha_clamp", r.alpha_clamp},
                   {"radius_form_cap", r.radius_form_cap}, {"ste_tau", r.ste_tau}};
    j["propagation"] = {{"pad2x", c.hyper.pipeline.prop.pad2x},
                        {"local_band_limit", c.hyper.pipeline.prop.local_band_limit}};
    j["views"] = json::array();
    for (const CameraView& v : c.views) {
        json jv = {{"pose", v.pose}, {"focal_px", v.focal_px}};
        if (v.cx >= 0.0) jv["cx"] = v.cx;
        if (v.cy >= 0.0) jv["cy"] = v.cy;
        j["views"].push_back(std::move(jv));
    }
    j["paths"] = {{"output_dir", c.output_dir}};
    if (!c.oracle_scene.empty()) j["paths"]["oracle_scene"] = c.oracle_scene;
    if (!c.targets.empty()) {
        json a = json::array();
        for (const auto& t : c.targets) a.push_back({{"rgb", t.rgb}, {"depth", t.depth}});
        j["paths"]["targets"] = std::move(a);
    }
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    return j.dump(2) + "\n";
}

}  // namespace holo

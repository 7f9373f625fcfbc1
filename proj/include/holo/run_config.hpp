#pragma once

#include <string>
#include <vector>

#include "holo/camera.hpp"
#include "holo/trainer.hpp"
#include "holo/wave_config.hpp"

namespace holo {

// One JSON document drives a whole run: optical geometry, training
// hyperparameters, cameras, file paths, seed and thread policy.  Parsing
// is strict: unknown keys are rejected so typos fail loudly instead of
// silently falling back to defaults.
//
// Units are encoded in the key names: *_m is meters, pose entries are
// [x_m, y_m, z_m, yaw_rad, pitch_rad, roll_rad], focal lengths are pixels.
// Every omitted key takes the documented default, and the config hash is
// computed over the canonical serialization with defaults filled in, so
// formatting, key order and spelled-out defaults do not change it.
struct RunConfig {
    WaveConfig optics;
    TrainHyper hyper;
    long long init_gaussians = 2000;
    std::vector<CameraView> views;

    // optional imported supervision, one RGB + depth pair per view
    struct TargetFiles {
        std::string rgb, depth;
    };
    std::vector<TargetFiles> targets;

    std::string output_dir = "out";
    std::string oracle_scene;  // scene container rendered into targets when set
    std::uint64_t seed = 1234;
    int threads = 0;  // 0 = hardware concurrency

    std::uint64_t hash = 0;  // derived, not a config key

    void validate() const;  // throws HoloError("config", ...)
};

RunConfig parse_run_config(const std::string& json_text);

// missing file throws HoloError("config_not_found", ...), everything else
// follows parse_run_config
RunConfig load_run_config(const std::string& path);

// canonical serialization (sorted keys, defaults filled in); feeding it
// back through parse_run_config reproduces the config and its hash
std::string dump_run_config(const RunConfig& c);

// one camera as a JSON fragment, the same schema as a views[] entry:
// {"pose": [x_m, y_m, z_m, yaw_rad, pitch_rad, roll_rad], "focal_px": f}
// with optional cx / cy; render resolution follows the optics grid
CameraView parse_camera_json(const std::string& json_text, const WaveConfig& optics);

}  // namespace holo

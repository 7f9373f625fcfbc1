#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "holo/scene_io.hpp"

using namespace holo;
namespace ht = holo::testing;

TEST_CASE("covariance of an axis-aligned gaussian is the squared scales") {
    const double quat[4] = {1, 0, 0, 0};
    const double logs[3] = {std::log(0.5), std::log(0.25), std::log(2.0)};
    const Eigen::Matrix3d sigma = covariance_3d(quat, logs);
    CHECK(sigma(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(sigma(1, 1) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(sigma(2, 2) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(std::abs(sigma(0, 1)) < 1e-15);
    CHECK(std::abs(sigma(0, 2)) < 1e-15);
    CHECK(std::abs(sigma(1, 2)) < 1e-15);
}

TEST_CASE("a quarter turn about z swaps the x and y variances") {
    const double c = std::cos(M_PI / 4), s = std::sin(M_PI / 4);
    const double quat[4] = {c, 0, 0, s};  // 90 degrees about z
    const double logs[3] = {std::log(3.0), std::log(1.0), std::log(0.5)};
    const Eigen::Matrix3d sigma = covariance_3d(quat, logs);
    CHECK(sigma(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sigma(1, 1) == doctest::Approx(9.0).epsilon(1e-12));
    CHECK(sigma(2, 2) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("covariance ignores the quaternion magnitude and sign") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double q[4] = {g(rng), g(rng), g(rng), g(rng)};
        double logs[3] = {0.2 * g(rng), 0.2 * g(rng), 0.2 * g(rng)};
        const Eigen::Matrix3d a = covariance_3d(q, logs);
        double q2[4] = {-3.0 * q[0], -3.0 * q[1], -3.0 * q[2], -3.0 * q[3]};
        const Eigen::Matrix3d b = covariance_3d(q2, logs);
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
        // symmetric, positive definite
        CHECK((a - a.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(a.determinant() > 0.0);
        CHECK(a.trace() > 0.0);
    }
}

TEST_CASE("argmax plane pick resolves ties to the lowest index") {
    const double tied[4] = {0.7, 0.7, 0.7, 0.2};
    SteAssign a = ste_assign(tied, 4, 1e-3);
    CHECK(a.index == 0);
    CHECK(a.onehot[0] == 1.0);
    CHECK(a.onehot[1] == 0.0);

    const double asc[3] = {-1.0, 0.5, 2.0};
    CHECK(ste_assign(asc, 3, 1e-3).index == 2);
}

TEST_CASE("straight-through backward weights form a softmax") {
    const double logits[3] = {0.2, 0.1, -0.4};
    SteAssign a = ste_assign(logits, 3, 0.5);
    double sum = 0.0;
    for (double w : a.backward_weights) {
        CHECK(w > 0.0);
        sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    // agree with the direct formula
    double denom = 0.0;
    for (double l : logits) denom += std::exp(l / 0.5);
    for (int l = 0; l < 3; ++l)
        CHECK(a.backward_weights[l] == doctest::Approx(std::exp(logits[l] / 0.5) / denom).epsilon(1e-12));
}

TEST_CASE("a 0.1 logit gap saturates the straight-through weights") {
    const double logits[2] = {0.6, 0.5};
    SteAssign a = ste_assign(logits, 2, 1e-3);
    CHECK(a.index == 0);
    CHECK(1.0 - a.backward_weights[0] < 1e-20);
    CHECK(a.backward_weights[1] < 1e-20);
}

TEST_CASE("initialization sets isotropic scales from neighbor distances") {
    WaveConfig cfg = ht::desk_config(32, 2);
    std::vector<SeedPoint> seeds;
    for (int i = 0; i < 4; ++i) seeds.push_back({Eigen::Vector3d(0.01 * i, 0.0, 0.3), std::nullopt});
    GaussianScene s = init_scene(seeds, cfg, 11);
    REQUIRE(s.size() == 4);
    // end points: neighbors at 1, 2, 3 spacings; inner points: 1, 1, 2
    CHECK(s.log_scales[0] == doctest::Approx(std::log(0.02)).epsilon(1e-12));
    CHECK(s.log_scales[3] == doctest::Approx(std::log(0.04 / 3.0)).epsilon(1e-12));
    CHECK(s.log_scales[6] == doctest::Approx(std::log(0.04 / 3.0)).epsilon(1e-12));
    CHECK(s.log_scales[9] == doctest::Approx(std::log(0.02)).epsilon(1e-12));
    // isotropic
    CHECK(s.log_scales[1] == s.log_scales[0]);
    CHECK(s.log_scales[2] == s.log_scales[0]);
}

TEST_CASE("initialization defaults and ranges") {
    WaveConfig cfg = ht::desk_config(32, 3);
    std::vector<SeedPoint> seeds;
    seeds.push_back({Eigen::Vector3d(0.0, 0.0, 0.3), Eigen::Vector3d(0.9, 0.4, 0.1)});
    seeds.push_back({Eigen::Vector3d(0.02, 0.0, 0.31), std::nullopt});
    GaussianScene s = init_scene(seeds, cfg, 5);

    CHECK(s.num_planes == 3);
    CHECK(s.positions[0] == 0.0);
    CHECK(s.positions[5] == 0.31);
    // identity rotations
    CHECK(s.rotations[0] == 1.0);
    CHECK(s.rotations[1] == 0.0);
    // seeded color vs default amplitude
    CHECK(s.amplitudes[0] == 0.9);
    CHECK(s.amplitudes[2] == 0.1);
    CHECK(s.amplitudes[3] == 0.5);
    // opacity starts at sigmoid^-1(0.1)
    CHECK(sigmoid(s.opacity_logits[0]) == doctest::Approx(0.1).epsilon(1e-12));
    for (double p : s.phases) {
        CHECK(p >= 0.0);
        CHECK(p < kTwoPi);
    }
    for (double l : s.plane_logits) CHECK(l == 0.0);
    // same seed reproduces the phases exactly
    GaussianScene s2 = init_scene(seeds, cfg, 5);
    CHECK(s2.phases == s.phases);
}

TEST_CASE("single seed falls back to a volume-derived scale") {
    WaveConfig cfg = ht::desk_config(32, 2);
    std::vector<SeedPoint> seeds = {{Eigen::Vector3d(0, 0, 0.3), std::nullopt}};
    GaussianScene s = init_scene(seeds, cfg, 1);
    CHECK(s.log_scales[0] == doctest::Approx(std::log(0.01 * cfg.volume_depth)).epsilon(1e-12));
}

TEST_CASE("scene extent is the largest distance from the centroid") {
    GaussianScene s;
    s.num_planes = 1;
    s.resize(3);
    // centroid (0.1, 0, 0); farthest point at distance 0.2
    s.positions = {0.0, 0, 0, 0.1, 0, 0, 0.2, 0, 0};
    CHECK(scene_extent(s) == doctest::Approx(0.1).epsilon(1e-12));
    s.positions[6] = 0.4;  // centroid 0.5/3, max dist |0.4 - 1/6|
    CHECK(scene_extent(s) == doctest::Approx(0.4 - 0.5 / 3.0).epsilon(1e-12));
}

TEST_CASE("renormalize restores unit quaternions and clips amplitudes") {
    GaussianScene s;
    s.num_planes = 1;
    s.resize(2);
    s.rotations = {2, 0, 0, 0, 1, 1, 1, 1};
    s.amplitudes[4] = -0.25;
    s.renormalize();
    CHECK(s.rotations[0] == 1.0);
    CHECK(s.rotations[4] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s.amplitudes[4] == 0.0);
}

TEST_CASE("scene validation rejects malformed inputs") {
    GaussianScene s;
    s.num_planes = 2;
    s.resize(2);
    s.amplitudes[0] = -1.0;
    CHECK_THROWS_AS(s.validate(), HoloError);
    s.amplitudes[0] = 0.0;
    s.rotations = {0, 0, 0, 0, 1, 0, 0, 0};
    CHECK_THROWS_AS(s.validate(), HoloError);
    s.rotations = {1, 0, 0, 0, 1, 0, 0, 0};
    s.plane_logits.pop_back();
    CHECK_THROWS_AS(s.validate(), HoloError);
}

TEST_CASE("densification prunes transparent and oversized gaussians") {
    WaveConfig cfg = ht::desk_config(32, 2);
    GaussianScene s = ht::random_scene(4, cfg, 3);
    for (double& l : s.log_scales) l = std::log(0.001);  // far below any prune threshold
    s.opacity_logits[1] = logit(0.001);            // transparent, goes
    for (int d = 0; d < 3; ++d) s.log_scales[2 * 3 + d] = std::log(10.0);  // enormous, goes

    DensifyStats stats;
    stats.resize(4);
    DensifyParams params;
    std::mt19937_64 rng(9);
    GaussianScene before = s;
    DensifyResult res = densify_and_prune(s, stats, params, rng);

    CHECK(res.pruned == 2);
    CHECK(res.split == 0);
    CHECK(res.cloned == 0);
    REQUIRE(s.size() == 2);
    REQUIRE(res.src_index.size() == 2);
    CHECK(res.src_index[0] == 0);
    CHECK(res.src_index[1] == 3);
    // survivors are copied through unchanged
    for (int d = 0; d < 3; ++d) CHECK(s.positions[d] == before.positions[d]);
    for (int d = 0; d < 3; ++d) CHECK(s.positions[3 + d] == before.positions[9 + d]);
}

TEST_CASE("high-gradient small gaussians clone, large ones split") {
    WaveConfig cfg = ht::desk_config(32, 2);
    GaussianScene s = ht::random_scene(3, cfg, 4);
    // spread positions so the extent is well defined
    s.positions = {0, 0, 0.3, 0.05, 0, 0.3, -0.05, 0, 0.35};
    const double extent = scene_extent(s);
    s.opacity_logits = {1.0, 1.0, 1.0};
    // gaussian 0: small footprint -> clone; gaussian 1: above the split
    // threshold; gaussian 2: quiet, stays as is
    for (int d = 0; d < 3; ++d) s.log_scales[d] = std::log(0.001 * extent);
    for (int d = 0; d < 3; ++d) s.log_scales[3 + d] = std::log(0.05 * extent);
    for (int d = 0; d < 3; ++d) s.log_scales[6 + d] = std::log(0.001 * extent);

    DensifyStats stats;
    stats.resize(3);
    stats.grad_norm_sum = {1e-3, 1e-3, 0.0};
    stats.visible_count = {1, 1, 1};

    DensifyParams params;
    std::mt19937_64 rng(10);
    GaussianScene before = s;
    DensifyResult res = densify_and_prune(s, stats, params, rng);

    CHECK(res.pruned == 0);
    CHECK(res.cloned == 1);
    CHECK(res.split == 1);
    // clone -> 2 rows, split -> 2 rows, quiet -> 1 row
    REQUIRE(s.size() == 5);
    REQUIRE(res.src_index.size() == 5);
    CHECK(res.src_index[0] == 0);   // original of the clone
    CHECK(res.src_index[1] == -1);  // perturbed copy
    CHECK(res.src_index[2] == -1);  // split children are fresh
    CHECK(res.src_index[3] == -1);
    CHECK(res.src_index[4] == 2);

    // clone original keeps its position; children shrink by the split factor
    CHECK(s.positions[0] == before.positions[0]);
    CHECK(s.log_scales[2 * 3] ==
          doctest::Approx(before.log_scales[3] - std::log(1.6)).epsilon(1e-12));
    CHECK(s.log_scales[3 * 3] == s.log_scales[2 * 3]);
    // split children scatter around the parent
    CHECK(s.positions[2 * 3] != before.positions[3]);
    // the quiet gaussian is untouched
    CHECK(s.positions[4 * 3] == before.positions[6]);
    CHECK(s.phases[4 * 3] == before.phases[6]);
}

TEST_CASE("zero visibility never densifies") {
    WaveConfig cfg = ht::desk_config(32, 2);
    GaussianScene s = ht::random_scene(3, cfg, 6);
    s.opacity_logits = {1.0, 1.0, 1.0};
    DensifyStats stats;
    stats.resize(3);
    stats.grad_norm_sum = {100.0, 100.0, 100.0};
    stats.visible_count = {0, 0, 0};  // never seen: the sums do not count
    DensifyParams params;
    std::mt19937_64 rng(2);
    DensifyResult res = densify_and_prune(s, stats, params, rng);
    CHECK(res.cloned == 0);
    CHECK(res.split == 0);
    CHECK(s.size() == 3);
}

TEST_CASE("scene container round trips exactly") {
    WaveConfig cfg = ht::desk_config(32, 3);
    GaussianScene s = ht::random_scene(17, cfg, 42);
    const std::string path = (std::filesystem::temp_directory_path() / "roundtrip.holoscene").string();
    write_scene(path, s);
    GaussianScene r = read_scene(path);
    std::remove(path.c_str());

    CHECK(r.num_planes == s.num_planes);
    REQUIRE(r.size() == s.size());
    CHECK(r.positions == s.positions);
    CHECK(r.rotations == s.rotations);
    CHECK(r.log_scales == s.log_scales);
    CHECK(r.amplitudes == s.amplitudes);
    CHECK(r.opacity_logits == s.opacity_logits);
    CHECK(r.phases == s.phases);
    CHECK(r.plane_logits == s.plane_logits);
}

TEST_CASE("scene reader rejects mangled files") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string garbage = (dir / "garbage.holoscene").string();
    {
        std::ofstream f(garbage, std::ios::binary);
        f << "definitely not a scene container";
    }
    CHECK_THROWS_AS(read_scene(garbage), HoloError);
    std::remove(garbage.c_str());

    // valid header, truncated payload
    WaveConfig cfg = ht::desk_config(16, 2);
    GaussianScene s = ht::random_scene(8, cfg, 1);
    const std::string trunc = (dir / "trunc.holoscene").string();
    write_scene(trunc, s);
    const auto full = std::filesystem::file_size(trunc);
    std::filesystem::resize_file(trunc, full - 16);
    CHECK_THROWS_AS(read_scene(trunc), HoloError);
    std::remove(trunc.c_str());

    CHECK_THROWS_AS(read_scene((dir / "does-not-exist.holoscene").string()), HoloError);
}

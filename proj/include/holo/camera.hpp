#pragma once

#include <Eigen/Dense>
#include <array>

#include "holo/common.hpp"

namespace holo {

// Pinhole camera; the hologram plane is centered on the camera and the
// depth plane stack sits along the optical (+z) axis in camera space.
// pose = (x, y, z, rx, ry, rz): position plus XYZ Euler angles (radians)
// of the camera-to-world rotation Rz(rz) * Ry(ry) * Rx(rx).
struct CameraView {
    std::array<double, 6> pose = {0, 0, 0, 0, 0, 0};
    double focal_px = 150.0;   // focal length in pixels
    double cx = -1.0, cy = -1.0;  // principal point in pixels, <0 means grid center
    int width = 0, height = 0;    // render resolution in pixels

    Eigen::Matrix3d rot_cam_to_world() const;
    Eigen::Matrix3d rot_world_to_cam() const;
    Eigen::Vector3d position() const { return {pose[0], pose[1], pose[2]}; }

    Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p) const;

    double principal_x() const { return cx >= 0.0 ? cx : width / 2.0; }
    double principal_y() const { return cy >= 0.0 ? cy : height / 2.0; }

    void validate() const;
};

}  // namespace holo

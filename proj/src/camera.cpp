#include "holo/camera.hpp"

namespace holo {

Eigen::Matrix3d CameraView::rot_cam_to_world() const {
    const double cx_ = std::cos(pose[3]), sx_ = std::sin(pose[3]);
    const double cy_ = std::cos(pose[4]), sy_ = std::sin(pose[4]);
    const double cz_ = std::cos(pose[5]), sz_ = std::sin(pose[5]);
    Eigen::Matrix3d rx, ry, rz;
    rx << 1, 0, 0, 0, cx_, -sx_, 0, sx_, cx_;
    ry << cy_, 0, sy_, 0, 1, 0, -sy_, 0, cy_;
    rz << cz_, -sz_, 0, sz_, cz_, 0, 0, 0, 1;
    return rz * ry * rx;
}

Eigen::Matrix3d CameraView::rot_world_to_cam() const { return rot_cam_to_world().transpose(); }

Eigen::Vector3d CameraView::world_to_camera(const Eigen::Vector3d& p) const {
    return rot_world_to_cam() * (p - position());
}

void CameraView::validate() const {
    if (width <= 0 || height <= 0) throw HoloError("config", "camera resolution must be positive");
    if (focal_px <= 0.0) throw HoloError("config", "focal length must be positive");
    for (double v : pose)
        if (!std::isfinite(v)) throw HoloError("config", "camera pose must be finite");
}

}  // namespace holo

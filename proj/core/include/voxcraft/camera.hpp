// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_CAMERA_HPP
#define VOXCRAFT_CAMERA_HPP

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/types.hpp"

namespace voxcraft {

// Pinhole intrinsics with square pixels and a centred principal point.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  Eigen::Matrix3d matrix() const;
};

enum class FovAxis { Horizontal, Vertical };

// fx = fy = W / (2 tan(fov/2)), cx = W/2, cy = H/2. With FovAxis::Vertical the
// focal length is derived from H instead. Throws InvalidFov unless
// 0 < fov < pi, and InvalidParameter for non-positive image sizes.
Intrinsics intrinsics_from_fov(double fov_rad, int width, int height,
                               FovAxis axis = FovAxis::Horizontal);

// Camera pose as logged by the game: block-unit position, yaw and pitch in
// radians. Yaw 0 looks towards +Z, positive pitch looks down.
struct Pose {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
  double pitch = 0.0;
};

// Throws InvalidPose for non-finite values; pitch is clamped to [-pi/2, pi/2].
Pose make_pose(const Eigen::Vector3d& position, double yaw, double pitch);

// Camera frame: +X right, +Y down, +Z forward. World frame: +Y up.
// R = R_X(pitch + pi) * R_Y(yaw + pi), expanded in closed form.
Eigen::Matrix3d rotation_from_yaw_pitch(double yaw, double pitch);

// Camera -> world rigid transform [R p; 0 1].
struct Extrinsics {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix4d matrix() const;
  Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }
  // Rigid inverse: R^T (p - t).
  Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p) const {
    return rotation.transpose() * (p - translation);
  }
};

Extrinsics extrinsics_from_pose(const Pose& pose);

struct Projection {
  Eigen::Vector2d pixel;
  double depth = 0.0;  // camera-frame z
};

// Returns nullopt when the point is not in front of the camera (depth <= 0).
std::optional<Projection> try_project(const Eigen::Vector3d& world,
                                      const Extrinsics& extrinsics,
                                      const Intrinsics& intrinsics);
// Throws BehindCamera when depth <= 0.
Projection project(const Eigen::Vector3d& world, const Extrinsics& extrinsics,
                   const Intrinsics& intrinsics);

inline Eigen::Vector3d voxel_center(VoxelCoord v) {
  return {v.x + 0.5, v.y + 0.5, v.z + 0.5};
}

// Closed-interval image bounds test [0,W] x [0,H].
bool in_image(const Eigen::Vector2d& pixel, const Intrinsics& intrinsics);

// True when the centre of `v` projects inside the image with positive depth.
bool voxel_visible(VoxelCoord v, const Extrinsics& extrinsics,
                   const Intrinsics& intrinsics);

// One entry of poses.json.
struct FramePose {
  std::string frame;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double fov_deg = 70.0;
  FovAxis fov_axis = FovAxis::Horizontal;
  std::optional<int> width;
  std::optional<int> height;

  Pose pose() const;
  Intrinsics intrinsics(int default_width, int default_height) const;
};

std::vector<FramePose> parse_poses(std::string_view json_text);
std::vector<FramePose> load_poses(const std::filesystem::path& path);
std::string poses_to_json(const std::vector<FramePose>& poses);

double deg_to_rad(double deg) noexcept;

}  // namespace voxcraft

#endif  // VOXCRAFT_CAMERA_HPP

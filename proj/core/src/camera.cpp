// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/camera.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

Eigen::Matrix3d Intrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx,
       0.0, fy, cy,
       0.0, 0.0, 1.0;
  return k;
}

Intrinsics intrinsics_from_fov(double fov_rad, int width, int height, FovAxis axis) {
  if (!std::isfinite(fov_rad) || fov_rad <= 0.0 || fov_rad >= std::numbers::pi) {
    fail(ErrorCode::InvalidFov, "field of view must lie in (0, pi), got " +
                                    std::to_string(fov_rad) + " rad");
  }
  if (width <= 0 || height <= 0) {
    fail(ErrorCode::InvalidParameter, "image size must be positive");
  }
  const double span = axis == FovAxis::Horizontal ? width : height;
  const auto f = static_cast<double>(static_cast<long double>(span) /
                                     (2.0L * std::tan(static_cast<long double>(fov_rad) / 2.0L)));
  return {f, f, width / 2.0, height / 2.0, width, height};
}

Pose make_pose(const Eigen::Vector3d& position, double yaw, double pitch) {
  if (!position.allFinite() || !std::isfinite(yaw) || !std::isfinite(pitch)) {
    fail(ErrorCode::InvalidPose, "pose contains non-finite values");
  }
  const double half_pi = std::numbers::pi / 2.0;
  return {position, yaw, std::clamp(pitch, -half_pi, half_pi)};
}

Eigen::Matrix3d rotation_from_yaw_pitch(double yaw, double pitch) {
  const double ct = std::cos(yaw), st = std::sin(yaw);
  const double cp = std::cos(pitch), sp = std::sin(pitch);
  Eigen::Matrix3d r;
  r << -ct,      0.0, -st,
       st * sp,  -cp, -ct * sp,
       -st * cp, -sp, ct * cp;
  return r;
}

Eigen::Matrix4d Extrinsics::matrix() const {
  Eigen::Matrix4d e = Eigen::Matrix4d::Identity();
  e.topLeftCorner<3, 3>() = rotation;
  e.topRightCorner<3, 1>() = translation;
  return e;
}

Extrinsics extrinsics_from_pose(const Pose& pose) {
  return {rotation_from_yaw_pitch(pose.yaw, pose.pitch), pose.position};
}

std::optional<Projection> try_project(const Eigen::Vector3d& world,
                                      const Extrinsics& extrinsics,
                                      const Intrinsics& k) {
  const Eigen::Vector3d cam = extrinsics.world_to_camera(world);
  if (!(cam.z() > 0.0)) return std::nullopt;
  return Projection{{k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy},
                    cam.z()};
}

Projection project(const Eigen::Vector3d& world, const Extrinsics& extrinsics,
                   const Intrinsics& intrinsics) {
  auto p = try_project(world, extrinsics, intrinsics);
  if (!p) fail(ErrorCode::BehindCamera, "point is not in front of the camera");
  return *p;
}

bool in_image(const Eigen::Vector2d& pixel, const Intrinsics& k) {
  return pixel.x() >= 0.0 && pixel.x() <= k.width && pixel.y() >= 0.0 &&
         pixel.y() <= k.height;
}

bool voxel_visible(VoxelCoord v, const Extrinsics& extrinsics, const Intrinsics& k) {
  auto p = try_project(voxel_center(v), extrinsics, k);
  return p && in_image(p->pixel, k);
}

Pose FramePose::pose() const {
  return make_pose(position, deg_to_rad(yaw_deg), deg_to_rad(pitch_deg));
}

Intrinsics FramePose::intrinsics(int default_width, int default_height) const {
  return intrinsics_from_fov(deg_to_rad(fov_deg), width.value_or(default_width),
                             height.value_or(default_height), fov_axis);
}

std::vector<FramePose> parse_poses(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("poses.json: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorCode::FormatError, "poses.json: expected a list");
  std::vector<FramePose> poses;
  poses.reserve(doc.size());
  for (const auto& entry : doc) {
    try {
      FramePose fp;
      fp.frame = entry.at("frame").get<std::string>();
      const auto& pos = entry.at("pos");
      if (!pos.is_array() || pos.size() != 3) {
        fail(ErrorCode::FormatError, "poses.json: \"pos\" must be [x,y,z]");
      }
      fp.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
      fp.yaw_deg = entry.at("yaw_deg").get<double>();
      fp.pitch_deg = entry.at("pitch_deg").get<double>();
      fp.fov_deg = entry.value("fov_deg", fp.fov_deg);
      if (auto axis = entry.value("fov_axis", std::string("horizontal")); axis == "vertical") {
        fp.fov_axis = FovAxis::Vertical;
      } else if (axis != "horizontal") {
        fail(ErrorCode::FormatError, "poses.json: fov_axis must be horizontal or vertical");
      }
      if (entry.contains("width")) fp.width = entry["width"].get<int>();
      if (entry.contains("height")) fp.height = entry["height"].get<int>();
      if (fp.frame.empty()) fail(ErrorCode::FormatError, "poses.json: empty frame id");
      poses.push_back(std::move(fp));
    } catch (const json::exception& e) {
      fail(ErrorCode::FormatError, std::string("poses.json: ") + e.what());
    }
  }
  return poses;
}

std::vector<FramePose> load_poses(const std::filesystem::path& path) {
  return parse_poses(read_file_text(path));
}

std::string poses_to_json(const std::vector<FramePose>& poses) {
  json doc = json::array();
  for (const auto& fp : poses) {
    json entry{{"frame", fp.frame},
               {"pos", {fp.position.x(), fp.position.y(), fp.position.z()}},
               {"yaw_deg", fp.yaw_deg},
               {"pitch_deg", fp.pitch_deg},
               {"fov_deg", fp.fov_deg}};
    if (fp.fov_axis == FovAxis::Vertical) entry["fov_axis"] = "vertical";
    if (fp.width) entry["width"] = *fp.width;
    if (fp.height) entry["height"] = *fp.height;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

}  // namespace voxcraft

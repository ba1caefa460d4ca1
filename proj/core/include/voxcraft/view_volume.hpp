// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_VIEW_VOLUME_HPP
#define VOXCRAFT_VIEW_VOLUME_HPP

#include <string_view>

#include "voxcraft/camera.hpp"
#include "voxcraft/semantic_grid.hpp"
#include "voxcraft/types.hpp"

namespace voxcraft {

// The eight horizontal view directions, in increasing yaw order (45 degree
// steps). Yaw follows the game convention: 0 faces +Z, 90 faces -X.
enum class ViewDirection {
  PosZ,      //   0
  NegXPosZ,  //  45
  NegX,      //  90
  NegXNegZ,  // 135
  NegZ,      // 180
  PosXNegZ,  // 225
  PosX,      // 270
  PosXPosZ,  // 315
};

enum class ViewKind { AxisAligned, Diagonal };

struct ViewCase {
  ViewKind kind = ViewKind::AxisAligned;
  ViewDirection direction = ViewDirection::PosZ;

  friend bool operator==(const ViewCase&, const ViewCase&) = default;
};

// Unit step of a direction on the horizontal plane, each component in {-1,0,1}.
struct HorizontalStep {
  int dx = 0;
  int dz = 0;
};

HorizontalStep step_of(ViewDirection direction) noexcept;
std::string_view to_string(ViewDirection direction) noexcept;

// Snaps yaw (radians, any range) to the nearest of the eight directions.
// Ties at the 22.5 degree midpoints (within 1e-9 of a sector) go to the
// axis-aligned neighbour.
ViewCase classify_view_case(double yaw);

struct VolumeSpec {
  int width = 16;   // across the view direction
  int height = 16;  // vertical
  int depth = 16;   // along the view direction
};

// Axis-aligned: the player sits at the centre of the face nearest to them
// (floor(w/2), floor(h/2) offsets) and the box extends `depth` blocks along
// the view direction. Diagonal: the player is the corner of the box nearest to
// them, which is the minimum corner for +X+Z; the box opens into the viewed
// quadrant with x-extent `width`, z-extent `depth` and extends `height` up.
// Throws InvalidParameter for non-positive sizes.
Aabb compute_view_volume(VoxelCoord player, const ViewCase& view_case,
                         const VolumeSpec& spec);

// Rigid translation of both corners.
Aabb apply_offset(const Aabb& box, VoxelCoord epsilon);

// Two blocks along the view direction for diagonal views, zero otherwise.
VoxelCoord default_offset(const ViewCase& view_case);

// Block containing a real-valued position.
VoxelCoord floor_to_block(const Eigen::Vector3d& position);

// Sets every voxel whose centre does not project into [0,W]x[0,H] with
// positive depth to empty.
SemanticGrid frustum_cull(const SemanticGrid& grid, const Extrinsics& extrinsics,
                          const Intrinsics& intrinsics);

}  // namespace voxcraft

#endif  // VOXCRAFT_VIEW_VOLUME_HPP

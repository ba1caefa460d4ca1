// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/view_volume.hpp"

#include <cmath>
#include <numbers>

#include "voxcraft/error.hpp"

namespace voxcraft {

HorizontalStep step_of(ViewDirection direction) noexcept {
  switch (direction) {
    case ViewDirection::PosZ: return {0, 1};
    case ViewDirection::NegXPosZ: return {-1, 1};
    case ViewDirection::NegX: return {-1, 0};
    case ViewDirection::NegXNegZ: return {-1, -1};
    case ViewDirection::NegZ: return {0, -1};
    case ViewDirection::PosXNegZ: return {1, -1};
    case ViewDirection::PosX: return {1, 0};
    case ViewDirection::PosXPosZ: return {1, 1};
  }
  return {0, 1};
}

std::string_view to_string(ViewDirection direction) noexcept {
  switch (direction) {
    case ViewDirection::PosZ: return "+Z";
    case ViewDirection::NegXPosZ: return "-X+Z";
    case ViewDirection::NegX: return "-X";
    case ViewDirection::NegXNegZ: return "-X-Z";
    case ViewDirection::NegZ: return "-Z";
    case ViewDirection::PosXNegZ: return "+X-Z";
    case ViewDirection::PosX: return "+X";
    case ViewDirection::PosXPosZ: return "+X+Z";
  }
  return "?";
}

ViewCase classify_view_case(double yaw) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double sector = std::numbers::pi / 4.0;
  double t = std::fmod(yaw, two_pi);
  if (t < 0.0) t += two_pi;
  const double q = t / sector;
  auto k = static_cast<int>(std::floor(q));
  const double frac = q - k;
  // Within 1e-9 of a midpoint counts as a tie.
  constexpr double tie = 1e-9;
  if (frac > 0.5 + tie || (std::abs(frac - 0.5) <= tie && k % 2 == 1)) ++k;
  k %= 8;
  const auto direction = static_cast<ViewDirection>(k);
  return {k % 2 == 0 ? ViewKind::AxisAligned : ViewKind::Diagonal, direction};
}

namespace {

// [start, start + extent - 1] when step >= 0, else [start - extent + 1, start].
std::pair<std::int32_t, std::int32_t> span_from(std::int32_t start, int extent, int step) {
  if (step >= 0) return {start, start + extent - 1};
  return {start - extent + 1, start};
}

}  // namespace

Aabb compute_view_volume(VoxelCoord p, const ViewCase& view_case, const VolumeSpec& spec) {
  if (spec.width < 1 || spec.height < 1 || spec.depth < 1) {
    fail(ErrorCode::InvalidParameter, "view volume sizes must be >= 1");
  }
  const auto [dx, dz] = step_of(view_case.direction);
  const int w = spec.width, h = spec.height, d = spec.depth;

  if (view_case.kind == ViewKind::Diagonal) {
    const auto [x0, x1] = span_from(p.x, w, dx);
    const auto [z0, z1] = span_from(p.z, d, dz);
    return Aabb({x0, p.y, z0}, {x1, p.y + h - 1, z1});
  }

  const std::int32_t y0 = p.y - h / 2;
  const std::int32_t y1 = y0 + h - 1;
  if (dx == 0) {
    // Looking along Z: width spans x.
    const std::int32_t x0 = p.x - w / 2;
    const auto [z0, z1] = span_from(p.z, d, dz);
    return Aabb({x0, y0, z0}, {x0 + w - 1, y1, z1});
  }
  // Looking along X: width spans z.
  const std::int32_t z0 = p.z - w / 2;
  const auto [x0, x1] = span_from(p.x, d, dx);
  return Aabb({x0, y0, z0}, {x1, y1, z0 + w - 1});
}

Aabb apply_offset(const Aabb& box, VoxelCoord epsilon) { return box.translated(epsilon); }

VoxelCoord default_offset(const ViewCase& view_case) {
  if (view_case.kind == ViewKind::AxisAligned) return {};
  const auto [dx, dz] = step_of(view_case.direction);
  return {2 * dx, 0, 2 * dz};
}

VoxelCoord floor_to_block(const Eigen::Vector3d& position) {
  return {static_cast<std::int32_t>(std::floor(position.x())),
          static_cast<std::int32_t>(std::floor(position.y())),
          static_cast<std::int32_t>(std::floor(position.z()))};
}

SemanticGrid frustum_cull(const SemanticGrid& grid, const Extrinsics& extrinsics,
                          const Intrinsics& intrinsics) {
  std::vector<ClassId> labels(grid.labels().begin(), grid.labels().end());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kEmptyClass) continue;
    if (!voxel_visible(grid.world_of(i), extrinsics, intrinsics)) labels[i] = kEmptyClass;
  }
  return grid.with_labels(std::move(labels));
}

}  // namespace voxcraft

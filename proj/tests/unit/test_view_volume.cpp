// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numbers>

#include "oracles.hpp"
#include "voxcraft/error.hpp"
#include "voxcraft/view_volume.hpp"

using namespace voxcraft;

namespace {

constexpr double kPi = std::numbers::pi;
double deg(double d) { return d * kPi / 180.0; }

}  // namespace

TEST_CASE("yaw snaps to eight directions") {
  CHECK(classify_view_case(0).direction == ViewDirection::PosZ);
  CHECK(classify_view_case(deg(44)).direction == ViewDirection::NegXPosZ);
  CHECK(classify_view_case(deg(44)).kind == ViewKind::Diagonal);
  CHECK(classify_view_case(deg(90)).direction == ViewDirection::NegX);
  CHECK(classify_view_case(deg(180)).direction == ViewDirection::NegZ);
  CHECK(classify_view_case(deg(-90)).direction == ViewDirection::PosX);
  CHECK(classify_view_case(deg(315)).direction == ViewDirection::PosXPosZ);
  CHECK(classify_view_case(deg(350)).direction == ViewDirection::PosZ);
  CHECK(classify_view_case(deg(720 + 45)).direction == ViewDirection::NegXPosZ);
}

TEST_CASE("midpoints between sectors go to the axis-aligned side") {
  for (int k = 0; k < 8; ++k) {
    const auto vc = classify_view_case(kPi / 8 + k * kPi / 4);
    CHECK(vc.kind == ViewKind::AxisAligned);
  }
}

TEST_CASE("axis-aligned volume along +Z") {
  const auto box = compute_view_volume({0, 64, 0}, classify_view_case(0), {16, 16, 16});
  CHECK(box == Aabb({-8, 56, 0}, {7, 71, 15}));
}

TEST_CASE("axis-aligned volume along -X spans z with its width") {
  const auto box = compute_view_volume({10, 0, 10}, classify_view_case(deg(90)), {4, 2, 6});
  CHECK(box == Aabb({5, -1, 8}, {10, 0, 11}));
}

TEST_CASE("diagonal volume opens into the viewed quadrant") {
  const auto box = compute_view_volume({0, 64, 0}, classify_view_case(deg(315)), {16, 16, 16});
  CHECK(box == Aabb({0, 64, 0}, {15, 79, 15}));
  const auto back = compute_view_volume({0, 0, 0}, classify_view_case(deg(135)), {3, 2, 5});
  CHECK(back == Aabb({-2, 0, -4}, {0, 1, 0}));
}

TEST_CASE("every direction gives w*h*d with the player on the boundary") {
  const VolumeSpec spec{5, 4, 7};
  const VoxelCoord player{3, -2, 11};
  for (int k = 0; k < 8; ++k) {
    const auto vc = classify_view_case(k * kPi / 4);
    CHECK(static_cast<int>(vc.direction) == k);
    const auto box = compute_view_volume(player, vc, spec);
    CHECK(box.volume() == 5 * 4 * 7);
    CHECK(box.contains(player));
    CHECK(box.on_boundary(player));
  }
}

TEST_CASE("non-positive sizes are rejected") {
  CHECK_THROWS_AS(compute_view_volume({}, classify_view_case(0), {0, 1, 1}), Error);
}

TEST_CASE("offsets") {
  CHECK(default_offset(classify_view_case(0)) == VoxelCoord{});
  CHECK(default_offset(classify_view_case(deg(45))) == VoxelCoord{-2, 0, 2});
  CHECK(default_offset(classify_view_case(deg(225))) == VoxelCoord{2, 0, -2});
  const Aabb box({0, 0, 0}, {1, 1, 1});
  CHECK(apply_offset(box, {-2, 0, 2}) == Aabb({-2, 0, 2}, {-1, 1, 3}));
  CHECK(apply_offset(apply_offset(box, {1, 2, 3}), {-1, -2, -3}) == box);
}

TEST_CASE("floor_to_block handles negatives") {
  CHECK(floor_to_block({-0.5, 0.0, 1.99}) == VoxelCoord{-1, 0, 1});
}

TEST_CASE("frustum culling equals the per-voxel oracle and is idempotent") {
  testing::Rng rng(77);
  std::uniform_real_distribution<double> yaw(-kPi, kPi), pitch(-1.0, 1.0), pos(-3, 3);
  for (int i = 0; i < 30; ++i) {
    const auto grid = testing::random_grid(rng, 10, 0.5, {1, 3, 6}, {-5, -5, -5});
    const Eigen::Vector3d c{pos(rng), pos(rng), pos(rng)};
    const double t = yaw(rng), p = pitch(rng);
    const auto e = extrinsics_from_pose(make_pose(c, t, p));
    const auto k = intrinsics_from_fov(1.3, 64, 48);
    const auto culled = frustum_cull(grid, e, k);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto expected = grid.labels()[j] != kEmptyClass &&
                                    testing::projects_inside(grid.world_of(j), c, t, p, k)
                                ? grid.labels()[j]
                                : kEmptyClass;
      CHECK(culled.labels()[j] == expected);
    }
    CHECK(frustum_cull(culled, e, k) == culled);
    CHECK(culled.count_non_empty() <= grid.count_non_empty());
  }
}

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_FUSION_HPP
#define VOXCRAFT_FUSION_HPP

#include <span>
#include <vector>

#include "voxcraft/camera.hpp"
#include "voxcraft/semantic_grid.hpp"

namespace voxcraft {

// One per-view grid expressed in its camera frame, plus the camera that saw it.
struct ViewObservation {
  SemanticGrid grid;
  Extrinsics extrinsics;
  Intrinsics intrinsics;
};

struct WorldVote {
  VoxelCoord position;
  ClassId label = kEmptyClass;
};

// Maps the centre of every occupied voxel camera -> world and takes the block
// containing the result (half-integers round towards +inf).
std::vector<WorldVote> transform_view_to_world(const ViewObservation& observation);

// Deterministic stand-in for learned multi-view fusion: per-voxel majority
// vote over all observations. Ties go to the class most recently voted for
// (highest observation index), then to the lowest class id. All observations
// must share one class table. Throws EmptyObservationSet,
// ClassTableMismatch.
SemanticGrid fuse_views(std::span<const ViewObservation> observations, const Aabb& out_bounds);

}  // namespace voxcraft

#endif  // VOXCRAFT_FUSION_HPP

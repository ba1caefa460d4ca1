// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "voxcraft/error.hpp"

namespace voxcraft {

namespace {

// Snap away float noise before flooring so exact block centres stay put.
std::int32_t block_of(double v) {
  return static_cast<std::int32_t>(std::floor(v + 1e-9));
}

}  // namespace

std::vector<WorldVote> transform_view_to_world(const ViewObservation& observation) {
  const auto& grid = observation.grid;
  std::vector<WorldVote> out;
  out.reserve(grid.count_non_empty());
  const auto labels = grid.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kEmptyClass) continue;
    const auto world = observation.extrinsics.camera_to_world(voxel_center(grid.world_of(i)));
    out.push_back({{block_of(world.x()), block_of(world.y()), block_of(world.z())}, labels[i]});
  }
  return out;
}

SemanticGrid fuse_views(std::span<const ViewObservation> observations, const Aabb& out_bounds) {
  if (observations.empty()) fail(ErrorCode::EmptyObservationSet, "no observations to fuse");
  const auto& table = observations.front().grid.class_table_ptr();
  for (const auto& obs : observations) {
    if (obs.grid.classes() != *table) {
      fail(ErrorCode::ClassTableMismatch, "observations use different class tables");
    }
  }

  auto fused = SemanticGrid::empty(out_bounds, table);

  struct Ballot {
    std::size_t cell;
    ClassId label;
    std::uint32_t observation;
  };
  std::vector<Ballot> ballots;
  for (std::uint32_t o = 0; o < observations.size(); ++o) {
    for (const auto& vote : transform_view_to_world(observations[o])) {
      if (auto cell = fused.index_of(vote.position)) ballots.push_back({*cell, vote.label, o});
    }
  }
  std::sort(ballots.begin(), ballots.end(), [](const Ballot& a, const Ballot& b) {
    return std::tie(a.cell, a.label, a.observation) < std::tie(b.cell, b.label, b.observation);
  });

  std::vector<ClassId> labels(fused.labels().begin(), fused.labels().end());
  std::size_t i = 0;
  while (i < ballots.size()) {
    const auto cell = ballots[i].cell;
    ClassId best = kEmptyClass;
    std::size_t best_count = 0;
    std::uint32_t best_latest = 0;
    while (i < ballots.size() && ballots[i].cell == cell) {
      const ClassId label = ballots[i].label;
      std::size_t count = 0;
      std::uint32_t latest = 0;
      for (; i < ballots.size() && ballots[i].cell == cell && ballots[i].label == label; ++i) {
        ++count;
        latest = std::max(latest, ballots[i].observation);
      }
      // Labels arrive in increasing order, so strict comparisons keep the
      // lowest id on a full tie.
      if (count > best_count || (count == best_count && latest > best_latest)) {
        best = label;
        best_count = count;
        best_latest = latest;
      }
    }
    labels[cell] = best;
  }
  return fused.with_labels(std::move(labels));
}

}  // namespace voxcraft

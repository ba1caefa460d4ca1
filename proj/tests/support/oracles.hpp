// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

// Slow, obviously-correct reference implementations and random generators
// shared by the unit and acceptance tests.

#ifndef VOXCRAFT_TESTS_ORACLES_HPP
#define VOXCRAFT_TESTS_ORACLES_HPP

#include <Eigen/Dense>

#include <random>
#include <set>
#include <vector>

#include "voxcraft/build_plan.hpp"
#include "voxcraft/camera.hpp"
#include "voxcraft/centers.hpp"
#include "voxcraft/semantic_grid.hpp"
#include "voxcraft/template_match.hpp"
#include "voxcraft/world_map.hpp"

namespace voxcraft::testing {

using Rng = std::mt19937_64;

std::shared_ptr<const ClassTable> indoor();

// Random grid with every dimension in [1, max_dim]; each voxel is occupied
// with probability `fill` by a class drawn from `classes`.
SemanticGrid random_grid(Rng& rng, int max_dim, double fill, const std::vector<ClassId>& classes,
                         VoxelCoord origin = {});

// Window sums with zero padding, by direct triple loop.
std::vector<std::uint32_t> brute_window_counts(const SemanticGrid& grid, int k);
std::vector<Candidate> brute_candidates(const SemanticGrid& grid, int k, double tau);

// Textbook sequential DBSCAN with O(n^2) neighbour scans.
DbscanResult reference_dbscan(const std::vector<Eigen::Vector3d>& points, double eta, int min_pts);
// Clusters as sets, so partitions compare independently of ordering.
std::set<std::vector<std::size_t>> partition_of(const DbscanResult& r);

// Extrinsic rotation assembled from elementary rotations about X and Y.
Eigen::Matrix3d rotation_by_product(double yaw, double pitch);
// Pixel test of the voxel centre written out with plain arithmetic.
bool projects_inside(VoxelCoord v, const Eigen::Vector3d& cam_pos, double yaw, double pitch,
                     const Intrinsics& k);

// Replays Clear/Fill/SetBlock commands block by block.
std::vector<ClassId> replay_plan(const BuildPlan& plan, const Aabb& bounds,
                                 const std::map<std::string, ClassId, std::less<>>& class_of);

// Label of every voxel of `box` via world.query and a class-map lookup.
std::vector<ClassId> brute_extract(const WorldMap& world, const Aabb& box, const ClassMap& map,
                                   const ClassTable& table);

// Quarter turn seen from above, written as a matrix product in Minecraft
// axes: north (-Z) goes to east (+X).
VoxelCoord turn_clockwise(VoxelCoord v, int quarter_turns);

// `count` random templates of class `label`, all 4 rotations of all of them
// pairwise distinct up to translation.
TemplateLibrary asymmetric_library(Rng& rng, int count, ClassId label);

}  // namespace voxcraft::testing

#endif  // VOXCRAFT_TESTS_ORACLES_HPP

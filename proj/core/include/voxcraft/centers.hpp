// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_CENTERS_HPP
#define VOXCRAFT_CENTERS_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/semantic_grid.hpp"

namespace voxcraft {

// 0/1 occupancy with the geometry of the grid it came from.
struct BinaryGrid {
  VoxelCoord origin;
  Dims dims;
  std::vector<std::uint8_t> cells;

  std::size_t index(std::uint32_t x, std::uint32_t y, std::uint32_t z) const noexcept {
    return x + static_cast<std::size_t>(dims.x) * (y + static_cast<std::size_t>(dims.y) * z);
  }
};

BinaryGrid binarize(const SemanticGrid& grid);

// Mean occupancy of the k^3 window centred on every voxel, zero padded at the
// borders. `counts` holds the raw window sums; value(i) = counts[i] / k^3.
struct DensityField {
  Dims dims;
  int kernel = 1;
  std::vector<std::uint32_t> counts;

  double value(std::size_t idx) const noexcept {
    return static_cast<double>(counts[idx]) / (static_cast<double>(kernel) * kernel * kernel);
  }
  std::vector<double> values() const;
};

// Throws InvalidKernel unless k is odd and positive.
DensityField density_map(const BinaryGrid& binary, int kernel);

struct Candidate {
  VoxelCoord position;  // world coordinates
  ClassId label = kEmptyClass;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

// Occupied voxels whose density is >= tau, in storage order. Throws
// DimensionMismatch when the field does not match the grid.
std::vector<Candidate> extract_candidates(const SemanticGrid& grid, const DensityField& density,
                                          double tau);

struct DbscanResult {
  // Point indices; members ascending, clusters ordered by their smallest core
  // point index.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> noise;
};

// Standard DBSCAN with an L2 radius `eta` (inclusive) and `min_pts` counting
// the point itself. A border point joins the earliest-discovered cluster that
// reaches it, which matches sequential DBSCAN visiting points in index order.
// Throws InvalidParameter unless eta > 0 and min_pts >= 1.
DbscanResult dbscan(std::span<const Eigen::Vector3d> points, double eta, int min_pts);

struct CenterParams {
  int kernel = 3;
  double tau = 0.2;
  double eta = 2.0;
  int min_pts = 1;

  void validate() const;
};

struct Center {
  int id = 0;
  ClassId label = kEmptyClass;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // member centroid
  std::size_t member_count = 0;
  std::vector<VoxelCoord> members;  // empty when loaded from centers.json
};

struct CenterSet {
  std::vector<Center> centers;
  CenterParams params;
  std::size_t candidate_count = 0;
  std::size_t noise_dropped = 0;
};

// Clusters each class separately; one centre per cluster. Ids follow class
// order, then cluster order. Noise points are dropped and counted.
CenterSet cluster_centroids(std::span<const Candidate> candidates, double eta, int min_pts);

// binarize -> density_map -> extract_candidates -> cluster_centroids.
CenterSet extract_centers(const SemanticGrid& grid, const CenterParams& params);

// centers.json: [{"id":0,"class":"chair","pos":[x,y,z],"members":n}, ...]
std::string centers_to_json(const CenterSet& set, const ClassTable& table);
// Throws FormatError / UnknownClass / InvalidParameter (duplicate ids,
// non-finite positions).
CenterSet parse_centers_json(std::string_view text, const ClassTable& table);
CenterSet load_centers(const std::filesystem::path& path, const ClassTable& table);

}  // namespace voxcraft

#endif  // VOXCRAFT_CENTERS_HPP

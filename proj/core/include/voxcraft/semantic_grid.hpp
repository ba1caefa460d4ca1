// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_SEMANTIC_GRID_HPP
#define VOXCRAFT_SEMANTIC_GRID_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "voxcraft/class_table.hpp"
#include "voxcraft/types.hpp"

namespace voxcraft {

// Dense X*Y*Z array of class ids anchored at a world origin. Storage order is
// x-fastest: idx = x + X * (y + Y * z). Instances are immutable; algorithms
// build a new label vector and construct a new grid from it.
class SemanticGrid {
 public:
  // Throws DimensionMismatch if labels.size() != dims.volume() or a dimension
  // is zero, and TargetIdOutOfRange if a label is not a valid id of `table`.
  SemanticGrid(VoxelCoord origin, Dims dims, std::vector<ClassId> labels,
               std::shared_ptr<const ClassTable> table);

  // All-empty grid.
  static SemanticGrid empty(VoxelCoord origin, Dims dims,
                            std::shared_ptr<const ClassTable> table);
  static SemanticGrid empty(const Aabb& bounds,
                            std::shared_ptr<const ClassTable> table);

  const VoxelCoord& origin() const noexcept { return origin_; }
  const Dims& dims() const noexcept { return dims_; }
  Aabb bounds() const { return Aabb::from_origin_dims(origin_, dims_); }
  std::span<const ClassId> labels() const noexcept { return labels_; }
  const ClassTable& classes() const noexcept { return *table_; }
  const std::shared_ptr<const ClassTable>& class_table_ptr() const noexcept {
    return table_;
  }

  std::size_t size() const noexcept { return labels_.size(); }

  std::size_t index(std::uint32_t x, std::uint32_t y,
                    std::uint32_t z) const noexcept {
    return x + static_cast<std::size_t>(dims_.x) *
                   (y + static_cast<std::size_t>(dims_.y) * z);
  }
  // Grid-local (x, y, z) of a linear index.
  VoxelCoord local_of(std::size_t idx) const noexcept;
  VoxelCoord world_of(std::size_t idx) const noexcept {
    return origin_ + local_of(idx);
  }
  bool contains(VoxelCoord world) const noexcept;
  std::optional<std::size_t> index_of(VoxelCoord world) const noexcept;

  ClassId at(std::uint32_t x, std::uint32_t y, std::uint32_t z) const noexcept {
    return labels_[index(x, y, z)];
  }
  // Empty outside the grid.
  ClassId at_world(VoxelCoord world) const noexcept;

  std::size_t count_non_empty() const noexcept;

  // Same geometry and class table, new labels.
  SemanticGrid with_labels(std::vector<ClassId> labels) const;

  // Geometry, class names and labels all equal.
  friend bool operator==(const SemanticGrid& a, const SemanticGrid& b);

 private:
  VoxelCoord origin_;
  Dims dims_;
  std::vector<ClassId> labels_;
  std::shared_ptr<const ClassTable> table_;
};

// Replaces every label by its mapped id in `target`. Empty stays empty.
SemanticGrid remap_classes(const SemanticGrid& grid, const ClassMap& map,
                           std::shared_ptr<const ClassTable> target);

}  // namespace voxcraft

#endif  // VOXCRAFT_SEMANTIC_GRID_HPP

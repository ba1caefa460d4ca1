// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/semantic_grid.hpp"

#include <algorithm>
#include <sstream>

#include "voxcraft/error.hpp"

namespace voxcraft {

Aabb::Aabb(VoxelCoord min, VoxelCoord max) : min_(min), max_(max) {
  if (min.x > max.x || min.y > max.y || min.z > max.z) {
    std::ostringstream msg;
    msg << "box min " << min << " exceeds max " << max;
    fail(ErrorCode::InvalidAabb, msg.str());
  }
}

Aabb Aabb::from_origin_dims(VoxelCoord origin, Dims dims) {
  if (dims.x == 0 || dims.y == 0 || dims.z == 0) {
    fail(ErrorCode::InvalidAabb, "box dimensions must be positive");
  }
  return Aabb(origin, {origin.x + static_cast<std::int32_t>(dims.x) - 1,
                       origin.y + static_cast<std::int32_t>(dims.y) - 1,
                       origin.z + static_cast<std::int32_t>(dims.z) - 1});
}

Dims Aabb::extents() const noexcept {
  return {static_cast<std::uint32_t>(max_.x - min_.x + 1),
          static_cast<std::uint32_t>(max_.y - min_.y + 1),
          static_cast<std::uint32_t>(max_.z - min_.z + 1)};
}

std::int64_t Aabb::volume() const noexcept {
  return static_cast<std::int64_t>(max_.x - min_.x + 1) *
         (max_.y - min_.y + 1) * (max_.z - min_.z + 1);
}

bool Aabb::contains(VoxelCoord v) const noexcept {
  return v.x >= min_.x && v.x <= max_.x && v.y >= min_.y && v.y <= max_.y &&
         v.z >= min_.z && v.z <= max_.z;
}

bool Aabb::contains(const Aabb& other) const noexcept {
  return contains(other.min_) && contains(other.max_);
}

bool Aabb::on_boundary(VoxelCoord v) const noexcept {
  if (!contains(v)) return false;
  return v.x == min_.x || v.x == max_.x || v.y == min_.y || v.y == max_.y ||
         v.z == min_.z || v.z == max_.z;
}

Aabb Aabb::translated(VoxelCoord delta) const {
  return Aabb(min_ + delta, max_ + delta);
}

SemanticGrid::SemanticGrid(VoxelCoord origin, Dims dims, std::vector<ClassId> labels,
                           std::shared_ptr<const ClassTable> table)
    : origin_(origin), dims_(dims), labels_(std::move(labels)), table_(std::move(table)) {
  if (!table_) table_ = std::make_shared<const ClassTable>(ClassTable::indoor());
  if (dims_.x == 0 || dims_.y == 0 || dims_.z == 0) {
    fail(ErrorCode::DimensionMismatch, "grid dimensions must be positive");
  }
  if (labels_.size() != dims_.volume()) {
    fail(ErrorCode::DimensionMismatch,
         "grid declares " + std::to_string(dims_.volume()) + " voxels but holds " +
             std::to_string(labels_.size()) + " labels");
  }
  const auto limit = table_->size();
  if (std::any_of(labels_.begin(), labels_.end(),
                  [limit](ClassId id) { return id >= limit; })) {
    fail(ErrorCode::TargetIdOutOfRange, "grid label exceeds class table size");
  }
}

SemanticGrid SemanticGrid::empty(VoxelCoord origin, Dims dims,
                                 std::shared_ptr<const ClassTable> table) {
  return SemanticGrid(origin, dims, std::vector<ClassId>(dims.volume(), kEmptyClass),
                      std::move(table));
}

SemanticGrid SemanticGrid::empty(const Aabb& bounds,
                                 std::shared_ptr<const ClassTable> table) {
  return empty(bounds.min(), bounds.extents(), std::move(table));
}

VoxelCoord SemanticGrid::local_of(std::size_t idx) const noexcept {
  const auto x = idx % dims_.x;
  const auto rest = idx / dims_.x;
  const auto y = rest % dims_.y;
  const auto z = rest / dims_.y;
  return {static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
          static_cast<std::int32_t>(z)};
}

bool SemanticGrid::contains(VoxelCoord world) const noexcept {
  const auto local = world - origin_;
  return local.x >= 0 && local.y >= 0 && local.z >= 0 &&
         static_cast<std::uint32_t>(local.x) < dims_.x &&
         static_cast<std::uint32_t>(local.y) < dims_.y &&
         static_cast<std::uint32_t>(local.z) < dims_.z;
}

std::optional<std::size_t> SemanticGrid::index_of(VoxelCoord world) const noexcept {
  if (!contains(world)) return std::nullopt;
  const auto local = world - origin_;
  return index(static_cast<std::uint32_t>(local.x), static_cast<std::uint32_t>(local.y),
               static_cast<std::uint32_t>(local.z));
}

ClassId SemanticGrid::at_world(VoxelCoord world) const noexcept {
  auto idx = index_of(world);
  return idx ? labels_[*idx] : kEmptyClass;
}

std::size_t SemanticGrid::count_non_empty() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(labels_.begin(), labels_.end(),
                    [](ClassId id) { return id != kEmptyClass; }));
}

SemanticGrid SemanticGrid::with_labels(std::vector<ClassId> labels) const {
  return SemanticGrid(origin_, dims_, std::move(labels), table_);
}

bool operator==(const SemanticGrid& a, const SemanticGrid& b) {
  return a.origin_ == b.origin_ && a.dims_ == b.dims_ && a.labels_ == b.labels_ &&
         *a.table_ == *b.table_;
}

SemanticGrid remap_classes(const SemanticGrid& grid, const ClassMap& map,
                           std::shared_ptr<const ClassTable> target) {
  const auto& source = grid.classes();
  std::vector<ClassId> lookup(source.size(), kEmptyClass);
  // Only classes that actually occur need to resolve.
  std::vector<bool> used(source.size(), false);
  for (ClassId id : grid.labels()) used[id] = true;
  for (std::size_t id = 1; id < source.size(); ++id) {
    if (used[id]) lookup[id] = map.resolve(source.name(static_cast<ClassId>(id)), *target);
  }
  std::vector<ClassId> labels(grid.size());
  std::transform(grid.labels().begin(), grid.labels().end(), labels.begin(),
                 [&lookup](ClassId id) { return lookup[id]; });
  return SemanticGrid(grid.origin(), grid.dims(), std::move(labels), std::move(target));
}

}  // namespace voxcraft

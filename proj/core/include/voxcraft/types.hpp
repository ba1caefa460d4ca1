// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_TYPES_HPP
#define VOXCRAFT_TYPES_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace voxcraft {

// Integer world-block coordinate. One block is roughly one metre.
struct VoxelCoord {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t z = 0;

  friend auto operator<=>(const VoxelCoord&, const VoxelCoord&) = default;

  friend VoxelCoord operator+(VoxelCoord a, VoxelCoord b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend VoxelCoord operator-(VoxelCoord a, VoxelCoord b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend std::ostream& operator<<(std::ostream& os, VoxelCoord v) {
    return os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
  }
};

struct VoxelCoordHash {
  std::size_t operator()(const VoxelCoord& v) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(v.x);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(v.y);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint32_t>(v.z);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct Dims {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;

  friend bool operator==(const Dims&, const Dims&) = default;

  std::size_t volume() const noexcept {
    return static_cast<std::size_t>(x) * y * z;
  }
};

// Closed integer box [min, max] on every axis.
class Aabb {
 public:
  Aabb() = default;
  // Throws InvalidAabb unless min <= max componentwise.
  Aabb(VoxelCoord min, VoxelCoord max);

  static Aabb from_origin_dims(VoxelCoord origin, Dims dims);

  const VoxelCoord& min() const noexcept { return min_; }
  const VoxelCoord& max() const noexcept { return max_; }

  Dims extents() const noexcept;
  std::int64_t volume() const noexcept;
  bool contains(VoxelCoord v) const noexcept;
  bool contains(const Aabb& other) const noexcept;
  bool on_boundary(VoxelCoord v) const noexcept;
  Aabb translated(VoxelCoord delta) const;

  friend bool operator==(const Aabb&, const Aabb&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Aabb& b) {
    return os << '[' << b.min_ << " .. " << b.max_ << ']';
  }

 private:
  VoxelCoord min_{};
  VoxelCoord max_{};
};

}  // namespace voxcraft

#endif  // VOXCRAFT_TYPES_HPP

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_WORLD_MAP_HPP
#define VOXCRAFT_WORLD_MAP_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "voxcraft/class_table.hpp"
#include "voxcraft/nbt.hpp"
#include "voxcraft/semantic_grid.hpp"
#include "voxcraft/types.hpp"

namespace voxcraft {

inline constexpr std::string_view kAirBlock = "minecraft:air";

// Block names that count as empty space.
bool is_air_block(std::string_view name) noexcept;

// Coordinate -> block-name lookup over a dense box of the world. Positions
// outside the box read as air.
class WorldMap {
 public:
  // `blocks` holds palette indices in x-fastest order over `bounds`. An air
  // entry is appended to the palette when none is present.
  // Throws DimensionMismatch or PaletteIndexOutOfRange.
  WorldMap(Aabb bounds, std::vector<std::string> palette, std::vector<std::uint32_t> blocks);

  // Empty (all-air) world over `bounds`.
  explicit WorldMap(Aabb bounds);

  const Aabb& bounds() const noexcept { return bounds_; }
  const std::vector<std::string>& palette() const noexcept { return palette_; }
  std::span<const std::uint32_t> blocks() const noexcept { return blocks_; }
  std::uint32_t air_index() const noexcept { return air_index_; }

  std::string_view query(VoxelCoord v) const noexcept;
  std::uint32_t palette_index_at(VoxelCoord v) const noexcept;

  // Returns the palette index for `name`, adding it if needed.
  std::uint32_t intern(std::string_view name);
  // Throws InvalidAabb when `v` lies outside bounds.
  void set(VoxelCoord v, std::string_view name);

 private:
  std::size_t index(VoxelCoord v) const noexcept;

  Aabb bounds_;
  std::vector<std::string> palette_;
  std::unordered_map<std::string, std::uint32_t> palette_index_;
  std::vector<std::uint32_t> blocks_;
  std::uint32_t air_index_ = 0;
};

// Sponge schematic v2 subset: Width/Height/Length, Palette, BlockData.
// Block data is stored x-fastest, then z, then y. Errors: MissingField,
// PaletteIndexOutOfRange, VarintOverflow, plus anything from nbt::parse.
WorldMap world_from_schematic(const nbt::NamedTag& root);
WorldMap load_schematic(const std::filesystem::path& path);
// Gzip-compressed schematic v2 bytes; bounds are rebased to the origin.
std::vector<std::uint8_t> encode_schematic(const WorldMap& world);

// {"bounds":{"min":[x,y,z],"max":[x,y,z]},"blocks":[[x,y,z,"name"],...]};
// unlisted blocks are air.
WorldMap parse_world_json(std::string_view text);
std::string world_to_json(const WorldMap& world);

// .schem / .schematic -> schematic, anything else -> world.json.
WorldMap load_world(const std::filesystem::path& path);

// Semantic labels for every voxel of `box`: air is empty, any other block
// name resolves through `map` into `table`.
SemanticGrid extract_occupancy(const WorldMap& world, const Aabb& box, const ClassMap& map,
                               std::shared_ptr<const ClassTable> table);

}  // namespace voxcraft

#endif  // VOXCRAFT_WORLD_MAP_HPP

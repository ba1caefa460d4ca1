// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_GRID_IO_HPP
#define VOXCRAFT_GRID_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/semantic_grid.hpp"

namespace voxcraft {

enum class GridFormat {
  Binary,   // "VXG1"
  OccJson,  // sparse occ.json
};

// .json -> OccJson, anything else -> Binary.
GridFormat format_from_path(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_grid_binary(const SemanticGrid& grid);
SemanticGrid decode_grid_binary(std::span<const std::uint8_t> bytes);

// Voxel coordinates in occ.json are world coordinates. `stride` > 1 keeps
// only voxels whose grid-local coordinates are all multiples of the stride.
std::string encode_occ_json(const SemanticGrid& grid, std::uint32_t stride = 1);
// When "classes" is absent the indoor table is assumed.
SemanticGrid decode_occ_json(std::string_view text);

SemanticGrid load_grid(const std::filesystem::path& path, GridFormat format);
inline SemanticGrid load_grid(const std::filesystem::path& path) {
  return load_grid(path, format_from_path(path));
}
void save_grid(const SemanticGrid& grid, const std::filesystem::path& path,
               GridFormat format);
inline void save_grid(const SemanticGrid& grid,
                      const std::filesystem::path& path) {
  save_grid(grid, path, format_from_path(path));
}

// Small file helpers shared by the loaders.
std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view text);

}  // namespace voxcraft

#endif  // VOXCRAFT_GRID_IO_HPP

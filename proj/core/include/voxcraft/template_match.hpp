// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_TEMPLATE_MATCH_HPP
#define VOXCRAFT_TEMPLATE_MATCH_HPP

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/centers.hpp"
#include "voxcraft/semantic_grid.hpp"

namespace voxcraft {

struct BlockPlacement {
  VoxelCoord offset;
  std::string block;

  friend bool operator==(const BlockPlacement&, const BlockPlacement&) = default;
};

// A furniture shape in its local frame (minimum corner at the origin).
struct Template {
  std::string name;
  ClassId label = kEmptyClass;
  std::vector<VoxelCoord> voxels;  // sorted, unique
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();  // mean of voxels
  // Blocks to place, relative to the same frame as `voxels`. When empty the
  // voxels are stamped with the class default block.
  std::vector<BlockPlacement> recipe;

  Dims extents() const;
};

// Normalises `voxels` (and `recipe` by the same shift) so the minimum corner
// is at the origin and computes the anchor. Throws EmptyInstance when there
// are no voxels.
Template make_template(std::string name, ClassId label, std::vector<VoxelCoord> voxels,
                       std::vector<BlockPlacement> recipe = {});

struct TemplateLibrary {
  std::vector<Template> templates;
};

// templates.json: [{"name":..,"class":..,"voxels":[[x,y,z],..],
//                   "blocks":[[x,y,z,"block"],..]}]
TemplateLibrary parse_templates_json(std::string_view text, const ClassTable& table);
TemplateLibrary load_templates(const std::filesystem::path& path, const ClassTable& table);
std::string templates_to_json(const TemplateLibrary& library, const ClassTable& table);

// Occupied voxels of one instance in world coordinates.
struct InstanceCrop {
  Aabb window;
  std::vector<VoxelCoord> occupied;  // sorted
};

// Voxels labelled `center.label` inside the (2r+1)^3 window centred on the
// rounded centroid, clipped to the grid. Throws InvalidParameter for r < 1.
InstanceCrop crop_instance(const SemanticGrid& grid, const Center& center, int radius);

// Clockwise (seen from above) quarter turns: north -> east -> south -> west.
std::string rotate_block_state(std::string_view block, int quarter_turns);

// Rotation about the vertical axis, re-anchored at the origin. Throws
// UnsupportedAngle unless degrees is 0, 90, 180 or 270.
Template rotate_template(const Template& tmpl, int degrees);


// Translation moving `shape`'s anchor onto the instance centroid, rounded to
// whole blocks (half-integers towards +inf).
VoxelCoord anchor_alignment(std::span<const VoxelCoord> instance, const Eigen::Vector3d& anchor);

// |A n (B+t)| / |A u (B+t)| for sorted unique voxel sets.
double iou_at(std::span<const VoxelCoord> a, std::span<const VoxelCoord> b, VoxelCoord t);

struct IouResult {
  double iou = 0.0;
  VoxelCoord translation;
};

// IoU after anchor-to-centroid alignment of `shape` (anchor = mean of
// `shape`). Throws EmptyInstance when `instance` is empty.
IouResult voxel_iou(std::span<const VoxelCoord> instance, std::span<const VoxelCoord> shape);

struct MatchOptions {
  std::vector<int> rotations{0, 90, 180, 270};
  int crop_radius = 5;
  double min_iou = 0.25;
  // Also try +-1 block shifts around the aligned position.
  bool jitter = false;

  void validate() const;
};

struct MatchResult {
  std::size_t template_index = 0;
  int rotation = 0;
  double iou = 0.0;
  VoxelCoord placement;  // world translation of the rotated template frame
};

// Exhaustive argmax over (templates of `label`) x (rotations). Ties go to the
// earlier rotation in options.rotations, then to the lower template index.
// Returns nullopt when the library has no template of the class.
std::optional<MatchResult> best_match(std::span<const VoxelCoord> instance,
                                      const TemplateLibrary& library, ClassId label,
                                      const MatchOptions& options = {});

// Retrieval outcome for one centre; `match` is empty when the class has no
// template in the library.
struct InstanceMatch {
  int center_id = 0;
  ClassId label = kEmptyClass;
  std::optional<MatchResult> match;
};

// Crops every centre and runs best_match on it. Centres whose crop is empty
// get no match.
std::vector<InstanceMatch> match_instances(const SemanticGrid& grid, const CenterSet& centers,
                                           const TemplateLibrary& library,
                                           const MatchOptions& options);

// matches.json: [{"center":id,"class":..,"template":name|null,
//                 "template_index":j,"rotation":deg,"iou":x,"placement":[x,y,z]}]
std::string matches_to_json(std::span<const InstanceMatch> matches,
                            const TemplateLibrary& library, const ClassTable& table);
std::vector<InstanceMatch> parse_matches_json(std::string_view text,
                                              const TemplateLibrary& library,
                                              const ClassTable& table);

}  // namespace voxcraft

#endif  // VOXCRAFT_TEMPLATE_MATCH_HPP

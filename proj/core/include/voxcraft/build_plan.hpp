// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_BUILD_PLAN_HPP
#define VOXCRAFT_BUILD_PLAN_HPP

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "voxcraft/centers.hpp"
#include "voxcraft/semantic_grid.hpp"
#include "voxcraft/template_match.hpp"

namespace voxcraft {

struct SetBlock {
  VoxelCoord pos;
  std::string block;
  friend bool operator==(const SetBlock&, const SetBlock&) = default;
};

struct Fill {
  Aabb box;
  std::string block;
  friend bool operator==(const Fill&, const Fill&) = default;
};

struct Clear {
  Aabb box;
  friend bool operator==(const Clear&, const Clear&) = default;
};

using BuildCommand = std::variant<Clear, Fill, SetBlock>;

// Default block for every non-empty class.
class BlockTable {
 public:
  BlockTable() = default;
  explicit BlockTable(std::map<ClassId, std::string> blocks) : blocks_(std::move(blocks)) {}

  // Vanilla blocks for the indoor classes present in `table`; other classes
  // fall back to "minecraft:white_wool".
  static BlockTable defaults(const ClassTable& table);

  // Throws UnknownBlockName when no block is configured.
  const std::string& block_for(ClassId id) const;
  void set(ClassId id, std::string block) { blocks_[id] = std::move(block); }
  const std::map<ClassId, std::string>& entries() const noexcept { return blocks_; }

 private:
  std::map<ClassId, std::string> blocks_;
};

// {"wall":"minecraft:smooth_quartz", ...}; entries override the defaults.
BlockTable load_block_table(const std::filesystem::path& path, const ClassTable& table);
BlockTable parse_block_table(std::string_view text, const ClassTable& table);

// ids of ceiling, floor, wall and window that exist in `table`.
std::set<ClassId> default_structural_classes(const ClassTable& table);

// Greedy cuboid cover of each selected class: runs along x, equal runs merged
// along z, equal slabs merged along y. Boxes are disjoint and their union is
// exactly the selected voxels. Classes are processed in ascending id order.
std::vector<Fill> coalesce_cuboids(const SemanticGrid& grid, const std::set<ClassId>& classes,
                                   const BlockTable& blocks);

// Voxel-level edits applied after instance stamping. Removals become air.
struct PlanPatch {
  std::vector<SetBlock> additions;
  std::vector<VoxelCoord> removals;
};

struct PlanConfig {
  std::set<ClassId> structural;
  BlockTable blocks;
  MatchOptions match;
  PlanPatch patch;
};

struct PlanConflict {
  VoxelCoord pos;
  std::string previous;
  std::string replacement;
  int center_id = -1;
};

struct PlanDiagnostics {
  std::size_t structural_fills = 0;
  std::size_t instances = 0;
  std::size_t template_instances = 0;
  std::size_t fallback_instances = 0;
  std::size_t dropped_out_of_bounds = 0;
  std::vector<PlanConflict> conflicts;
};

struct BuildPlan {
  Aabb bounds;
  // Clear first, then Fill, then SetBlock.
  std::vector<BuildCommand> commands;
  // Every block name used by the plan, with the class it stands for.
  std::map<std::string, ClassId, std::less<>> block_classes;
  PlanDiagnostics diagnostics;
};

// Clear(bounds), coalesced Fills for structural classes, template stamps for
// matched instances and raw-voxel SetBlocks for unmatched or low-IoU ones
// (centres of structural classes are skipped), then the patch. Overlaps
// resolve last-writer-wins and are reported.
// `matches` must align 1:1 with `centers` (InvalidParameter otherwise).
BuildPlan emit_plan(const SemanticGrid& grid, const CenterSet& centers,
                    std::span<const InstanceMatch> matches, const TemplateLibrary& library,
                    const PlanConfig& config);

// Replays the commands into an empty grid over plan.bounds. Block names are
// looked up in full, then without block state; air always decodes to empty.
// Throws UnknownBlockName.
SemanticGrid decode_plan(const BuildPlan& plan,
                         const std::map<std::string, ClassId, std::less<>>& class_of_block,
                         std::shared_ptr<const ClassTable> table);
inline SemanticGrid decode_plan(const BuildPlan& plan, std::shared_ptr<const ClassTable> table) {
  return decode_plan(plan, plan.block_classes, std::move(table));
}

enum class Dialect { Vanilla, WorldEdit };

// Largest box a single vanilla /fill accepts; bigger boxes are split.
inline constexpr std::int64_t kVanillaFillLimit = 32768;

// vanilla:   "fill x1 y1 z1 x2 y2 z2 block", "setblock x y z block"
// worldedit: "//pos1 x,y,z", "//pos2 x,y,z", "//set block" per box
std::vector<std::string> render_commands(const BuildPlan& plan, Dialect dialect);
std::string render_text(const BuildPlan& plan, Dialect dialect);

std::string plan_to_json(const BuildPlan& plan, const ClassTable& table);
BuildPlan parse_plan_json(std::string_view text, const ClassTable& table);
BuildPlan load_plan(const std::filesystem::path& path, const ClassTable& table);

}  // namespace voxcraft

#endif  // VOXCRAFT_BUILD_PLAN_HPP

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/build_plan.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/world_map.hpp"

namespace voxcraft {

using nlohmann::json;

BlockTable BlockTable::defaults(const ClassTable& table) {
  static const std::map<std::string, std::string, std::less<>> kIndoor = {
      {"ceiling", "minecraft:white_concrete"}, {"floor", "minecraft:oak_planks"},
      {"wall", "minecraft:smooth_quartz"},     {"window", "minecraft:glass"},
      {"chair", "minecraft:oak_stairs"},       {"bed", "minecraft:red_wool"},
      {"sofa", "minecraft:gray_wool"},         {"table", "minecraft:spruce_planks"},
      {"tvs", "minecraft:black_concrete"},     {"furniture", "minecraft:bookshelf"},
      {"objects", "minecraft:flower_pot"},
  };
  std::map<ClassId, std::string> blocks;
  for (std::size_t id = 1; id < table.size(); ++id) {
    auto it = kIndoor.find(table.name(static_cast<ClassId>(id)));
    blocks.emplace(static_cast<ClassId>(id),
                   it != kIndoor.end() ? it->second : std::string("minecraft:white_wool"));
  }
  return BlockTable(std::move(blocks));
}

const std::string& BlockTable::block_for(ClassId id) const {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) {
    fail(ErrorCode::UnknownBlockName, "no block configured for class id " + std::to_string(id));
  }
  return it->second;
}

BlockTable parse_block_table(std::string_view text, const ClassTable& table) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("block table: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::FormatError, "block table: expected an object");
  auto blocks = BlockTable::defaults(table);
  for (const auto& [cls, block] : doc.items()) {
    if (!block.is_string() || block.get<std::string>().empty()) {
      fail(ErrorCode::FormatError, "block table: block for '" + cls + "' must be a name");
    }
    const auto id = table.id(cls);
    if (id == kEmptyClass) fail(ErrorCode::FormatError, "block table: the empty class has no block");
    blocks.set(id, block.get<std::string>());
  }
  return blocks;
}

BlockTable load_block_table(const std::filesystem::path& path, const ClassTable& table) {
  return parse_block_table(read_file_text(path), table);
}

std::set<ClassId> default_structural_classes(const ClassTable& table) {
  std::set<ClassId> out;
  for (const char* name : {"ceiling", "floor", "wall", "window"}) {
    if (auto id = table.find(name)) out.insert(*id);
  }
  return out;
}

std::vector<Fill> coalesce_cuboids(const SemanticGrid& grid, const std::set<ClassId>& classes,
                                   const BlockTable& blocks) {
  std::vector<Fill> fills;
  const auto [nx, ny, nz] = grid.dims();
  const auto labels = grid.labels();
  std::vector<std::uint8_t> done(labels.size(), 0);

  for (const ClassId cls : classes) {
    if (cls == kEmptyClass) continue;
    const auto free = [&](std::uint32_t x, std::uint32_t y, std::uint32_t z) {
      const auto i = grid.index(x, y, z);
      return labels[i] == cls && !done[i];
    };
    for (std::uint32_t y = 0; y < ny; ++y) {
      for (std::uint32_t z = 0; z < nz; ++z) {
        for (std::uint32_t x = 0; x < nx; ++x) {
          if (!free(x, y, z)) continue;
          std::uint32_t x1 = x;
          while (x1 + 1 < nx && free(x1 + 1, y, z)) ++x1;

          const auto row_free = [&](std::uint32_t yy, std::uint32_t zz) {
            for (std::uint32_t xx = x; xx <= x1; ++xx) {
              if (!free(xx, yy, zz)) return false;
            }
            return true;
          };
          std::uint32_t z1 = z;
          while (z1 + 1 < nz && row_free(y, z1 + 1)) ++z1;

          const auto slab_free = [&](std::uint32_t yy) {
            for (std::uint32_t zz = z; zz <= z1; ++zz) {
              if (!row_free(yy, zz)) return false;
            }
            return true;
          };
          std::uint32_t y1 = y;
          while (y1 + 1 < ny && slab_free(y1 + 1)) ++y1;

          for (auto yy = y; yy <= y1; ++yy)
            for (auto zz = z; zz <= z1; ++zz)
              for (auto xx = x; xx <= x1; ++xx) done[grid.index(xx, yy, zz)] = 1;

          const auto& o = grid.origin();
          fills.push_back(
              {Aabb(o + VoxelCoord{static_cast<std::int32_t>(x), static_cast<std::int32_t>(y),
                                   static_cast<std::int32_t>(z)},
                    o + VoxelCoord{static_cast<std::int32_t>(x1), static_cast<std::int32_t>(y1),
                                   static_cast<std::int32_t>(z1)}),
               blocks.block_for(cls)});
        }
      }
    }
  }
  return fills;
}

BuildPlan emit_plan(const SemanticGrid& grid, const CenterSet& centers,
                    std::span<const InstanceMatch> matches, const TemplateLibrary& library,
                    const PlanConfig& config) {
  if (matches.size() != centers.centers.size()) {
    fail(ErrorCode::InvalidParameter, "emit_plan: " + std::to_string(matches.size()) +
                                          " matches for " +
                                          std::to_string(centers.centers.size()) + " centers");
  }
  for (std::size_t i = 0; i < matches.size(); ++i) {
    if (matches[i].center_id != centers.centers[i].id) {
      fail(ErrorCode::InvalidParameter, "emit_plan: match " + std::to_string(i) +
                                            " does not belong to center " +
                                            std::to_string(centers.centers[i].id));
    }
  }

  BuildPlan plan;
  plan.bounds = grid.bounds();
  plan.commands.emplace_back(Clear{plan.bounds});
  plan.block_classes.emplace(std::string(kAirBlock), kEmptyClass);
  const auto note_block = [&plan](const std::string& block, ClassId cls) {
    plan.block_classes.emplace(block, cls);
  };

  for (auto& fill : coalesce_cuboids(grid, config.structural, config.blocks)) {
    const auto cls = grid.at_world(fill.box.min());
    note_block(fill.block, cls);
    plan.commands.emplace_back(std::move(fill));
    ++plan.diagnostics.structural_fills;
  }

  // Who last wrote each voxel through a SetBlock; structural voxels fall back
  // to the grid.
  std::unordered_map<VoxelCoord, std::string, VoxelCoordHash> placed;
  const auto previous_block = [&](VoxelCoord pos) -> std::string {
    if (auto it = placed.find(pos); it != placed.end()) return it->second;
    const auto cls = grid.at_world(pos);
    if (cls != kEmptyClass && config.structural.count(cls)) return config.blocks.block_for(cls);
    return {};
  };
  const auto place = [&](VoxelCoord pos, const std::string& block, int center_id) {
    if (!plan.bounds.contains(pos)) {
      ++plan.diagnostics.dropped_out_of_bounds;
      return;
    }
    auto prev = previous_block(pos);
    if (!prev.empty() && prev != block && center_id >= 0) {
      plan.diagnostics.conflicts.push_back({pos, prev, block, center_id});
    }
    placed[pos] = block;
    plan.commands.emplace_back(SetBlock{pos, block});
  };

  std::vector<std::size_t> order(centers.centers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return centers.centers[a].id < centers.centers[b].id;
  });

  for (const auto i : order) {
    const auto& center = centers.centers[i];
    const auto& m = matches[i];
    // Structural classes are already covered by the fills.
    if (config.structural.count(center.label)) continue;
    ++plan.diagnostics.instances;
    if (m.match && m.match->iou >= config.match.min_iou) {
      const auto& base = library.templates.at(m.match->template_index);
      const auto rotated = rotate_template(base, m.match->rotation);
      ++plan.diagnostics.template_instances;
      if (rotated.recipe.empty()) {
        const auto& block = config.blocks.block_for(rotated.label);
        note_block(block, rotated.label);
        for (const auto& v : rotated.voxels) place(v + m.match->placement, block, center.id);
      } else {
        for (const auto& b : rotated.recipe) {
          note_block(b.block, rotated.label);
          place(b.offset + m.match->placement, b.block, center.id);
        }
      }
    } else {
      ++plan.diagnostics.fallback_instances;
      const auto crop = crop_instance(grid, center, config.match.crop_radius);
      const auto& block = config.blocks.block_for(center.label);
      note_block(block, center.label);
      for (const auto& v : crop.occupied) place(v, block, center.id);
    }
  }

  for (const auto& add : config.patch.additions) {
    if (add.block.empty()) fail(ErrorCode::UnknownBlockName, "patch block name is empty");
    place(add.pos, add.block, -1);
  }
  for (const auto& pos : config.patch.removals) place(pos, std::string(kAirBlock), -1);
  return plan;
}

namespace {

ClassId lookup_block(const std::map<std::string, ClassId, std::less<>>& class_of_block,
                     std::string_view block) {
  if (auto it = class_of_block.find(block); it != class_of_block.end()) return it->second;
  const auto base = strip_block_state(block);
  if (auto it = class_of_block.find(base); it != class_of_block.end()) return it->second;
  if (is_air_block(block)) return kEmptyClass;
  fail(ErrorCode::UnknownBlockName, "no class for block '" + std::string(block) + "'");
}

}  // namespace

SemanticGrid decode_plan(const BuildPlan& plan,
                         const std::map<std::string, ClassId, std::less<>>& class_of_block,
                         std::shared_ptr<const ClassTable> table) {
  auto grid = SemanticGrid::empty(plan.bounds, table);
  std::vector<ClassId> labels(grid.size(), kEmptyClass);
  const auto paint = [&](const Aabb& box, ClassId cls) {
    const auto lo = box.min(), hi = box.max();
    for (auto z = std::max(lo.z, plan.bounds.min().z); z <= std::min(hi.z, plan.bounds.max().z); ++z)
      for (auto y = std::max(lo.y, plan.bounds.min().y); y <= std::min(hi.y, plan.bounds.max().y); ++y)
        for (auto x = std::max(lo.x, plan.bounds.min().x); x <= std::min(hi.x, plan.bounds.max().x);
             ++x) {
          labels[*grid.index_of({x, y, z})] = cls;
        }
  };
  for (const auto& cmd : plan.commands) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Clear>) {
            paint(c.box, kEmptyClass);
          } else if constexpr (std::is_same_v<T, Fill>) {
            paint(c.box, lookup_block(class_of_block, c.block));
          } else {
            const auto cls = lookup_block(class_of_block, c.block);
            if (auto idx = grid.index_of(c.pos)) labels[*idx] = cls;
          }
        },
        cmd);
  }
  return grid.with_labels(std::move(labels));
}

namespace {

void split_box(const Aabb& box, std::int64_t limit, std::vector<Aabb>& out) {
  if (box.volume() <= limit) {
    out.push_back(box);
    return;
  }
  const auto e = box.extents();
  auto lo = box.min(), hi = box.max();
  // Halve the longest axis; y first on ties keeps slabs horizontal.
  if (e.y >= e.x && e.y >= e.z) {
    const auto mid = lo.y + static_cast<std::int32_t>(e.y / 2) - 1;
    split_box(Aabb(lo, {hi.x, mid, hi.z}), limit, out);
    split_box(Aabb({lo.x, mid + 1, lo.z}, hi), limit, out);
  } else if (e.x >= e.z) {
    const auto mid = lo.x + static_cast<std::int32_t>(e.x / 2) - 1;
    split_box(Aabb(lo, {mid, hi.y, hi.z}), limit, out);
    split_box(Aabb({mid + 1, lo.y, lo.z}, hi), limit, out);
  } else {
    const auto mid = lo.z + static_cast<std::int32_t>(e.z / 2) - 1;
    split_box(Aabb(lo, {hi.x, hi.y, mid}), limit, out);
    split_box(Aabb({lo.x, lo.y, mid + 1}, hi), limit, out);
  }
}

std::string xyz(VoxelCoord v, char sep) {
  std::ostringstream os;
  os << v.x << sep << v.y << sep << v.z;
  return os.str();
}

}  // namespace

std::vector<std::string> render_commands(const BuildPlan& plan, Dialect dialect) {
  std::vector<std::string> lines;
  const auto box_lines = [&](const Aabb& box, const std::string& block) {
    if (dialect == Dialect::WorldEdit) {
      lines.push_back("//pos1 " + xyz(box.min(), ','));
      lines.push_back("//pos2 " + xyz(box.max(), ','));
      lines.push_back("//set " + block);
      return;
    }
    std::vector<Aabb> parts;
    split_box(box, kVanillaFillLimit, parts);
    for (const auto& p : parts) {
      lines.push_back("fill " + xyz(p.min(), ' ') + " " + xyz(p.max(), ' ') + " " + block);
    }
  };
  for (const auto& cmd : plan.commands) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Clear>) {
            box_lines(c.box, std::string(kAirBlock));
          } else if constexpr (std::is_same_v<T, Fill>) {
            box_lines(c.box, c.block);
          } else {
            lines.push_back("setblock " + xyz(c.pos, ' ') + " " + c.block);
          }
        },
        cmd);
  }
  return lines;
}

std::string render_text(const BuildPlan& plan, Dialect dialect) {
  std::string out;
  for (const auto& line : render_commands(plan, dialect)) {
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

json coord_json(VoxelCoord v) { return {v.x, v.y, v.z}; }
json box_json(const Aabb& b) { return {{"min", coord_json(b.min())}, {"max", coord_json(b.max())}}; }

VoxelCoord coord_from(const json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::FormatError, "plan.json: expected [x,y,z]");
  return {j[0].get<std::int32_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>()};
}
Aabb box_from(const json& j) { return Aabb(coord_from(j.at("min")), coord_from(j.at("max"))); }

}  // namespace

std::string plan_to_json(const BuildPlan& plan, const ClassTable& table) {
  json doc;
  doc["bounds"] = box_json(plan.bounds);
  json blocks = json::object();
  for (const auto& [block, cls] : plan.block_classes) blocks[block] = table.name(cls);
  doc["block_classes"] = std::move(blocks);
  json commands = json::array();
  for (const auto& cmd : plan.commands) {
    std::visit(
        [&](const auto& c) {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, Clear>) {
            commands.push_back({{"op", "clear"}, {"box", box_json(c.box)}});
          } else if constexpr (std::is_same_v<T, Fill>) {
            commands.push_back({{"op", "fill"}, {"box", box_json(c.box)}, {"block", c.block}});
          } else {
            commands.push_back({{"op", "setblock"}, {"pos", coord_json(c.pos)}, {"block", c.block}});
          }
        },
        cmd);
  }
  doc["commands"] = std::move(commands);
  const auto& d = plan.diagnostics;
  json conflicts = json::array();
  for (const auto& c : d.conflicts) {
    conflicts.push_back({{"pos", coord_json(c.pos)},
                         {"previous", c.previous},
                         {"replacement", c.replacement},
                         {"center", c.center_id}});
  }
  doc["diagnostics"] = {{"structural_fills", d.structural_fills},
                        {"instances", d.instances},
                        {"template_instances", d.template_instances},
                        {"fallback_instances", d.fallback_instances},
                        {"dropped_out_of_bounds", d.dropped_out_of_bounds},
                        {"conflicts", std::move(conflicts)}};
  return doc.dump(2) + "\n";
}

BuildPlan parse_plan_json(std::string_view text, const ClassTable& table) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("plan.json: ") + e.what());
  }
  BuildPlan plan;
  try {
    plan.bounds = box_from(doc.at("bounds"));
    if (auto it = doc.find("block_classes"); it != doc.end()) {
      for (const auto& [block, cls] : it->items()) {
        plan.block_classes.emplace(block, table.id(cls.get<std::string>()));
      }
    }
    for (const auto& c : doc.at("commands")) {
      const auto op = c.at("op").get<std::string>();
      if (op == "clear") {
        plan.commands.emplace_back(Clear{box_from(c.at("box"))});
      } else if (op == "fill") {
        plan.commands.emplace_back(Fill{box_from(c.at("box")), c.at("block").get<std::string>()});
      } else if (op == "setblock") {
        plan.commands.emplace_back(
            SetBlock{coord_from(c.at("pos")), c.at("block").get<std::string>()});
      } else {
        fail(ErrorCode::FormatError, "plan.json: unknown op '" + op + "'");
      }
    }
    if (auto it = doc.find("diagnostics"); it != doc.end()) {
      auto& d = plan.diagnostics;
      d.structural_fills = it->value("structural_fills", std::size_t{0});
      d.instances = it->value("instances", std::size_t{0});
      d.template_instances = it->value("template_instances", std::size_t{0});
      d.fallback_instances = it->value("fallback_instances", std::size_t{0});
      d.dropped_out_of_bounds = it->value("dropped_out_of_bounds", std::size_t{0});
      if (auto cs = it->find("conflicts"); cs != it->end()) {
        for (const auto& c : *cs) {
          d.conflicts.push_back({coord_from(c.at("pos")), c.at("previous").get<std::string>(),
                                 c.at("replacement").get<std::string>(), c.at("center").get<int>()});
        }
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("plan.json: ") + e.what());
  }
  return plan;
}

BuildPlan load_plan(const std::filesystem::path& path, const ClassTable& table) {
  return parse_plan_json(read_file_text(path), table);
}

}  // namespace voxcraft

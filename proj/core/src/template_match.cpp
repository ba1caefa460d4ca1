// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/template_match.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

namespace {

std::int32_t round_half_up(double v) { return static_cast<std::int32_t>(std::floor(v + 0.5)); }

Eigen::Vector3d mean_of(std::span<const VoxelCoord> voxels) {
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& v : voxels) sum += Eigen::Vector3d(v.x, v.y, v.z);
  return sum / static_cast<double>(voxels.size());
}

VoxelCoord rotate_quarter(VoxelCoord v, int quarter_turns) {
  for (int i = 0; i < quarter_turns; ++i) v = {-v.z, v.y, v.x};
  return v;
}

}  // namespace

Dims Template::extents() const {
  VoxelCoord mx{};
  for (const auto& v : voxels) mx = {std::max(mx.x, v.x), std::max(mx.y, v.y), std::max(mx.z, v.z)};
  return {static_cast<std::uint32_t>(mx.x + 1), static_cast<std::uint32_t>(mx.y + 1),
          static_cast<std::uint32_t>(mx.z + 1)};
}

Template make_template(std::string name, ClassId label, std::vector<VoxelCoord> voxels,
                       std::vector<BlockPlacement> recipe) {
  if (voxels.empty()) {
    fail(ErrorCode::EmptyInstance, "template '" + name + "' has no voxels");
  }
  VoxelCoord mn = voxels.front();
  for (const auto& v : voxels) mn = {std::min(mn.x, v.x), std::min(mn.y, v.y), std::min(mn.z, v.z)};
  for (auto& v : voxels) v = v - mn;
  for (auto& b : recipe) b.offset = b.offset - mn;
  std::sort(voxels.begin(), voxels.end());
  voxels.erase(std::unique(voxels.begin(), voxels.end()), voxels.end());
  Template t;
  t.name = std::move(name);
  t.label = label;
  t.anchor = mean_of(voxels);
  t.voxels = std::move(voxels);
  t.recipe = std::move(recipe);
  return t;
}

TemplateLibrary parse_templates_json(std::string_view text, const ClassTable& table) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("templates.json: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorCode::FormatError, "templates.json: expected a list");
  TemplateLibrary library;
  for (const auto& entry : doc) {
    try {
      auto name = entry.at("name").get<std::string>();
      const ClassId label = table.id(entry.at("class").get<std::string>());
      std::vector<VoxelCoord> voxels;
      for (const auto& v : entry.at("voxels")) {
        voxels.push_back({v.at(0).get<std::int32_t>(), v.at(1).get<std::int32_t>(),
                          v.at(2).get<std::int32_t>()});
      }
      std::vector<BlockPlacement> recipe;
      if (auto it = entry.find("blocks"); it != entry.end()) {
        for (const auto& b : *it) {
          recipe.push_back({{b.at(0).get<std::int32_t>(), b.at(1).get<std::int32_t>(),
                             b.at(2).get<std::int32_t>()},
                            b.at(3).get<std::string>()});
        }
      }
      library.templates.push_back(
          make_template(std::move(name), label, std::move(voxels), std::move(recipe)));
    } catch (const json::exception& e) {
      fail(ErrorCode::FormatError, std::string("templates.json: ") + e.what());
    }
  }
  return library;
}

TemplateLibrary load_templates(const std::filesystem::path& path, const ClassTable& table) {
  return parse_templates_json(read_file_text(path), table);
}

std::string templates_to_json(const TemplateLibrary& library, const ClassTable& table) {
  json doc = json::array();
  for (const auto& t : library.templates) {
    json voxels = json::array();
    for (const auto& v : t.voxels) voxels.push_back({v.x, v.y, v.z});
    json entry{{"name", t.name}, {"class", table.name(t.label)}, {"voxels", std::move(voxels)}};
    if (!t.recipe.empty()) {
      json blocks = json::array();
      for (const auto& b : t.recipe) blocks.push_back({b.offset.x, b.offset.y, b.offset.z, b.block});
      entry["blocks"] = std::move(blocks);
    }
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

InstanceCrop crop_instance(const SemanticGrid& grid, const Center& center, int radius) {
  if (radius < 1) fail(ErrorCode::InvalidParameter, "crop radius must be >= 1");
  const VoxelCoord c{round_half_up(center.position.x()), round_half_up(center.position.y()),
                     round_half_up(center.position.z())};
  const VoxelCoord r{radius, radius, radius};
  InstanceCrop crop{Aabb(c - r, c + r), {}};
  const auto gb = grid.bounds();
  const VoxelCoord lo{std::max(crop.window.min().x, gb.min().x),
                      std::max(crop.window.min().y, gb.min().y),
                      std::max(crop.window.min().z, gb.min().z)};
  const VoxelCoord hi{std::min(crop.window.max().x, gb.max().x),
                      std::min(crop.window.max().y, gb.max().y),
                      std::min(crop.window.max().z, gb.max().z)};
  for (auto x = lo.x; x <= hi.x; ++x) {
    for (auto y = lo.y; y <= hi.y; ++y) {
      for (auto z = lo.z; z <= hi.z; ++z) {
        if (grid.at_world({x, y, z}) == center.label) crop.occupied.push_back({x, y, z});
      }
    }
  }
  return crop;
}

std::string rotate_block_state(std::string_view block, int quarter_turns) {
  static constexpr std::string_view kCycle[] = {"north", "east", "south", "west"};
  std::string out(block);
  const auto key = out.find("facing=");
  if (key == std::string::npos) return out;
  const auto start = key + 7;
  auto end = out.find_first_of(",]", start);
  if (end == std::string::npos) end = out.size();
  const std::string_view value(out.data() + start, end - start);
  for (int i = 0; i < 4; ++i) {
    if (value == kCycle[i]) {
      const auto turned = kCycle[((i + quarter_turns) % 4 + 4) % 4];
      out.replace(start, end - start, turned);
      break;
    }
  }
  return out;
}

Template rotate_template(const Template& tmpl, int degrees) {
  if (degrees != 0 && degrees != 90 && degrees != 180 && degrees != 270) {
    fail(ErrorCode::UnsupportedAngle,
         "rotation must be 0, 90, 180 or 270 degrees, got " + std::to_string(degrees));
  }
  const int turns = degrees / 90;
  if (turns == 0) return tmpl;
  std::vector<VoxelCoord> voxels;
  voxels.reserve(tmpl.voxels.size());
  for (const auto& v : tmpl.voxels) voxels.push_back(rotate_quarter(v, turns));
  std::vector<BlockPlacement> recipe;
  recipe.reserve(tmpl.recipe.size());
  for (const auto& b : tmpl.recipe) {
    recipe.push_back({rotate_quarter(b.offset, turns), rotate_block_state(b.block, turns)});
  }
  return make_template(tmpl.name, tmpl.label, std::move(voxels), std::move(recipe));
}

VoxelCoord anchor_alignment(std::span<const VoxelCoord> instance, const Eigen::Vector3d& anchor) {
  const Eigen::Vector3d d = mean_of(instance) - anchor;
  return {round_half_up(d.x()), round_half_up(d.y()), round_half_up(d.z())};
}

double iou_at(std::span<const VoxelCoord> a, std::span<const VoxelCoord> b, VoxelCoord t) {
  std::size_t i = 0, j = 0, inter = 0;
  while (i < a.size() && j < b.size()) {
    const auto bj = b[j] + t;
    if (a[i] < bj) {
      ++i;
    } else if (bj < a[i]) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  const auto uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

IouResult voxel_iou(std::span<const VoxelCoord> instance, std::span<const VoxelCoord> shape) {
  if (instance.empty()) fail(ErrorCode::EmptyInstance, "instance has no occupied voxels");
  if (shape.empty()) return {0.0, {}};
  std::vector<VoxelCoord> a(instance.begin(), instance.end());
  std::vector<VoxelCoord> b(shape.begin(), shape.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto t = anchor_alignment(a, mean_of(b));
  return {iou_at(a, b, t), t};
}

void MatchOptions::validate() const {
  if (rotations.empty()) fail(ErrorCode::InvalidParameter, "rotation set is empty");
  for (int r : rotations) {
    if (r != 0 && r != 90 && r != 180 && r != 270) {
      fail(ErrorCode::UnsupportedAngle, "unsupported rotation " + std::to_string(r));
    }
  }
  if (crop_radius < 1) fail(ErrorCode::InvalidParameter, "crop radius must be >= 1");
  if (!(min_iou >= 0.0 && min_iou <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "min_iou must lie in [0, 1]");
  }
}

std::optional<MatchResult> best_match(std::span<const VoxelCoord> instance,
                                      const TemplateLibrary& library, ClassId label,
                                      const MatchOptions& options) {
  options.validate();
  if (instance.empty()) fail(ErrorCode::EmptyInstance, "instance has no occupied voxels");
  std::vector<VoxelCoord> a(instance.begin(), instance.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());

  std::optional<MatchResult> best;
  for (int rotation : options.rotations) {
    for (std::size_t j = 0; j < library.templates.size(); ++j) {
      const auto& tmpl = library.templates[j];
      if (tmpl.label != label) continue;
      const auto rotated = rotate_template(tmpl, rotation);
      const auto aligned = anchor_alignment(a, rotated.anchor);
      MatchResult candidate{j, rotation, iou_at(a, rotated.voxels, aligned), aligned};
      if (options.jitter) {
        for (int dz = -1; dz <= 1; ++dz) {
          for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
              const auto t = aligned + VoxelCoord{dx, dy, dz};
              const double iou = iou_at(a, rotated.voxels, t);
              if (iou > candidate.iou) {
                candidate.iou = iou;
                candidate.placement = t;
              }
            }
          }
        }
      }
      if (!best || candidate.iou > best->iou) best = candidate;
    }
  }
  return best;
}

}  // namespace voxcraft

namespace voxcraft {

std::vector<InstanceMatch> match_instances(const SemanticGrid& grid, const CenterSet& centers,
                                           const TemplateLibrary& library,
                                           const MatchOptions& options) {
  options.validate();
  std::vector<InstanceMatch> out;
  out.reserve(centers.centers.size());
  for (const auto& center : centers.centers) {
    InstanceMatch m{center.id, center.label, std::nullopt};
    const auto crop = crop_instance(grid, center, options.crop_radius);
    if (!crop.occupied.empty()) m.match = best_match(crop.occupied, library, center.label, options);
    out.push_back(std::move(m));
  }
  return out;
}

std::string matches_to_json(std::span<const InstanceMatch> matches,
                            const TemplateLibrary& library, const ClassTable& table) {
  json doc = json::array();
  for (const auto& m : matches) {
    json entry{{"center", m.center_id}, {"class", table.name(m.label)}};
    if (m.match) {
      entry["template"] = library.templates.at(m.match->template_index).name;
      entry["template_index"] = m.match->template_index;
      entry["rotation"] = m.match->rotation;
      entry["iou"] = m.match->iou;
      entry["placement"] = {m.match->placement.x, m.match->placement.y, m.match->placement.z};
    } else {
      entry["template"] = nullptr;
    }
    doc.push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

std::vector<InstanceMatch> parse_matches_json(std::string_view text,
                                              const TemplateLibrary& library,
                                              const ClassTable& table) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("matches.json: ") + e.what());
  }
  if (!doc.is_array()) fail(ErrorCode::FormatError, "matches.json: expected a list");
  std::vector<InstanceMatch> out;
  for (const auto& entry : doc) {
    try {
      InstanceMatch m;
      m.center_id = entry.at("center").get<int>();
      m.label = table.id(entry.at("class").get<std::string>());
      if (!entry.at("template").is_null()) {
        MatchResult r;
        r.template_index = entry.at("template_index").get<std::size_t>();
        if (r.template_index >= library.templates.size()) {
          fail(ErrorCode::NoTemplate, "matches.json: template index out of range");
        }
        r.rotation = entry.at("rotation").get<int>();
        r.iou = entry.at("iou").get<double>();
        const auto& p = entry.at("placement");
        r.placement = {p.at(0).get<std::int32_t>(), p.at(1).get<std::int32_t>(),
                       p.at(2).get<std::int32_t>()};
        m.match = r;
      }
      out.push_back(std::move(m));
    } catch (const json::exception& e) {
      fail(ErrorCode::FormatError, std::string("matches.json: ") + e.what());
    }
  }
  return out;
}

}  // namespace voxcraft

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/world_map.hpp"

#include <json.hpp>

#include <iostream>
#include <limits>
#include <sstream>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

bool is_air_block(std::string_view name) noexcept {
  const auto base = strip_block_state(name);
  return base == "minecraft:air" || base == "minecraft:cave_air" ||
         base == "minecraft:void_air" || base == "air";
}

WorldMap::WorldMap(Aabb bounds, std::vector<std::string> palette,
                   std::vector<std::uint32_t> blocks)
    : bounds_(bounds), palette_(std::move(palette)), blocks_(std::move(blocks)) {
  if (blocks_.size() != static_cast<std::size_t>(bounds_.volume())) {
    fail(ErrorCode::DimensionMismatch,
         "world holds " + std::to_string(blocks_.size()) + " blocks for a box of " +
             std::to_string(bounds_.volume()));
  }
  bool have_air = false;
  for (std::size_t i = 0; i < palette_.size(); ++i) {
    auto [it, inserted] = palette_index_.emplace(palette_[i], static_cast<std::uint32_t>(i));
    if (!inserted) fail(ErrorCode::FormatError, "duplicate palette entry '" + palette_[i] + "'");
    if (!have_air && is_air_block(palette_[i])) {
      air_index_ = static_cast<std::uint32_t>(i);
      have_air = true;
    }
  }
  for (auto b : blocks_) {
    if (b >= palette_.size()) {
      fail(ErrorCode::PaletteIndexOutOfRange,
           "palette index " + std::to_string(b) + " >= palette size " +
               std::to_string(palette_.size()));
    }
  }
  if (!have_air) air_index_ = intern(kAirBlock);
}

WorldMap::WorldMap(Aabb bounds)
    : WorldMap(bounds, {std::string(kAirBlock)},
               std::vector<std::uint32_t>(static_cast<std::size_t>(bounds.volume()), 0)) {}

std::size_t WorldMap::index(VoxelCoord v) const noexcept {
  const auto d = bounds_.extents();
  const auto l = v - bounds_.min();
  return l.x + static_cast<std::size_t>(d.x) * (l.y + static_cast<std::size_t>(d.y) * l.z);
}

std::uint32_t WorldMap::palette_index_at(VoxelCoord v) const noexcept {
  if (!bounds_.contains(v)) return air_index_;
  return blocks_[index(v)];
}

std::string_view WorldMap::query(VoxelCoord v) const noexcept {
  return palette_[palette_index_at(v)];
}

std::uint32_t WorldMap::intern(std::string_view name) {
  auto it = palette_index_.find(std::string(name));
  if (it != palette_index_.end()) return it->second;
  const auto idx = static_cast<std::uint32_t>(palette_.size());
  palette_.emplace_back(name);
  palette_index_.emplace(palette_.back(), idx);
  return idx;
}

void WorldMap::set(VoxelCoord v, std::string_view name) {
  if (!bounds_.contains(v)) {
    std::ostringstream msg;
    msg << "block " << v << " outside world " << bounds_;
    fail(ErrorCode::InvalidAabb, msg.str());
  }
  blocks_[index(v)] = intern(name);
}

namespace {

const nbt::Value& require(const nbt::Compound& c, std::string_view name) {
  const auto* v = c.find(name);
  if (v == nullptr) fail(ErrorCode::MissingField, "schematic: missing '" + std::string(name) + "'");
  return *v;
}

int dimension(const nbt::Compound& c, std::string_view name) {
  const auto& v = require(c, name);
  if (const auto* s = v.get_if<std::int16_t>()) {
    // Stored as signed shorts, meant as unsigned.
    return static_cast<std::uint16_t>(*s);
  }
  if (const auto* i = v.get_if<std::int32_t>()) return *i;
  fail(ErrorCode::FormatError, "schematic: '" + std::string(name) + "' must be a Short");
}

}  // namespace

WorldMap world_from_schematic(const nbt::NamedTag& root) {
  const auto* top = root.value.get_if<nbt::Compound>();
  if (top == nullptr) fail(ErrorCode::FormatError, "schematic: root is not a compound");
  // Some writers wrap the schematic in an outer compound named "Schematic".
  if (top->find("Width") == nullptr) {
    if (const auto* inner = top->find("Schematic")) {
      if (const auto* c = inner->get_if<nbt::Compound>()) top = c;
    }
  }
  const int width = dimension(*top, "Width");
  const int height = dimension(*top, "Height");
  const int length = dimension(*top, "Length");
  if (width <= 0 || height <= 0 || length <= 0) {
    fail(ErrorCode::DimensionMismatch, "schematic: dimensions must be positive");
  }
  for (const char* ignored : {"Offset", "Metadata", "BlockEntities", "Entities", "Biomes"}) {
    if (top->find(ignored) != nullptr) {
      std::clog << "warning: schematic field '" << ignored << "' is ignored\n";
    }
  }

  const auto* palette_tag = require(*top, "Palette").get_if<nbt::Compound>();
  if (palette_tag == nullptr) fail(ErrorCode::FormatError, "schematic: Palette must be a compound");
  std::vector<std::string> palette(palette_tag->entries.size());
  std::vector<bool> seen(palette.size(), false);
  for (const auto& entry : palette_tag->entries) {
    const auto* idx = entry.value.get_if<std::int32_t>();
    if (idx == nullptr) fail(ErrorCode::FormatError, "schematic: palette values must be Int");
    if (*idx < 0 || static_cast<std::size_t>(*idx) >= palette.size() || seen[*idx]) {
      fail(ErrorCode::PaletteIndexOutOfRange,
           "schematic: palette index " + std::to_string(*idx) + " for '" + entry.name +
               "' is out of range or repeated");
    }
    seen[*idx] = true;
    palette[*idx] = entry.name;
  }

  const auto* data = require(*top, "BlockData").get_if<nbt::ByteArray>();
  if (data == nullptr) fail(ErrorCode::FormatError, "schematic: BlockData must be a ByteArray");
  const std::span<const std::uint8_t> raw(reinterpret_cast<const std::uint8_t*>(data->data()),
                                          data->size());

  const auto volume = static_cast<std::size_t>(width) * height * length;
  std::vector<std::uint32_t> blocks(volume);
  std::size_t pos = 0;
  // Schematic order is x, then z, then y; ours is x, then y, then z.
  for (int y = 0; y < height; ++y) {
    for (int z = 0; z < length; ++z) {
      for (int x = 0; x < width; ++x) {
        const auto value = nbt::read_varint(raw, pos);
        if (value >= palette.size()) {
          fail(ErrorCode::PaletteIndexOutOfRange,
               "schematic: block data index " + std::to_string(value) + " >= palette size " +
                   std::to_string(palette.size()));
        }
        blocks[x + static_cast<std::size_t>(width) * (y + static_cast<std::size_t>(height) * z)] =
            value;
      }
    }
  }
  if (pos != raw.size()) {
    fail(ErrorCode::DimensionMismatch, "schematic: BlockData holds more entries than W*H*L");
  }
  return WorldMap(Aabb({0, 0, 0}, {width - 1, height - 1, length - 1}), std::move(palette),
                  std::move(blocks));
}

WorldMap load_schematic(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  return world_from_schematic(nbt::parse(bytes));
}

std::vector<std::uint8_t> encode_schematic(const WorldMap& world) {
  const auto d = world.bounds().extents();
  if (d.x > 0xFFFF || d.y > 0xFFFF || d.z > 0xFFFF) {
    fail(ErrorCode::FormatError, "schematic: dimensions exceed 65535");
  }
  nbt::Compound root;
  root.set("Version", std::int32_t{2});
  root.set("DataVersion", std::int32_t{3465});
  root.set("Width", static_cast<std::int16_t>(d.x));
  root.set("Height", static_cast<std::int16_t>(d.y));
  root.set("Length", static_cast<std::int16_t>(d.z));
  nbt::Compound palette;
  for (std::size_t i = 0; i < world.palette().size(); ++i) {
    palette.set(world.palette()[i], static_cast<std::int32_t>(i));
  }
  root.set("PaletteMax", static_cast<std::int32_t>(world.palette().size()));
  root.set("Palette", std::move(palette));
  std::vector<std::uint8_t> packed;
  const auto& mn = world.bounds().min();
  for (std::uint32_t y = 0; y < d.y; ++y) {
    for (std::uint32_t z = 0; z < d.z; ++z) {
      for (std::uint32_t x = 0; x < d.x; ++x) {
        nbt::append_varint(packed, world.palette_index_at(
                                       mn + VoxelCoord{static_cast<std::int32_t>(x),
                                                       static_cast<std::int32_t>(y),
                                                       static_cast<std::int32_t>(z)}));
      }
    }
  }
  root.set("BlockData", nbt::ByteArray(packed.begin(), packed.end()));
  return nbt::gzip_compress(nbt::encode({"Schematic", std::move(root)}));
}

namespace {

VoxelCoord coord_of(const json& j, const char* what) {
  if (!j.is_array() || j.size() < 3 || !j[0].is_number_integer() || !j[1].is_number_integer() ||
      !j[2].is_number_integer()) {
    fail(ErrorCode::FormatError, std::string("world.json: ") + what + " must be [x,y,z]");
  }
  return {j[0].get<std::int32_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>()};
}

}  // namespace

WorldMap parse_world_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("world.json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("bounds")) {
    fail(ErrorCode::MissingField, "world.json: missing \"bounds\"");
  }
  const auto& b = doc["bounds"];
  Aabb bounds;
  if (b.is_object()) {
    bounds = Aabb(coord_of(b.at("min"), "bounds.min"), coord_of(b.at("max"), "bounds.max"));
  } else if (b.is_array() && b.size() == 2) {
    bounds = Aabb(coord_of(b[0], "bounds[0]"), coord_of(b[1], "bounds[1]"));
  } else {
    fail(ErrorCode::FormatError, "world.json: bounds must be {min,max} or [min,max]");
  }
  WorldMap world(bounds);
  if (auto it = doc.find("blocks"); it != doc.end()) {
    for (const auto& entry : *it) {
      if (!entry.is_array() || entry.size() != 4 || !entry[3].is_string()) {
        fail(ErrorCode::FormatError, "world.json: blocks are [x,y,z,\"name\"]");
      }
      world.set(coord_of(entry, "block"), entry[3].get<std::string>());
    }
  }
  return world;
}

std::string world_to_json(const WorldMap& world) {
  json doc;
  const auto& b = world.bounds();
  doc["bounds"] = {{"min", {b.min().x, b.min().y, b.min().z}},
                   {"max", {b.max().x, b.max().y, b.max().z}}};
  json blocks = json::array();
  for (auto z = b.min().z; z <= b.max().z; ++z) {
    for (auto y = b.min().y; y <= b.max().y; ++y) {
      for (auto x = b.min().x; x <= b.max().x; ++x) {
        const auto idx = world.palette_index_at({x, y, z});
        if (idx == world.air_index()) continue;
        blocks.push_back({x, y, z, world.palette()[idx]});
      }
    }
  }
  doc["blocks"] = std::move(blocks);
  return doc.dump() + "\n";
}

WorldMap load_world(const std::filesystem::path& path) {
  const auto ext = path.extension();
  if (ext == ".schem" || ext == ".schematic") return load_schematic(path);
  return parse_world_json(read_file_text(path));
}

SemanticGrid extract_occupancy(const WorldMap& world, const Aabb& box, const ClassMap& map,
                               std::shared_ptr<const ClassTable> table) {
  // Resolve each palette entry once; unused entries are resolved lazily so an
  // unmappable block that never appears in the box is not an error.
  constexpr std::uint32_t kUnresolved = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> class_of(world.palette().size(), kUnresolved);
  class_of[world.air_index()] = kEmptyClass;

  const auto dims = box.extents();
  std::vector<ClassId> labels(dims.volume(), kEmptyClass);
  std::size_t i = 0;
  for (auto z = box.min().z; z <= box.max().z; ++z) {
    for (auto y = box.min().y; y <= box.max().y; ++y) {
      for (auto x = box.min().x; x <= box.max().x; ++x, ++i) {
        const auto p = world.palette_index_at({x, y, z});
        auto& cls = class_of[p];
        if (cls == kUnresolved) {
          const auto& name = world.palette()[p];
          cls = is_air_block(name) ? kEmptyClass : map.resolve(name, *table);
        }
        labels[i] = static_cast<ClassId>(cls);
      }
    }
  }
  return SemanticGrid(box.min(), dims, std::move(labels), std::move(table));
}

}  // namespace voxcraft

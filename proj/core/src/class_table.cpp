// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/class_table.hpp"

#include <json.hpp>

#include <limits>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

ClassTable::ClassTable(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) {
    fail(ErrorCode::InvalidClassTable, "class table must contain the empty class");
  }
  if (names_.size() > std::numeric_limits<ClassId>::max()) {
    fail(ErrorCode::InvalidClassTable, "class table exceeds 16-bit ids");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      fail(ErrorCode::InvalidClassTable,
           "class name at index " + std::to_string(i) + " is empty");
    }
    auto [it, inserted] = index_.emplace(names_[i], static_cast<ClassId>(i));
    if (!inserted) {
      fail(ErrorCode::InvalidClassTable, "duplicate class name '" + names_[i] + "'");
    }
  }
}

const ClassTable& ClassTable::indoor() {
  static const ClassTable table({"empty", "ceiling", "floor", "wall", "window",
                                 "chair", "bed", "sofa", "table", "tvs",
                                 "furniture", "objects"});
  return table;
}

const std::string& ClassTable::name(ClassId id) const {
  if (id >= names_.size()) {
    fail(ErrorCode::TargetIdOutOfRange,
         "class id " + std::to_string(id) + " outside table of size " +
             std::to_string(names_.size()));
  }
  return names_[id];
}

std::optional<ClassId> ClassTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassId ClassTable::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  fail(ErrorCode::UnknownClass, "unknown class '" + std::string(name) + "'");
}

std::string_view strip_block_state(std::string_view name) noexcept {
  auto bracket = name.find('[');
  if (bracket == std::string_view::npos) return name;
  return name.substr(0, bracket);
}

ClassMap ClassMap::identity(const ClassTable& table) {
  ClassMap map;
  map.default_target.reset();
  for (const auto& name : table.names()) map.entries.emplace(name, name);
  return map;
}

ClassId ClassMap::resolve(std::string_view source, const ClassTable& target) const {
  const std::string* mapped = nullptr;
  if (auto it = entries.find(source); it != entries.end()) {
    mapped = &it->second;
  } else if (auto base = strip_block_state(source); base.size() != source.size()) {
    if (auto it2 = entries.find(base); it2 != entries.end()) mapped = &it2->second;
  }
  if (mapped == nullptr) {
    if (!default_target) {
      fail(ErrorCode::UnknownClass,
           "no mapping for '" + std::string(source) + "' and no default target");
    }
    mapped = &*default_target;
  }
  auto id = target.find(*mapped);
  if (!id) {
    fail(ErrorCode::TargetIdOutOfRange,
         "mapping target '" + *mapped + "' is not in the target class table");
  }
  return *id;
}

void ClassMap::validate(const ClassTable& target) const {
  for (const auto& [src, dst] : entries) {
    if (!target.find(dst)) {
      fail(ErrorCode::TargetIdOutOfRange,
           "mapping '" + src + "' -> '" + dst + "' targets an unknown class");
    }
  }
  if (default_target && !target.find(*default_target)) {
    fail(ErrorCode::TargetIdOutOfRange,
         "default target '" + *default_target + "' is not in the class table");
  }
}

ClassMap parse_class_map(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("classmap: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::FormatError, "classmap: expected an object");
  ClassMap map;
  if (auto it = doc.find("default"); it != doc.end()) {
    if (it->is_null()) {
      map.default_target.reset();
    } else if (it->is_string()) {
      map.default_target = it->get<std::string>();
    } else {
      fail(ErrorCode::FormatError, "classmap: \"default\" must be a string or null");
    }
  }
  if (auto it = doc.find("map"); it != doc.end()) {
    if (!it->is_object()) fail(ErrorCode::FormatError, "classmap: \"map\" must be an object");
    for (const auto& [src, dst] : it->items()) {
      if (!dst.is_string()) {
        fail(ErrorCode::FormatError, "classmap: target of '" + src + "' must be a string");
      }
      map.entries.emplace(src, dst.get<std::string>());
    }
  }
  return map;
}

ClassMap load_class_map(const std::filesystem::path& path) {
  return parse_class_map(read_file_text(path));
}

std::string class_map_to_json(const ClassMap& map) {
  json doc;
  doc["default"] = map.default_target ? json(*map.default_target) : json(nullptr);
  json entries = json::object();
  for (const auto& [src, dst] : map.entries) entries[src] = dst;
  doc["map"] = std::move(entries);
  return doc.dump(2) + "\n";
}

}  // namespace voxcraft

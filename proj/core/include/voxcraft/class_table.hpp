// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_CLASS_TABLE_HPP
#define VOXCRAFT_CLASS_TABLE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace voxcraft {

using ClassId = std::uint16_t;

inline constexpr ClassId kEmptyClass = 0;

// Ordered list of class names; the position of a name is its id. Id 0 is
// always the empty/air class.
class ClassTable {
 public:
  ClassTable() : ClassTable(std::vector<std::string>{"empty"}) {}
  // Throws InvalidClassTable on duplicate or empty names, on an empty list,
  // or when the table would not fit 16-bit ids.
  explicit ClassTable(std::vector<std::string> names);

  // empty, ceiling, floor, wall, window, chair, bed, sofa, table, tvs,
  // furniture, objects.
  static const ClassTable& indoor();

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(ClassId id) const;
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<ClassId> find(std::string_view name) const;
  // Throws UnknownClass.
  ClassId id(std::string_view name) const;

  friend bool operator==(const ClassTable& a, const ClassTable& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
};

// Many-to-one mapping from source class (or block) names to target class
// names. Unmapped names resolve to `default_target` when one is set.
struct ClassMap {
  std::map<std::string, std::string, std::less<>> entries;
  std::optional<std::string> default_target = std::string("objects");

  // Maps every name of `table` to itself and disables the default.
  static ClassMap identity(const ClassTable& table);

  // Resolves `source` to an id of `target`. Tries the full name first, then
  // the name with any trailing block-state suffix ("[facing=north]") removed.
  // Throws UnknownClass when nothing applies and TargetIdOutOfRange when the
  // mapped name is not part of `target`.
  ClassId resolve(std::string_view source, const ClassTable& target) const;

  // Throws TargetIdOutOfRange for any entry (or default) missing from
  // `target`.
  void validate(const ClassTable& target) const;
};

// "minecraft:oak_stairs[facing=north]" -> "minecraft:oak_stairs"
std::string_view strip_block_state(std::string_view name) noexcept;

// {"default":"objects","map":{"src":"dst",...}}; "default": null disables the
// fallback.
ClassMap load_class_map(const std::filesystem::path& path);
ClassMap parse_class_map(std::string_view json_text);
std::string class_map_to_json(const ClassMap& map);

}  // namespace voxcraft

#endif  // VOXCRAFT_CLASS_TABLE_HPP

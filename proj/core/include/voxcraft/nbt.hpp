// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_NBT_HPP
#define VOXCRAFT_NBT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace voxcraft::nbt {

enum class TagType : std::uint8_t {
  End = 0,
  Byte = 1,
  Short = 2,
  Int = 3,
  Long = 4,
  Float = 5,
  Double = 6,
  ByteArray = 7,
  String = 8,
  List = 9,
  Compound = 10,
  IntArray = 11,
  LongArray = 12,
};

struct Value;
struct Entry;

struct End {
  friend bool operator==(const End&, const End&) = default;
};

// Homogeneous list. An empty list may carry any element type (End included).
struct List {
  TagType element_type = TagType::End;
  std::vector<Value> items;

  friend bool operator==(const List& a, const List& b);
};

// Insertion-ordered named children with unique names.
struct Compound {
  std::vector<Entry> entries;

  const Value* find(std::string_view name) const;
  // Replaces an existing child of the same name.
  void set(std::string name, Value value);

  friend bool operator==(const Compound& a, const Compound& b);
};

using ByteArray = std::vector<std::int8_t>;
using IntArray = std::vector<std::int32_t>;
using LongArray = std::vector<std::int64_t>;

// Alternative index equals the tag id.
using Payload = std::variant<End, std::int8_t, std::int16_t, std::int32_t, std::int64_t,
                             float, double, ByteArray, std::string, List, Compound,
                             IntArray, LongArray>;

struct Value {
  Payload payload;

  Value() = default;
  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, Value>)
  Value(T v) : payload(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  TagType type() const noexcept { return static_cast<TagType>(payload.index()); }

  template <typename T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&payload);
  }

  friend bool operator==(const Value& a, const Value& b) { return a.payload == b.payload; }
};

struct Entry {
  std::string name;
  Value value;

  friend bool operator==(const Entry& a, const Entry& b) {
    return a.name == b.name && a.value == b.value;
  }
};

// Root tag of a file: a name plus (normally) a compound.
struct NamedTag {
  std::string name;
  Value value;

  friend bool operator==(const NamedTag& a, const NamedTag& b) {
    return a.name == b.name && a.value == b.value;
  }
};

struct ParseOptions {
  int max_depth = 64;
};

// Parses big-endian NBT; input starting with the gzip magic (1f 8b) is
// inflated first. Errors: TruncatedInput, UnknownTag, BadUtf8,
// DepthLimitExceeded.
NamedTag parse(std::span<const std::uint8_t> bytes, const ParseOptions& options = {});

std::vector<std::uint8_t> encode(const NamedTag& root);

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> bytes);

// Unsigned LEB128 varints as used by schematic block data.
void append_varint(std::vector<std::uint8_t>& out, std::uint32_t value);
// Reads one varint at `pos` and advances it. Throws VarintOverflow for more
// than five bytes or values beyond 32 bits, TruncatedInput at end of input.
std::uint32_t read_varint(std::span<const std::uint8_t> bytes, std::size_t& pos);

}  // namespace voxcraft::nbt

#endif  // VOXCRAFT_NBT_HPP

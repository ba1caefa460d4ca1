// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/nbt.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "voxcraft/error.hpp"

namespace voxcraft::nbt {

bool operator==(const List& a, const List& b) {
  return a.element_type == b.element_type && a.items == b.items;
}

bool operator==(const Compound& a, const Compound& b) { return a.entries == b.entries; }

const Value* Compound::find(std::string_view name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e.value;
  }
  return nullptr;
}

void Compound::set(std::string name, Value value) {
  for (auto& e : entries) {
    if (e.name == name) {
      e.value = std::move(value);
      return;
    }
  }
  entries.push_back({std::move(name), std::move(value)});
}

namespace {

bool valid_modified_utf8(std::string_view s) {
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  while (i < s.size()) {
    const unsigned char c = byte(i);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    // Java writes U+0000 as C0 80; every other overlong form is rejected.
    const bool java_nul = len == 2 && cp == 0;
    if (!java_nul && ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
                      (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)))) {
      return false;
    }
    i += len;
  }
  return true;
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, int max_depth) : in_(in), max_depth_(max_depth) {}

  NamedTag root() {
    const auto type = tag_type();
    if (type == TagType::End) fail(ErrorCode::UnknownTag, "NBT: root tag cannot be End");
    NamedTag tag;
    tag.name = string();
    tag.value = payload(type, 1);
    return tag;
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) {
      fail(ErrorCode::TruncatedInput,
           "NBT: input ends at byte " + std::to_string(in_.size()) + ", needed " +
               std::to_string(n) + " more at offset " + std::to_string(pos_));
    }
  }

  template <typename T>
  T big_endian() {
    need(sizeof(T));
    std::make_unsigned_t<T> v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v = static_cast<std::make_unsigned_t<T>>((v << 8) | in_[pos_ + i]);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  TagType tag_type() {
    const auto raw = big_endian<std::uint8_t>();
    if (raw > static_cast<std::uint8_t>(TagType::LongArray)) {
      fail(ErrorCode::UnknownTag, "NBT: unknown tag id " + std::to_string(raw) +
                                      " at offset " + std::to_string(pos_ - 1));
    }
    return static_cast<TagType>(raw);
  }

  std::size_t length() {
    const auto n = big_endian<std::int32_t>();
    if (n < 0) fail(ErrorCode::TruncatedInput, "NBT: negative array length");
    return static_cast<std::size_t>(n);
  }

  std::string string() {
    const auto n = big_endian<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    if (!valid_modified_utf8(s)) fail(ErrorCode::BadUtf8, "NBT: string is not valid UTF-8");
    return s;
  }

  template <typename T>
  std::vector<T> array() {
    const auto n = length();
    need(n * sizeof(T));
    std::vector<T> out(n);
    for (auto& v : out) v = big_endian<T>();
    return out;
  }

  Value payload(TagType type, int depth) {
    switch (type) {
      case TagType::End: return End{};
      case TagType::Byte: return big_endian<std::int8_t>();
      case TagType::Short: return big_endian<std::int16_t>();
      case TagType::Int: return big_endian<std::int32_t>();
      case TagType::Long: return big_endian<std::int64_t>();
      case TagType::Float: return std::bit_cast<float>(big_endian<std::uint32_t>());
      case TagType::Double: return std::bit_cast<double>(big_endian<std::uint64_t>());
      case TagType::ByteArray: return array<std::int8_t>();
      case TagType::String: return string();
      case TagType::IntArray: return array<std::int32_t>();
      case TagType::LongArray: return array<std::int64_t>();
      case TagType::List: {
        enter(depth);
        List list;
        list.element_type = tag_type();
        const auto n = length();
        if (list.element_type == TagType::End && n > 0) {
          fail(ErrorCode::UnknownTag, "NBT: non-empty list of End tags");
        }
        list.items.reserve(std::min<std::size_t>(n, in_.size() - pos_));
        for (std::size_t i = 0; i < n; ++i) {
          list.items.push_back(payload(list.element_type, depth + 1));
        }
        return list;
      }
      case TagType::Compound: {
        enter(depth);
        Compound compound;
        for (;;) {
          const auto child = tag_type();
          if (child == TagType::End) break;
          auto name = string();
          if (compound.find(name) != nullptr) {
            fail(ErrorCode::UnknownTag, "NBT: duplicate compound key '" + name + "'");
          }
          compound.entries.push_back({std::move(name), payload(child, depth + 1)});
        }
        return compound;
      }
    }
    fail(ErrorCode::UnknownTag, "NBT: unreachable tag type");
  }

  void enter(int depth) const {
    if (depth > max_depth_) {
      fail(ErrorCode::DepthLimitExceeded,
           "NBT: nesting deeper than " + std::to_string(max_depth_));
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  int max_depth_;
};

class Writer {
 public:
  void root(const NamedTag& tag) {
    u8(static_cast<std::uint8_t>(tag.value.type()));
    string(tag.name);
    payload(tag.value);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void u8(std::uint8_t v) { out_.push_back(v); }

  template <typename T>
  void big_endian(T value) {
    auto v = static_cast<std::make_unsigned_t<T>>(value);
    for (int shift = static_cast<int>(sizeof(T) * 8) - 8; shift >= 0; shift -= 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void string(const std::string& s) {
    if (s.size() > 0xFFFF) fail(ErrorCode::FormatError, "NBT: string longer than 65535 bytes");
    big_endian<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  template <typename T>
  void array(const std::vector<T>& values) {
    big_endian<std::int32_t>(static_cast<std::int32_t>(values.size()));
    for (auto v : values) big_endian<T>(v);
  }

  void payload(const Value& value) {
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, End>) {
          } else if constexpr (std::is_same_v<T, float>) {
            big_endian(std::bit_cast<std::uint32_t>(v));
          } else if constexpr (std::is_same_v<T, double>) {
            big_endian(std::bit_cast<std::uint64_t>(v));
          } else if constexpr (std::is_integral_v<T>) {
            big_endian(v);
          } else if constexpr (std::is_same_v<T, std::string>) {
            string(v);
          } else if constexpr (std::is_same_v<T, List>) {
            u8(static_cast<std::uint8_t>(v.element_type));
            big_endian<std::int32_t>(static_cast<std::int32_t>(v.items.size()));
            for (const auto& item : v.items) {
              if (item.type() != v.element_type) {
                fail(ErrorCode::FormatError, "NBT: heterogeneous list");
              }
              payload(item);
            }
          } else if constexpr (std::is_same_v<T, Compound>) {
            for (const auto& e : v.entries) {
              u8(static_cast<std::uint8_t>(e.value.type()));
              string(e.name);
              payload(e.value);
            }
            u8(0);
          } else {
            array(v);
          }
        },
        value.payload);
  }

  std::vector<std::uint8_t> out_;
};

}  // namespace

NamedTag parse(std::span<const std::uint8_t> bytes, const ParseOptions& options) {
  if (bytes.size() >= 2 && bytes[0] == 0x1F && bytes[1] == 0x8B) {
    const auto inflated = gzip_decompress(bytes);
    return Reader(inflated, options.max_depth).root();
  }
  return Reader(bytes, options.max_depth).root();
}

std::vector<std::uint8_t> encode(const NamedTag& root) {
  Writer w;
  w.root(root);
  return w.take();
}

std::vector<std::uint8_t> gzip_compress(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  // 15 window bits + 16 selects the gzip wrapper.
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) !=
      Z_OK) {
    fail(ErrorCode::IoError, "gzip: deflateInit2 failed");
  }
  std::vector<std::uint8_t> out(deflateBound(&zs, static_cast<uLong>(bytes.size())) + 32);
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  out.resize(zs.total_out);
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) fail(ErrorCode::IoError, "gzip: deflate did not finish");
  return out;
}

std::vector<std::uint8_t> gzip_decompress(std::span<const std::uint8_t> bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) fail(ErrorCode::IoError, "gzip: inflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(bytes.data());
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::vector<std::uint8_t> out;
  std::uint8_t chunk[64 * 1024];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      if (rc == Z_BUF_ERROR) fail(ErrorCode::TruncatedInput, "gzip: stream ends early");
      fail(ErrorCode::FormatError, "gzip: corrupt stream");
    }
    out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
  }
  inflateEnd(&zs);
  return out;
}

void append_varint(std::vector<std::uint8_t>& out, std::uint32_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint32_t read_varint(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  std::uint64_t value = 0;
  for (int i = 0; i < 5; ++i) {
    if (pos >= bytes.size()) fail(ErrorCode::TruncatedInput, "varint: input ends mid-value");
    const std::uint8_t b = bytes[pos++];
    value |= static_cast<std::uint64_t>(b & 0x7F) << (7 * i);
    if ((b & 0x80) == 0) {
      if (value > 0xFFFFFFFFull) fail(ErrorCode::VarintOverflow, "varint: exceeds 32 bits");
      return static_cast<std::uint32_t>(value);
    }
  }
  fail(ErrorCode::VarintOverflow, "varint: longer than 5 bytes");
}

}  // namespace voxcraft::nbt

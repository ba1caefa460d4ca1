// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/grid_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <limits>

#include "voxcraft/error.hpp"

namespace voxcraft {

using nlohmann::json;

namespace {

constexpr std::uint8_t kMagic[4] = {0x56, 0x58, 0x47, 0x31};  // "VXG1"

class LeWriter {
 public:
  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int shift = 0; shift < 32; shift += 8) {
      out_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void bytes(const void* data, std::size_t n) {
    auto p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class LeReader {
 public:
  explicit LeReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | in_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (remaining() < n) fail(ErrorCode::FormatError, "VXG1: unexpected end of file");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::int32_t json_int(const json& j, const char* what) {
  if (!j.is_number_integer()) {
    fail(ErrorCode::FormatError, std::string("occ.json: ") + what + " must be an integer");
  }
  return j.get<std::int32_t>();
}

}  // namespace

GridFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? GridFormat::OccJson : GridFormat::Binary;
}

std::vector<std::uint8_t> encode_grid_binary(const SemanticGrid& grid) {
  LeWriter w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(grid.dims().x);
  w.u32(grid.dims().y);
  w.u32(grid.dims().z);
  w.i32(grid.origin().x);
  w.i32(grid.origin().y);
  w.i32(grid.origin().z);
  const auto& names = grid.classes().names();
  w.u16(static_cast<std::uint16_t>(names.size()));
  for (const auto& name : names) {
    if (name.size() > std::numeric_limits<std::uint16_t>::max()) {
      fail(ErrorCode::FormatError, "VXG1: class name too long");
    }
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name.data(), name.size());
  }
  for (ClassId label : grid.labels()) w.u16(label);
  return w.take();
}

SemanticGrid decode_grid_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != kMagic[0] || bytes[1] != kMagic[1] ||
      bytes[2] != kMagic[2]) {
    fail(ErrorCode::FormatError, "VXG1: bad magic");
  }
  if (bytes[3] != kMagic[3]) {
    fail(ErrorCode::UnknownVersion,
         std::string("VXG1: unsupported version byte '") + static_cast<char>(bytes[3]) + "'");
  }
  LeReader r(bytes.subspan(4));
  Dims dims{r.u32(), r.u32(), r.u32()};
  VoxelCoord origin{r.i32(), r.i32(), r.i32()};
  const auto class_count = r.u16();
  std::vector<std::string> names;
  names.reserve(class_count);
  for (std::uint16_t i = 0; i < class_count; ++i) names.push_back(r.str(r.u16()));
  auto table = std::make_shared<const ClassTable>(std::move(names));

  if (dims.x == 0 || dims.y == 0 || dims.z == 0) {
    fail(ErrorCode::DimensionMismatch, "VXG1: zero dimension");
  }
  const auto expected = dims.volume();
  if (r.remaining() != expected * 2) {
    fail(ErrorCode::DimensionMismatch,
         "VXG1: header declares " + std::to_string(expected) + " labels, payload holds " +
             std::to_string(r.remaining() / 2) +
             (r.remaining() % 2 ? " and a stray byte" : ""));
  }
  std::vector<ClassId> labels(expected);
  for (auto& label : labels) label = r.u16();
  return SemanticGrid(origin, dims, std::move(labels), std::move(table));
}

std::string encode_occ_json(const SemanticGrid& grid, std::uint32_t stride) {
  if (stride == 0) fail(ErrorCode::InvalidParameter, "stride must be positive");
  json doc;
  const auto& d = grid.dims();
  doc["dims"] = {d.x, d.y, d.z};
  doc["origin"] = {grid.origin().x, grid.origin().y, grid.origin().z};
  doc["classes"] = grid.classes().names();
  if (stride > 1) doc["stride"] = stride;
  json voxels = json::array();
  for (std::uint32_t z = 0; z < d.z; z += stride) {
    for (std::uint32_t y = 0; y < d.y; y += stride) {
      for (std::uint32_t x = 0; x < d.x; x += stride) {
        const ClassId label = grid.at(x, y, z);
        if (label == kEmptyClass) continue;
        const auto w = grid.origin() + VoxelCoord{static_cast<std::int32_t>(x),
                                                  static_cast<std::int32_t>(y),
                                                  static_cast<std::int32_t>(z)};
        voxels.push_back({w.x, w.y, w.z, label});
      }
    }
  }
  doc["voxels"] = std::move(voxels);
  return doc.dump() + "\n";
}

SemanticGrid decode_occ_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("occ.json: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::FormatError, "occ.json: expected an object");
  const auto dims_it = doc.find("dims");
  if (dims_it == doc.end() || !dims_it->is_array() || dims_it->size() != 3) {
    fail(ErrorCode::FormatError, "occ.json: \"dims\" must be [X,Y,Z]");
  }
  const auto dx = json_int((*dims_it)[0], "dims"), dy = json_int((*dims_it)[1], "dims"),
             dz = json_int((*dims_it)[2], "dims");
  if (dx <= 0 || dy <= 0 || dz <= 0) {
    fail(ErrorCode::DimensionMismatch, "occ.json: dims must be positive");
  }
  Dims dims{static_cast<std::uint32_t>(dx), static_cast<std::uint32_t>(dy),
            static_cast<std::uint32_t>(dz)};
  VoxelCoord origin{};
  if (auto it = doc.find("origin"); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) {
      fail(ErrorCode::FormatError, "occ.json: \"origin\" must be [x,y,z]");
    }
    origin = {json_int((*it)[0], "origin"), json_int((*it)[1], "origin"),
              json_int((*it)[2], "origin")};
  }
  std::shared_ptr<const ClassTable> table;
  if (auto it = doc.find("classes"); it != doc.end()) {
    if (!it->is_array()) fail(ErrorCode::FormatError, "occ.json: \"classes\" must be a list");
    std::vector<std::string> names;
    for (const auto& n : *it) {
      if (!n.is_string()) fail(ErrorCode::FormatError, "occ.json: class names must be strings");
      names.push_back(n.get<std::string>());
    }
    table = std::make_shared<const ClassTable>(std::move(names));
  } else {
    table = std::make_shared<const ClassTable>(ClassTable::indoor());
  }

  std::vector<ClassId> labels(dims.volume(), kEmptyClass);
  const auto bounds = Aabb::from_origin_dims(origin, dims);
  if (auto it = doc.find("voxels"); it != doc.end()) {
    if (!it->is_array()) fail(ErrorCode::FormatError, "occ.json: \"voxels\" must be a list");
    for (const auto& v : *it) {
      if (!v.is_array() || v.size() != 4) {
        fail(ErrorCode::FormatError, "occ.json: voxel entries are [x,y,z,class]");
      }
      VoxelCoord c{json_int(v[0], "voxel x"), json_int(v[1], "voxel y"),
                   json_int(v[2], "voxel z")};
      if (!bounds.contains(c)) {
        std::ostringstream msg;
        msg << "occ.json: voxel " << c << " outside grid " << bounds;
        fail(ErrorCode::DimensionMismatch, msg.str());
      }
      ClassId id = 0;
      if (v[3].is_string()) {
        id = table->id(v[3].get<std::string>());
      } else if (v[3].is_number_unsigned() || v[3].is_number_integer()) {
        const auto raw = v[3].get<std::int64_t>();
        if (raw < 0 || static_cast<std::size_t>(raw) >= table->size()) {
          fail(ErrorCode::TargetIdOutOfRange,
               "occ.json: class index " + std::to_string(raw) + " out of range");
        }
        id = static_cast<ClassId>(raw);
      } else {
        fail(ErrorCode::FormatError, "occ.json: voxel class must be an index or a name");
      }
      const auto local = c - origin;
      labels[local.x + static_cast<std::size_t>(dims.x) *
                           (local.y + static_cast<std::size_t>(dims.y) * local.z)] = id;
    }
  }
  return SemanticGrid(origin, dims, std::move(labels), std::move(table));
}

SemanticGrid load_grid(const std::filesystem::path& path, GridFormat format) {
  if (format == GridFormat::OccJson) return decode_occ_json(read_file_text(path));
  const auto bytes = read_file_bytes(path);
  return decode_grid_binary(bytes);
}

void save_grid(const SemanticGrid& grid, const std::filesystem::path& path,
               GridFormat format) {
  if (format == GridFormat::OccJson) {
    write_file_atomic(path, encode_occ_json(grid));
  } else {
    write_file_atomic(path, encode_grid_binary(grid));
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path,
                       std::span<const std::uint8_t> bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::IoError, "short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::IoError, "cannot rename onto '" + path.string() + "': " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(
                              reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace voxcraft

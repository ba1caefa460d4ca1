// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <json.hpp>

#include <filesystem>

#include "oracles.hpp"
#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/semantic_grid.hpp"

using namespace voxcraft;
using voxcraft::testing::indoor;
using voxcraft::testing::random_grid;
using voxcraft::testing::Rng;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("indoor class table order") {
  const auto& t = ClassTable::indoor();
  REQUIRE(t.size() == 12);
  CHECK(t.name(0) == "empty");
  CHECK(t.id("wall") == 3);
  CHECK(t.id("objects") == 11);
  CHECK_FALSE(t.find("lamp").has_value());
  CHECK(code_of([&] { (void)t.id("lamp"); }) == ErrorCode::UnknownClass);
}

TEST_CASE("class table rejects duplicates and empty names") {
  CHECK(code_of([] { ClassTable({"empty", "a", "a"}); }) == ErrorCode::InvalidClassTable);
  CHECK(code_of([] { ClassTable({"empty", ""}); }) == ErrorCode::InvalidClassTable);
  CHECK(code_of([] { ClassTable(std::vector<std::string>{}); }) == ErrorCode::InvalidClassTable);
}

TEST_CASE("aabb basics") {
  const Aabb b({0, 0, 0}, {2, 3, 4});
  CHECK(b.volume() == 3 * 4 * 5);
  CHECK(b.extents() == Dims{3, 4, 5});
  CHECK(b.contains(VoxelCoord{2, 3, 4}));
  CHECK_FALSE(b.contains(VoxelCoord{3, 0, 0}));
  CHECK(b.on_boundary({0, 1, 1}));
  CHECK_FALSE(b.on_boundary({1, 1, 1}));
  CHECK(Aabb::from_origin_dims({1, 2, 3}, {1, 1, 1}) == Aabb({1, 2, 3}, {1, 2, 3}));
  CHECK(code_of([] { Aabb({1, 0, 0}, {0, 0, 0}); }) == ErrorCode::InvalidAabb);
}

TEST_CASE("semantic grid indexing is x-fastest and validates labels") {
  std::vector<ClassId> labels(2 * 3 * 4, 0);
  labels[1 + 2 * (2 + 3 * 3)] = 5;
  const SemanticGrid g({10, 20, 30}, {2, 3, 4}, labels, indoor());
  CHECK(g.at(1, 2, 3) == 5);
  CHECK(g.at_world({11, 22, 33}) == 5);
  CHECK(g.at_world({0, 0, 0}) == kEmptyClass);
  CHECK(g.world_of(g.index(1, 2, 3)) == VoxelCoord{11, 22, 33});
  CHECK(g.count_non_empty() == 1);

  CHECK(code_of([&] { SemanticGrid({}, {2, 2, 2}, std::vector<ClassId>(7), indoor()); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { SemanticGrid({}, {1, 1, 1}, {12}, indoor()); }) ==
        ErrorCode::TargetIdOutOfRange);
}

TEST_CASE("class map resolution") {
  ClassMap m;
  m.entries = {{"minecraft:oak_stairs", "chair"}, {"couch", "sofa"}};
  const auto& t = ClassTable::indoor();
  CHECK(m.resolve("minecraft:oak_stairs[facing=north,half=bottom]", t) == t.id("chair"));
  CHECK(m.resolve("couch", t) == t.id("sofa"));
  CHECK(m.resolve("minecraft:stone", t) == t.id("objects"));
  m.default_target.reset();
  CHECK(code_of([&] { (void)m.resolve("minecraft:stone", t); }) == ErrorCode::UnknownClass);
  m.entries["lamp"] = "lighting";
  CHECK(code_of([&] { m.validate(t); }) == ErrorCode::TargetIdOutOfRange);
}

TEST_CASE("remap is many-to-one and keeps empty") {
  const auto source = std::make_shared<const ClassTable>(
      std::vector<std::string>{"empty", "armchair", "stool", "bed"});
  const SemanticGrid g({}, {4, 1, 1}, {0, 1, 2, 3}, source);
  ClassMap m;
  m.entries = {{"armchair", "chair"}, {"stool", "chair"}, {"bed", "bed"}};
  const auto out = remap_classes(g, m, indoor());
  const auto& t = ClassTable::indoor();
  CHECK(out.at(0, 0, 0) == kEmptyClass);
  CHECK(out.at(1, 0, 0) == t.id("chair"));
  CHECK(out.at(2, 0, 0) == t.id("chair"));
  CHECK(out.at(3, 0, 0) == t.id("bed"));
}

TEST_CASE("identity class map leaves grids unchanged") {
  Rng rng(7);
  const auto g = random_grid(rng, 6, 0.4, {1, 2, 3, 5, 11});
  CHECK(remap_classes(g, ClassMap::identity(ClassTable::indoor()), indoor()) == g);
}

TEST_CASE("VXG1 round trip and golden header") {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    const auto g = random_grid(rng, 7, 0.3, {1, 4, 7, 9}, {-3, 5, 100});
    CHECK(decode_grid_binary(encode_grid_binary(g)) == g);
  }
  const SemanticGrid one({1, -1, 2}, {1, 1, 1}, {3}, indoor());
  const auto bytes = encode_grid_binary(one);
  REQUIRE(bytes.size() > 28);
  CHECK(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 4) ==
        std::vector<std::uint8_t>{'V', 'X', 'G', '1'});
  // dims 1,1,1 then origin 1,-1,2
  CHECK(bytes[4] == 1);
  CHECK(bytes[16] == 1);
  CHECK(bytes[20] == 0xFF);
  CHECK(bytes[23] == 0xFF);
  CHECK(bytes[24] == 2);
  CHECK(bytes[bytes.size() - 2] == 3);
  CHECK(bytes[bytes.size() - 1] == 0);
}

TEST_CASE("VXG1 decode errors") {
  const SemanticGrid g({}, {2, 2, 2}, std::vector<ClassId>(8, 1), indoor());
  auto bytes = encode_grid_binary(g);
  auto bad_magic = bytes;
  bad_magic[0] = 'Q';
  CHECK(code_of([&] { decode_grid_binary(bad_magic); }) == ErrorCode::FormatError);
  auto bad_version = bytes;
  bad_version[3] = '2';
  CHECK(code_of([&] { decode_grid_binary(bad_version); }) == ErrorCode::UnknownVersion);
  auto short_payload = bytes;
  short_payload.pop_back();
  short_payload.pop_back();
  CHECK(code_of([&] { decode_grid_binary(short_payload); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("occ.json round trip, names and stride") {
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const auto g = random_grid(rng, 6, 0.3, {2, 3, 6}, {4, -2, 7});
    CHECK(decode_occ_json(encode_occ_json(g)) == g);
  }
  const auto g = random_grid(rng, 1, 0.0, {1});
  const auto text = R"({"origin":[0,0,0],"dims":[2,1,1],"voxels":[[1,0,0,"wall"]]})";
  const auto parsed = decode_occ_json(text);
  CHECK(parsed.at(1, 0, 0) == ClassTable::indoor().id("wall"));
  CHECK(parsed.at(0, 0, 0) == kEmptyClass);
  (void)g;
}

TEST_CASE("occ.json stride keeps whole strata") {
  std::vector<ClassId> labels(16 * 16 * 16, 3);
  const SemanticGrid g({1, 2, 3}, {16, 16, 16}, labels, indoor());
  const auto sparse = nlohmann::json::parse(encode_occ_json(g, 2));
  CHECK(sparse["stride"] == 2);
  std::size_t n = 0;
  for (const auto& v : sparse["voxels"]) {
    CHECK((v[0].get<int>() - 1) % 2 == 0);
    CHECK((v[1].get<int>() - 2) % 2 == 0);
    CHECK((v[2].get<int>() - 3) % 2 == 0);
    ++n;
  }
  CHECK(n == 8 * 8 * 8);
}

TEST_CASE("save and load pick the format from the extension") {
  const auto dir = std::filesystem::temp_directory_path() / "voxcraft_grid_io_test";
  std::filesystem::create_directories(dir);
  Rng rng(3);
  const auto g = random_grid(rng, 5, 0.5, {1, 2});
  save_grid(g, dir / "a.vxg");
  save_grid(g, dir / "a.json");
  CHECK(load_grid(dir / "a.vxg") == g);
  CHECK(load_grid(dir / "a.json") == g);
  CHECK(read_file_text(dir / "a.json").front() == '{');
  CHECK(code_of([&] { (void)load_grid(dir / "missing.vxg"); }) == ErrorCode::IoError);
  std::filesystem::remove_all(dir);
}

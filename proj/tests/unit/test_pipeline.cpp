// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/pipeline.hpp"

using namespace voxcraft;
namespace fs = std::filesystem;

namespace {

const ClassId kFloor = 2, kWall = 3, kSofa = 7;

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("voxcraft_pipeline_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ViewObservation identity_view(SemanticGrid g) {
  return {std::move(g), Extrinsics{}, intrinsics_from_fov(deg_to_rad(90), 64, 48)};
}

const std::vector<BlockPlacement> kSofaRecipe = {{{0, 0, 0}, "minecraft:gray_wool"},
                                                 {{1, 0, 0}, "minecraft:gray_wool"},
                                                 {{2, 0, 0}, "minecraft:gray_wool"},
                                                 {{0, 1, 0}, "minecraft:oak_stairs[facing=south]"}};

// 12x3x12 room: floor plane at y=0 and one L-shaped sofa resting on it.
SemanticGrid sofa_room() {
  auto g = SemanticGrid::empty(Aabb({0, 0, 0}, {11, 2, 11}), testing::indoor());
  std::vector<ClassId> labels(g.labels().begin(), g.labels().end());
  for (std::uint32_t z = 0; z < 12; ++z)
    for (std::uint32_t x = 0; x < 12; ++x) labels[g.index(x, 0, z)] = kFloor;
  for (const auto& b : kSofaRecipe) labels[*g.index_of(b.offset + VoxelCoord{4, 1, 5})] = kSofa;
  return g.with_labels(labels);
}

PipelineResources sofa_resources() {
  PipelineResources r = load_resources(PipelineConfig{});
  std::vector<VoxelCoord> shape;
  for (const auto& b : kSofaRecipe) shape.push_back(b.offset);
  r.library.templates.push_back(make_template("sofa", kSofa, shape, kSofaRecipe));
  return r;
}

}  // namespace

TEST_CASE("config parses sections and dotted keys") {
  const auto c = parse_pipeline_config(R"(
[centers]
kernel = 5
tau = 0.3
min_pts = 2
[match]
rotations = 0 180
jitter = true
[volume]
width = 8
epsilon = 1 0 -1
[rcon]
port = 25580
)");
  CHECK(c.centers.kernel == 5);
  CHECK(c.centers.tau == 0.3);
  CHECK(c.centers.min_pts == 2);
  CHECK(c.centers.eta == 2.0);
  CHECK(c.match.rotations == std::vector<int>{0, 180});
  CHECK(c.match.jitter);
  CHECK(c.volume.width == 8);
  CHECK(c.volume.height == 16);
  CHECK(c.epsilon == VoxelCoord{1, 0, -1});
  CHECK(c.rcon.port == 25580);
}

TEST_CASE("config defaults and round trip") {
  const auto d = parse_pipeline_config("");
  CHECK(d.centers.kernel == 3);
  CHECK(d.centers.tau == 0.2);
  CHECK_FALSE(d.epsilon.has_value());
  CHECK(d.cull);
  PipelineConfig c;
  c.centers.eta = 3.5;
  c.match.rotations = {90, 270};
  c.epsilon = VoxelCoord{2, 0, 2};
  c.rcon.host = "mc.local";
  const auto back = parse_pipeline_config(pipeline_config_to_ini(c));
  CHECK(back.centers.eta == 3.5);
  CHECK(back.match.rotations == c.match.rotations);
  CHECK(back.epsilon == c.epsilon);
  CHECK(back.rcon.host == "mc.local");
  CHECK(pipeline_config_to_ini(back) == pipeline_config_to_ini(c));
}

TEST_CASE("config errors") {
  CHECK(code_of([] { parse_pipeline_config("[centers]\nbogus = 1\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_pipeline_config("[centers]\nkernel = 4\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_pipeline_config("[centers]\ntau = abc\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_pipeline_config("[volume]\nepsilon = 1 2\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { parse_pipeline_config("[match]\nrotations = 45\n"); }) == ErrorCode::ConfigError);
  CHECK(code_of([] { load_pipeline_config("/nonexistent/voxcraft.ini"); }) == ErrorCode::ConfigError);
}

TEST_CASE("flags override config values") {
  auto c = parse_pipeline_config("[centers]\ntau = 0.4\neta = 3\n");
  set_config_value(c, "centers.tau", {"0.1"});
  CHECK(c.centers.tau == 0.1);
  CHECK(c.centers.eta == 3.0);
}

TEST_CASE("config paths resolve relative to the file") {
  const auto dir = temp_dir("paths");
  write_file_atomic(dir / "voxcraft.ini", std::string_view("[paths]\ntemplates = lib/t.json\n"));
  const auto c = load_pipeline_config(dir / "voxcraft.ini");
  CHECK(c.templates == dir / "lib" / "t.json");
  CHECK(code_of([&] { load_resources(c); }) == ErrorCode::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("all-empty input gives a single clear") {
  const auto g = SemanticGrid::empty(Aabb({0, 0, 0}, {5, 5, 5}), testing::indoor());
  const ViewObservation obs[] = {identity_view(g)};
  const auto res = load_resources(PipelineConfig{});
  const auto r = reconstruct_scene(obs, g.bounds(), PipelineConfig{}, res);
  CHECK(r.centers.centers.empty());
  REQUIRE(r.plan.commands.size() == 1);
  CHECK(std::holds_alternative<Clear>(r.plan.commands[0]));
  CHECK_FALSE(observation_bounds(obs).has_value());
}

TEST_CASE("isolated sofa on a floor is rebuilt from its template") {
  const auto g = sofa_room();
  const ViewObservation obs[] = {identity_view(g)};
  const auto res = sofa_resources();
  const auto r = reconstruct_scene(obs, g.bounds(), PipelineConfig{}, res);
  CHECK(r.fused == g);
  REQUIRE(r.centers.centers.size() == 2);
  const auto sofa = std::find_if(r.matches.begin(), r.matches.end(),
                                 [](const InstanceMatch& m) { return m.label == kSofa; });
  REQUIRE(sofa != r.matches.end());
  REQUIRE(sofa->match.has_value());
  CHECK(sofa->match->rotation == 0);
  CHECK(sofa->match->iou == 1.0);
  CHECK(sofa->match->placement == VoxelCoord{4, 1, 5});

  std::vector<SetBlock> stamped;
  for (const auto& c : r.plan.commands)
    if (const auto* s = std::get_if<SetBlock>(&c); s && g.at_world(s->pos) == kSofa) stamped.push_back(*s);
  std::vector<SetBlock> want;
  for (const auto& b : kSofaRecipe) want.push_back({b.offset + VoxelCoord{4, 1, 5}, b.block});
  CHECK(std::is_permutation(stamped.begin(), stamped.end(), want.begin(), want.end()));

  const auto decoded = decode_plan(r.plan, testing::indoor());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.labels()[i];
    if (c == kFloor) CHECK(decoded.labels()[i] == kFloor);
  }
  CHECK(decoded == g);
  CHECK(r.plan.diagnostics.template_instances == 1);
}

TEST_CASE("overlapping views fuse to the single-view plan on the overlap") {
  const auto g = sofa_room();
  const auto res = sofa_resources();
  const ViewObservation one[] = {identity_view(g)};
  const ViewObservation two[] = {identity_view(g), identity_view(g)};
  const auto a = reconstruct_scene(one, g.bounds(), PipelineConfig{}, res);
  const auto b = reconstruct_scene(two, g.bounds(), PipelineConfig{}, res);
  CHECK(a.fused == b.fused);
  CHECK(plan_to_json(a.plan, ClassTable::indoor()) == plan_to_json(b.plan, ClassTable::indoor()));

  // Second view covers only the x < 6 half; the fused grid still matches.
  auto half = g;
  std::vector<ClassId> labels(g.labels().begin(), g.labels().end());
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.world_of(i).x >= 6) labels[i] = kEmptyClass;
  half = g.with_labels(labels);
  const ViewObservation partial[] = {identity_view(g), identity_view(half)};
  CHECK(reconstruct_scene(partial, g.bounds(), PipelineConfig{}, res).fused == g);
}

TEST_CASE("reconstruction is deterministic") {
  testing::Rng rng(97);
  const auto g = testing::random_grid(rng, 14, 0.35, {kFloor, kWall, kSofa, 5, 6}, {2, 0, -3});
  const ViewObservation obs[] = {identity_view(g)};
  auto res = load_resources(PipelineConfig{});
  res.library = testing::asymmetric_library(rng, 4, kSofa);
  const auto a = reconstruct_scene(obs, g.bounds(), PipelineConfig{}, res);
  const auto b = reconstruct_scene(obs, g.bounds(), PipelineConfig{}, res);
  CHECK(plan_to_json(a.plan, ClassTable::indoor()) == plan_to_json(b.plan, ClassTable::indoor()));
  CHECK(diagnostics_to_json(a) == diagnostics_to_json(b));
}

TEST_CASE("stages run separately through files equal the monolithic run") {
  testing::Rng rng(101);
  const auto g = testing::random_grid(rng, 12, 0.4, {kFloor, kWall, kSofa, 5}, {0, 0, 0});
  const ViewObservation obs[] = {identity_view(g)};
  auto res = load_resources(PipelineConfig{});
  res.library = testing::asymmetric_library(rng, 3, kSofa);
  const PipelineConfig cfg;
  const auto mono = reconstruct_scene(obs, g.bounds(), cfg, res);

  const auto dir = temp_dir("stages");
  save_grid(fuse_views(obs, g.bounds()), dir / "fused.vxg");
  const auto fused = load_grid(dir / "fused.vxg");
  write_file_atomic(dir / "centers.json", centers_to_json(extract_centers(fused, cfg.centers), *res.table));
  const auto centers = load_centers(dir / "centers.json", *res.table);
  const auto staged = plan_from_centers(fused, centers, cfg, res);
  CHECK(plan_to_json(staged.plan, *res.table) == plan_to_json(mono.plan, *res.table));
  fs::remove_all(dir);
}

TEST_CASE("stage errors are tagged and keep their code") {
  const auto res = load_resources(PipelineConfig{});
  PipelineConfig cfg;
  cfg.centers.kernel = 2;
  const auto g = SemanticGrid::empty(Aabb({0, 0, 0}, {1, 1, 1}), testing::indoor());
  const ViewObservation obs[] = {identity_view(g)};
  try {
    reconstruct_scene(obs, g.bounds(), cfg, res);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidKernel);
    CHECK(std::string(e.what()).find("stage") != std::string::npos);
  }
  CHECK(code_of([&] { reconstruct_scene({}, g.bounds(), PipelineConfig{}, res); }) ==
        ErrorCode::EmptyObservationSet);
}

TEST_CASE("directory lock is exclusive") {
  const auto dir = temp_dir("lock");
  {
    DirectoryLock first(dir);
    CHECK(code_of([&] { DirectoryLock second(dir); }) == ErrorCode::LockHeld);
  }
  CHECK_NOTHROW(DirectoryLock again(dir));
  fs::remove_all(dir);
}

TEST_CASE("extract_view matches the brute-force oracle") {
  WorldMap world(Aabb({0, 0, 0}, {23, 7, 23}));
  for (int z = 0; z < 24; ++z)
    for (int x = 0; x < 24; ++x) {
      world.set({x, 0, z}, "minecraft:oak_planks");
      if (x == 0 || z == 0 || x == 23 || z == 23) {
        for (int y = 1; y < 7; ++y) world.set({x, y, z}, "minecraft:smooth_quartz");
      }
    }
  world.set({10, 1, 12}, "minecraft:red_wool");
  PipelineConfig cfg;
  cfg.volume = {8, 6, 8};
  cfg.cull = false;
  const auto res = load_resources(cfg);
  FramePose fp;
  fp.position = {12.3, 1.6, 4.7};
  fp.yaw_deg = 0;
  const auto v = extract_view(world, fp, cfg, res);
  CHECK(v.view_case.direction == ViewDirection::PosZ);
  CHECK(v.volume.volume() == 8 * 6 * 8);
  CHECK(v.volume.on_boundary({12, 1, 4}));
  const auto want = testing::brute_extract(world, v.volume, res.class_map, *res.table);
  CHECK(std::equal(want.begin(), want.end(), v.grid.labels().begin(), v.grid.labels().end()));

  cfg.cull = true;
  const auto culled = extract_view(world, fp, cfg, res);
  CHECK(culled.grid.count_non_empty() <= v.grid.count_non_empty());
  const auto k = fp.intrinsics(cfg.image_width, cfg.image_height);
  const auto p = fp.pose();
  for (std::size_t i = 0; i < culled.grid.size(); ++i) {
    const auto w = culled.grid.world_of(i);
    const bool inside = testing::projects_inside(w, p.position, p.yaw, p.pitch, k);
    CHECK(culled.grid.labels()[i] == (inside ? v.grid.labels()[i] : kEmptyClass));
  }
}

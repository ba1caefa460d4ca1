// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "oracles.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/pipeline.hpp"

using namespace voxcraft;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int rc;
  std::string out;
  std::string err;
};

class Workspace {
 public:
  explicit Workspace(const std::string& name)
      : dir_(fs::temp_directory_path() / ("voxcraft_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  fs::path operator/(const std::string& f) const { return dir_ / f; }

  Run run(const std::string& args, const std::string& env = {}) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" VOXCRAFT_CLI_PATH "' " +
                            args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Run r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file_text(out), read_file_text(err)};
    return r;
  }

  Run shell(const std::string& pipeline) const {
    const auto out = dir_ / "stdout.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && " + pipeline + " >'" + out.string() + "' 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file_text(out), {}};
  }

 private:
  fs::path dir_;
};

SemanticGrid room() {
  auto g = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{10, 4, 10}, testing::indoor());
  std::vector<ClassId> labels(g.size(), kEmptyClass);
  for (std::uint32_t z = 0; z < 10; ++z)
    for (std::uint32_t x = 0; x < 10; ++x) labels[g.index(x, 0, z)] = 2;
  for (std::uint32_t y = 1; y < 4; ++y)
    for (std::uint32_t x = 0; x < 10; ++x) labels[g.index(x, y, 0)] = 3;
  labels[g.index(5, 1, 5)] = 5;
  labels[g.index(5, 2, 5)] = 5;
  labels[g.index(6, 1, 5)] = 5;
  return g.with_labels(labels);
}

}  // namespace

TEST_CASE("usage errors exit 2 and help exits 0") {
  Workspace ws("usage");
  CHECK(ws.run("--help").rc == 0);
  CHECK(ws.run("").rc == 2);
  CHECK(ws.run("centers").rc == 2);
  CHECK(ws.run("frobnicate").rc == 2);
  save_grid(room(), ws / "occ.json");
  CHECK(ws.run("centers --in occ.json --kernel 4").rc == 2);
}

TEST_CASE("runtime errors exit 1 with a json error line") {
  Workspace ws("runtime");
  const auto r = ws.run("centers --in missing.json");
  CHECK(r.rc == 1);
  const auto line = json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(line["command"] == "centers");
  CHECK(line["error"] == "IoError");
  CHECK(line.contains("message"));
}

TEST_CASE("centers writes a valid centers.json") {
  Workspace ws("centers");
  save_grid(room(), ws / "occ.json");
  const auto r = ws.run("centers --in occ.json --tau 0.2 --eta 2 --out centers.json");
  REQUIRE(r.rc == 0);
  const auto cs = load_centers(ws / "centers.json", ClassTable::indoor());
  CHECK(cs.centers.size() == 3);
  const auto want = extract_centers(room(), CenterParams{3, 0.2, 2.0, 1});
  CHECK(read_file_text(ws / "centers.json") == centers_to_json(want, ClassTable::indoor()));
}

TEST_CASE("config file and environment variable feed the defaults") {
  Workspace ws("config");
  save_grid(room(), ws / "occ.json");
  write_file_atomic(ws / "cfg.ini", std::string_view("[centers]\ntau = 0.9\n"));
  const auto strict = ws.run("--config cfg.ini centers --in occ.json --out a.json");
  REQUIRE(strict.rc == 0);
  const auto env = ws.run("centers --in occ.json --out b.json", "VOXCRAFT_CONFIG=cfg.ini");
  REQUIRE(env.rc == 0);
  const auto flag = ws.run("--config cfg.ini centers --in occ.json --tau 0.2 --out c.json");
  REQUIRE(flag.rc == 0);
  const auto& t = ClassTable::indoor();
  CHECK(load_centers(ws / "a.json", t).centers.size() ==
        extract_centers(room(), CenterParams{3, 0.9, 2.0, 1}).centers.size());
  CHECK(read_file_text(ws / "a.json") == read_file_text(ws / "b.json"));
  CHECK(load_centers(ws / "c.json", t).centers.size() == 3);
}

TEST_CASE("plan piped into a dry-run apply prints commands") {
  Workspace ws("dryrun");
  save_grid(room(), ws / "fused.vxg");
  REQUIRE(ws.run("centers --in fused.vxg --out centers.json").rc == 0);
  const std::string cli = "'" VOXCRAFT_CLI_PATH "'";
  const auto r = ws.shell(cli + " plan --in fused.vxg --centers centers.json | " + cli +
                          " apply --plan - --host 127.0.0.1 --port 1 --dry-run");
  REQUIRE(r.rc == 0);
  const auto rendered = ws.run("plan --in fused.vxg --centers centers.json --render vanilla");
  REQUIRE(rendered.rc == 0);
  CHECK(r.out == rendered.out);
  CHECK(r.out.starts_with("fill 0 0 0 9 3 9 minecraft:air\n"));
}

TEST_CASE("run writes every intermediate and matches the staged commands") {
  Workspace ws("run");
  save_grid(room(), ws / "view.vxg");
  REQUIRE(ws.run("run --grids view.vxg --frame world --out-dir out").rc == 0);
  for (const char* f : {"fused.vxg", "centers.json", "matches.json", "plan.json", "diagnostics.json"}) {
    CHECK(fs::exists(ws / ("out/" + std::string(f))));
  }
  REQUIRE(ws.run("fuse --grids view.vxg --frame world --out fused.vxg").rc == 0);
  REQUIRE(ws.run("centers --in fused.vxg --out centers.json").rc == 0);
  REQUIRE(ws.run("match --in fused.vxg --centers centers.json --out matches.json").rc == 0);
  REQUIRE(ws.run("plan --in fused.vxg --centers centers.json --matches matches.json --out plan.json").rc == 0);
  CHECK(read_file_text(ws / "plan.json") == read_file_text(ws / "out/plan.json"));
}

TEST_CASE("extract writes one grid per pose") {
  Workspace ws("extract");
  WorldMap w(Aabb({0, 0, 0}, {15, 7, 15}));
  for (int z = 0; z < 16; ++z)
    for (int x = 0; x < 16; ++x) w.set({x, 0, z}, "minecraft:oak_planks");
  write_file_atomic(ws / "scene.schem", encode_schematic(w));
  const json poses = {{{"frame", "f0"}, {"pos", {8.5, 1.6, 2.5}}, {"yaw_deg", 0}, {"pitch_deg", 10}},
                      {{"frame", "f1"}, {"pos", {8.5, 1.6, 8.5}}, {"yaw_deg", 90}, {"pitch_deg", 0}},
                      {{"frame", "f2"}, {"pos", {3.5, 1.6, 3.5}}, {"yaw_deg", -45}, {"pitch_deg", 20}}};
  write_file_atomic(ws / "poses.json", poses.dump());
  const auto r = ws.run("extract --world scene.schem --poses poses.json --dims 8 4 8 --out dir/");
  REQUIRE(r.rc == 0);
  const auto index = json::parse(read_file_text(ws / "dir/index.json"));
  CHECK(index.size() == 3);
  for (const char* f : {"f0", "f1", "f2"}) {
    const auto g = load_grid(ws / ("dir/" + std::string(f) + ".vxg"));
    CHECK(g.dims().volume() == 8u * 4u * 8u);
  }
}

TEST_CASE("convert between grid formats") {
  Workspace ws("convert");
  save_grid(room(), ws / "a.vxg");
  REQUIRE(ws.run("convert --in a.vxg --out b.json").rc == 0);
  REQUIRE(ws.run("convert --in b.json --out c.vxg").rc == 0);
  CHECK(load_grid(ws / "c.vxg") == room());
}

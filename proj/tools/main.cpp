// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

// voxcraft: command-line front end for the reconstruction pipeline and the
// dataset direction.

#include <CLI11.hpp>
#include <json.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxcraft/build_plan.hpp"
#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/pipeline.hpp"
#include "voxcraft/rcon.hpp"
#include "voxcraft/service.hpp"

namespace fs = std::filesystem;
using namespace voxcraft;
using nlohmann::json;

namespace {

// Thrown for bad flag values that only show up after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags that override a config key. Values are kept as strings and applied
// through set_config_value so flags and the config file share one parser.
struct ConfigFlags {
  std::map<std::string, std::vector<std::string>> values;
  std::map<std::string, CLI::Option*> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help,
           int expected = 1) {
    auto* opt = app->add_option(flag, values[key], help + " [" + key + "]");
    if (expected > 1) opt->expected(expected);
    if (expected < 0) opt->expected(1, 16);
    options[key] = opt;
  }
  void add_switch(CLI::App* app, const std::string& flag, const std::string& key,
                  const std::string& help, const std::string& value) {
    auto* opt = app->add_flag(flag)->description(help + " [" + key + "]");
    options[key] = opt;
    values[key] = {value};
  }
  void apply(PipelineConfig& config) const {
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      try {
        set_config_value(config, key, values.at(key), fs::current_path());
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    try {
      config.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
};

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

PipelineConfig base_config(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnvVar)) path = env;
  }
  return path.empty() ? PipelineConfig{} : load_pipeline_config(path);
}

std::shared_ptr<const ClassTable> indoor_table() {
  return {std::shared_ptr<void>{}, &ClassTable::indoor()};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file_atomic(path, text);
  }
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  return read_file_text(path);
}

fs::path lock_dir_for(const std::string& out) {
  if (out.empty() || out == "-") return fs::current_path();
  const auto parent = fs::absolute(out).parent_path();
  fs::create_directories(parent);
  return parent;
}

std::optional<Aabb> parse_bounds(const std::vector<int>& v) {
  if (v.empty()) return std::nullopt;
  return Aabb({v[0], v[1], v[2]}, {v[3], v[4], v[5]});
}

std::vector<ViewObservation> load_observations(const std::vector<std::string>& grids,
                                               const std::string& poses_path,
                                               const std::string& frame) {
  std::vector<ViewObservation> obs;
  std::vector<FramePose> poses;
  const bool camera = frame == "camera" || (frame.empty() && !poses_path.empty());
  if (camera) {
    if (poses_path.empty()) throw UsageError("--frame camera needs --poses");
    poses = load_poses(poses_path);
    if (poses.size() != grids.size()) {
      fail(ErrorCode::DimensionMismatch, std::to_string(grids.size()) + " grids but " +
                                             std::to_string(poses.size()) + " poses");
    }
  }
  for (std::size_t i = 0; i < grids.size(); ++i) {
    ViewObservation o{load_grid(grids[i]), {}, {}};
    if (camera) {
      o.extrinsics = extrinsics_from_pose(poses[i].pose());
      o.intrinsics = poses[i].intrinsics(640, 480);
    }
    obs.push_back(std::move(o));
  }
  return obs;
}

Aabb fuse_bounds(const std::vector<ViewObservation>& obs, const std::vector<int>& bounds) {
  if (auto b = parse_bounds(bounds)) return *b;
  if (auto b = observation_bounds(obs)) return *b;
  return obs.front().grid.bounds();
}

PlanPatch load_patch(const std::string& path) {
  PlanPatch patch;
  if (path.empty()) return patch;
  json doc;
  try {
    doc = json::parse(read_file_text(path));
    for (const auto& a : doc.value("additions", json::array())) {
      const auto& p = a.at("pos");
      patch.additions.push_back({{p[0].get<int>(), p[1].get<int>(), p[2].get<int>()},
                                 a.at("block").get<std::string>()});
    }
    for (const auto& r : doc.value("removals", json::array())) {
      patch.removals.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<int>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, path + ": " + e.what());
  }
  return patch;
}

Dialect parse_dialect(const std::string& s) {
  if (s == "vanilla") return Dialect::Vanilla;
  if (s == "worldedit") return Dialect::WorldEdit;
  throw UsageError("--dialect must be vanilla or worldedit");
}

void print_error(const std::string& command, std::string_view code, const std::string& message) {
  std::cerr << json{{"error", code}, {"command", command}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxcraft: semantic occupancy grids to voxel-world build plans"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path,
                 std::string("key = value config file (default: $") + kConfigEnvVar + ")");
  app.add_option("--seed", g.seed, "Reserved; no stage is randomized, so this has no effect");

  std::string active;
  const auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->final_callback([&active, name] { active = name; });
    return s;
  };

  // fuse ------------------------------------------------------------------
  std::vector<std::string> fuse_grids;
  std::string fuse_poses, fuse_frame, fuse_out;
  std::vector<int> fuse_bounds_v;
  auto* fuse = sub("fuse", "Fuse per-view grids into one world grid");
  fuse->add_option("--grids,grids", fuse_grids, "Per-view grid files")->required();
  fuse->add_option("--poses", fuse_poses, "poses.json, one entry per grid in order");
  fuse->add_option("--frame", fuse_frame, "Grid frame: camera (needs poses) or world")
      ->check(CLI::IsMember({"camera", "world"}));
  fuse->add_option("--bounds", fuse_bounds_v, "Output box: x0 y0 z0 x1 y1 z1")->expected(6);
  fuse->add_option("--out", fuse_out, "Fused grid file")->required();

  // centers ---------------------------------------------------------------
  ConfigFlags centers_flags;
  std::string centers_in, centers_out;
  auto* centers = sub("centers", "Density map, thresholding and clustering to object centres");
  centers->add_option("--in", centers_in, "Grid file")->required();
  centers->add_option("--out", centers_out, "centers.json (default stdout)");
  centers_flags.add(centers, "--kernel", "centers.kernel", "Odd density kernel size");
  centers_flags.add(centers, "--tau", "centers.tau", "Density threshold");
  centers_flags.add(centers, "--eta", "centers.eta", "Clustering radius");
  centers_flags.add(centers, "--min-pts", "centers.min_pts", "Minimum neighbours for a core point");

  // match -----------------------------------------------------------------
  ConfigFlags match_flags;
  std::string match_in, match_centers, match_out;
  auto* match = sub("match", "Retrieve the best template for every centre");
  match->add_option("--in", match_in, "Grid file")->required();
  match->add_option("--centers", match_centers, "centers.json")->required();
  match->add_option("--out", match_out, "matches.json (default stdout)");
  match_flags.add(match, "--templates", "paths.templates", "Template library");
  match_flags.add(match, "--rotations", "match.rotations", "Rotations in degrees", -1);
  match_flags.add(match, "--radius", "match.radius", "Crop radius");
  match_flags.add(match, "--min-iou", "match.min_iou", "Minimum IoU for a template stamp");
  match_flags.add_switch(match, "--jitter", "match.jitter", "Also try +-1 block shifts", "true");

  // plan ------------------------------------------------------------------
  ConfigFlags plan_flags;
  std::string plan_in, plan_centers, plan_matches, plan_patch, plan_out, plan_diag, plan_render;
  auto* plan = sub("plan", "Emit the build plan");
  plan->add_option("--in", plan_in, "Grid file")->required();
  plan->add_option("--centers", plan_centers, "centers.json")->required();
  plan->add_option("--matches", plan_matches, "matches.json (computed when absent)");
  plan->add_option("--patch", plan_patch, "patch.json with additions and removals");
  plan->add_option("--out", plan_out, "plan.json (default stdout)");
  plan->add_option("--diagnostics", plan_diag, "Write a diagnostics report");
  plan->add_option("--render", plan_render, "Print commands in this dialect instead of plan.json")
      ->check(CLI::IsMember({"vanilla", "worldedit"}));
  plan_flags.add(plan, "--templates", "paths.templates", "Template library");
  plan_flags.add(plan, "--blocks", "paths.block_table", "Block table");
  plan_flags.add(plan, "--structural", "plan.structural", "Classes emitted as fills", -1);
  plan_flags.add(plan, "--min-iou", "match.min_iou", "Minimum IoU for a template stamp");
  plan_flags.add(plan, "--radius", "match.radius", "Crop radius");

  // apply -----------------------------------------------------------------
  ConfigFlags apply_flags;
  std::string apply_plan_path = "-", apply_dialect = "vanilla";
  bool apply_dry = false;
  auto* apply = sub("apply", "Send a plan to a server over RCON");
  apply->add_option("--plan", apply_plan_path, "plan.json ('-' reads stdin)");
  apply->add_flag("--dry-run", apply_dry, "Print the rendered commands, send nothing");
  apply->add_option("--dialect", apply_dialect, "Dialect for --dry-run output")
      ->check(CLI::IsMember({"vanilla", "worldedit"}));
  apply_flags.add(apply, "--host", "rcon.host", "Server host");
  apply_flags.add(apply, "--port", "rcon.port", "RCON port");
  apply_flags.add(apply, "--password-env", "rcon.password_env", "Variable holding the password");
  apply_flags.add(apply, "--throttle", "rcon.throttle", "Commands per second");
  apply_flags.add(apply, "--timeout-ms", "rcon.timeout_ms", "Per-request timeout");

  // extract ---------------------------------------------------------------
  ConfigFlags extract_flags;
  std::string extract_world, extract_poses, extract_out, extract_format = "vxg";
  auto* extract = sub("extract", "Label one view volume per pose from a world");
  extract->add_option("--world", extract_world, "world.json or .schem")->required();
  extract->add_option("--poses", extract_poses, "poses.json")->required();
  extract->add_option("--out", extract_out, "Output directory")->required();
  extract->add_option("--format", extract_format, "Grid format")->check(CLI::IsMember({"vxg", "json"}));
  extract_flags.add(extract, "--dims", "volume.dims", "Width height depth", 3);
  extract_flags.add(extract, "--epsilon", "volume.epsilon", "Offset x y z, or auto", -1);
  extract_flags.add_switch(extract, "--no-cull", "volume.cull", "Skip frustum culling", "false");
  extract_flags.add(extract, "--class-map", "paths.class_map", "Block to class map");
  extract_flags.add(extract, "--image-size", "camera.size", "Default image width height", 2);

  // remap -----------------------------------------------------------------
  std::string remap_in, remap_map, remap_classes_path, remap_out;
  auto* remap = sub("remap", "Map grid classes onto another class table");
  remap->add_option("--in", remap_in, "Grid file")->required();
  remap->add_option("--class-map", remap_map, "classmap.json")->required();
  remap->add_option("--classes", remap_classes_path, "Target class table: JSON list of names (default indoor)");
  remap->add_option("--out", remap_out, "Output grid")->required();

  // convert ---------------------------------------------------------------
  std::string convert_in, convert_out, convert_kind = "grid";
  std::uint32_t convert_stride = 1;
  auto* convert = sub("convert", "Convert between file formats");
  convert->add_option("--in", convert_in, "Input file")->required();
  convert->add_option("--out", convert_out, "Output file; format from the extension")->required();
  convert->add_option("--kind", convert_kind, "grid (.vxg/.json) or world (.json/.schem)")
      ->check(CLI::IsMember({"grid", "world"}));
  convert->add_option("--stride", convert_stride, "Keep every n-th voxel in occ.json output")
      ->check(CLI::PositiveNumber);

  // run -------------------------------------------------------------------
  std::vector<std::string> run_grids;
  std::string run_poses, run_frame, run_out;
  std::vector<int> run_bounds;
  auto* run = sub("run", "fuse, centers, match and plan in one go");
  run->add_option("--grids,grids", run_grids, "Per-view grid files")->required();
  run->add_option("--poses", run_poses, "poses.json");
  run->add_option("--frame", run_frame, "camera or world")->check(CLI::IsMember({"camera", "world"}));
  run->add_option("--bounds", run_bounds, "Output box: x0 y0 z0 x1 y1 z1")->expected(6);
  run->add_option("--out-dir", run_out, "Directory for fused.vxg, centers.json, matches.json, plan.json")
      ->required();

  // serve -----------------------------------------------------------------
  std::string serve_dir, serve_host = "127.0.0.1", serve_cors = "*";
  int serve_port = 8080;
  auto* serve = sub("serve", "HTTP service for the centre editor");
  serve->add_option("--projects", serve_dir, "Directory of project folders")->required();
  serve->add_option("--host", serve_host, "Bind address");
  serve->add_option("--port", serve_port, "Bind port")->check(CLI::Range(0, 65535));
  serve->add_option("--cors-origin", serve_cors, "Allowed browser origin");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto config = base_config(g);

    if (active == "fuse") {
      const auto obs = load_observations(fuse_grids, fuse_poses, fuse_frame);
      DirectoryLock lock(lock_dir_for(fuse_out));
      save_grid(fuse_views(obs, fuse_bounds(obs, fuse_bounds_v)), fuse_out);
    } else if (active == "centers") {
      centers_flags.apply(config);
      const auto grid = load_grid(centers_in);
      DirectoryLock lock(lock_dir_for(centers_out));
      write_output(centers_out, centers_to_json(extract_centers(grid, config.centers), grid.classes()));
    } else if (active == "match") {
      match_flags.apply(config);
      const auto grid = load_grid(match_in);
      const auto res = load_resources(config, grid.class_table_ptr());
      const auto cs = load_centers(match_centers, grid.classes());
      DirectoryLock lock(lock_dir_for(match_out));
      const auto m = match_instances(grid, cs, res.library, config.match);
      write_output(match_out, matches_to_json(m, res.library, grid.classes()));
    } else if (active == "plan") {
      plan_flags.apply(config);
      const auto grid = load_grid(plan_in);
      const auto res = load_resources(config, grid.class_table_ptr());
      const auto cs = load_centers(plan_centers, grid.classes());
      const auto patch = load_patch(plan_patch);
      PipelineResult result{grid, cs, {}, {}};
      if (plan_matches.empty()) {
        result = plan_from_centers(grid, cs, config, res, patch);
      } else {
        result.matches = parse_matches_json(read_file_text(plan_matches), res.library, grid.classes());
        result.plan = emit_plan(grid, cs, result.matches, res.library,
                                {res.structural, res.blocks, config.match, patch});
      }
      DirectoryLock lock(lock_dir_for(plan_out));
      if (!plan_diag.empty()) write_file_atomic(plan_diag, diagnostics_to_json(result));
      write_output(plan_out, plan_render.empty()
                                 ? plan_to_json(result.plan, grid.classes())
                                 : render_text(result.plan, parse_dialect(plan_render)));
    } else if (active == "apply") {
      apply_flags.apply(config);
      const auto p = parse_plan_json(read_input(apply_plan_path), ClassTable::indoor());
      if (apply_dry) {
        std::cout << render_text(p, parse_dialect(apply_dialect));
        return 0;
      }
      const char* password = std::getenv(config.rcon.password_env.c_str());
      auto session = rcon::Session::connect_and_auth(
          config.rcon.host, config.rcon.port, password ? password : "",
          {std::chrono::milliseconds(config.rcon.timeout_ms)});
      rcon::DispatchOptions opts;
      opts.throttle = config.rcon.throttle;
      opts.on_progress = [](const rcon::DispatchProgress& pr) {
        std::cerr << "\rsent " << pr.sent << "/" << pr.total << " failed " << pr.failed << std::flush;
      };
      const auto report = rcon::apply_plan(session, p, opts);
      std::cerr << '\n';
      json failures = json::array();
      for (std::size_t i = 0; i < report.results.size(); ++i) {
        const auto& r = report.results[i];
        if (!r.ok) failures.push_back({{"index", i}, {"command", r.command}, {"error", r.error}});
      }
      std::cout << json{{"total", report.total},         {"succeeded", report.succeeded},
                        {"failed", report.failed},       {"aborted", report.aborted},
                        {"duration_s", report.duration.count()}, {"failures", failures}}
                       .dump(2)
                << '\n';
      if (report.failed > 0 || report.aborted) {
        print_error(active, "DispatchFailed", std::to_string(report.failed) + " commands failed");
        return 1;
      }
    } else if (active == "extract") {
      if (auto it = extract_flags.values.find("volume.dims");
          it != extract_flags.values.end() && extract_flags.options["volume.dims"]->count()) {
        const auto& d = it->second;
        set_config_value(config, "volume.width", {d[0]});
        set_config_value(config, "volume.height", {d[1]});
        set_config_value(config, "volume.depth", {d[2]});
        extract_flags.options.erase("volume.dims");
      }
      if (extract_flags.options["camera.size"]->count()) {
        const auto& s = extract_flags.values["camera.size"];
        set_config_value(config, "camera.width", {s[0]});
        set_config_value(config, "camera.height", {s[1]});
      }
      extract_flags.options.erase("camera.size");
      extract_flags.apply(config);
      const auto world = load_world(extract_world);
      const auto poses = load_poses(extract_poses);
      const auto res = load_resources(config);
      fs::create_directories(extract_out);
      DirectoryLock lock(extract_out);
      json index = json::array();
      for (const auto& pose : poses) {
        const auto view = extract_view(world, pose, config, res);
        const auto file = pose.frame + (extract_format == "json" ? ".json" : ".vxg");
        save_grid(view.grid, fs::path(extract_out) / file);
        index.push_back({{"frame", pose.frame},
                         {"file", file},
                         {"direction", std::string(to_string(view.view_case.direction))},
                         {"min", {view.volume.min().x, view.volume.min().y, view.volume.min().z}},
                         {"max", {view.volume.max().x, view.volume.max().y, view.volume.max().z}}});
      }
      write_file_atomic(fs::path(extract_out) / "index.json", index.dump(2) + "\n");
    } else if (active == "remap") {
      const auto grid = load_grid(remap_in);
      std::shared_ptr<const ClassTable> target = indoor_table();
      if (!remap_classes_path.empty()) {
        try {
          target = std::make_shared<const ClassTable>(
              json::parse(read_file_text(remap_classes_path)).get<std::vector<std::string>>());
        } catch (const json::exception& e) {
          fail(ErrorCode::FormatError, remap_classes_path + ": " + e.what());
        }
      }
      const auto map = load_class_map(remap_map);
      DirectoryLock lock(lock_dir_for(remap_out));
      save_grid(remap_classes(grid, map, target), remap_out);
    } else if (active == "convert") {
      DirectoryLock lock(lock_dir_for(convert_out));
      if (convert_kind == "world") {
        const auto world = load_world(convert_in);
        if (fs::path(convert_out).extension() == ".schem") {
          write_file_atomic(convert_out, encode_schematic(world));
        } else {
          write_file_atomic(convert_out, world_to_json(world));
        }
      } else {
        const auto grid = load_grid(convert_in);
        if (format_from_path(convert_out) == GridFormat::OccJson) {
          write_file_atomic(convert_out, encode_occ_json(grid, convert_stride));
        } else {
          save_grid(grid, convert_out);
        }
      }
    } else if (active == "run") {
      const auto obs = load_observations(run_grids, run_poses, run_frame);
      fs::create_directories(run_out);
      DirectoryLock lock(run_out);
      const auto res = load_resources(config, obs.front().grid.class_table_ptr());
      const auto result = reconstruct_scene(obs, fuse_bounds(obs, run_bounds), config, res);
      const fs::path dir(run_out);
      const auto& table = result.fused.classes();
      save_grid(result.fused, dir / "fused.vxg");
      write_file_atomic(dir / "centers.json", centers_to_json(result.centers, table));
      write_file_atomic(dir / "matches.json", matches_to_json(result.matches, res.library, table));
      write_file_atomic(dir / "plan.json", plan_to_json(result.plan, table));
      write_file_atomic(dir / "diagnostics.json", diagnostics_to_json(result));
    } else if (active == "serve") {
      ServiceOptions opts{serve_dir, serve_cors, config};
      Service service(std::move(opts));
      std::cerr << "serving " << serve_dir << " on http://" << serve_host << ":" << serve_port << '\n';
      service.run(serve_host, serve_port);
    }
  } catch (const UsageError& e) {
    print_error(active, "UsageError", e.what());
    return 2;
  } catch (const Error& e) {
    print_error(active, to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(active, "Internal", e.what());
    return 1;
  }
  return 0;
}

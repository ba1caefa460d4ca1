// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/pipeline.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

void PipelineConfig::validate() const {
  const auto bad = [](const std::string& what) { fail(ErrorCode::ConfigError, what); };
  try {
    centers.validate();
    match.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (volume.width <= 0 || volume.height <= 0 || volume.depth <= 0) {
    bad("volume sizes must be positive");
  }
  if (image_width <= 0 || image_height <= 0) bad("camera image size must be positive");
  if (!(rcon.throttle > 0.0)) bad("rcon.throttle must be positive");
  if (rcon.timeout_ms <= 0) bad("rcon.timeout_ms must be positive");
  if (rcon.host.empty()) bad("rcon.host is empty");
}

namespace {

std::string single(std::string_view key, const std::vector<std::string>& values) {
  if (values.size() != 1) {
    fail(ErrorCode::ConfigError, std::string(key) + " takes exactly one value");
  }
  return values.front();
}

template <class T>
T number(std::string_view key, const std::vector<std::string>& values) {
  const auto text = single(key, values);
  std::istringstream is(text);
  T v{};
  is >> v;
  if (!is || !is.eof()) {
    fail(ErrorCode::ConfigError, std::string(key) + ": '" + text + "' is not a number");
  }
  return v;
}

bool boolean(std::string_view key, const std::vector<std::string>& values) {
  auto text = single(key, values);
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  fail(ErrorCode::ConfigError, std::string(key) + ": '" + text + "' is not a boolean");
}

// Arrays may arrive as separate items or as one space/comma separated string.
std::vector<std::string> split_list(const std::vector<std::string>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    std::string token;
    for (const char c : v) {
      if (c == ',' || c == ' ' || c == '\t' || c == '[' || c == ']' || c == '"') {
        if (!token.empty()) out.push_back(std::move(token));
        token.clear();
      } else {
        token.push_back(c);
      }
    }
    if (!token.empty()) out.push_back(std::move(token));
  }
  return out;
}

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
  std::filesystem::path path(p);
  if (path.empty() || path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

void set_config_value(PipelineConfig& c, std::string_view key,
                      const std::vector<std::string>& values,
                      const std::filesystem::path& base_dir) {
  if (key == "centers.kernel") {
    c.centers.kernel = number<int>(key, values);
  } else if (key == "centers.tau") {
    c.centers.tau = number<double>(key, values);
  } else if (key == "centers.eta") {
    c.centers.eta = number<double>(key, values);
  } else if (key == "centers.min_pts") {
    c.centers.min_pts = number<int>(key, values);
  } else if (key == "match.rotations") {
    c.match.rotations.clear();
    for (const auto& r : split_list(values)) c.match.rotations.push_back(number<int>(key, {r}));
  } else if (key == "match.radius") {
    c.match.crop_radius = number<int>(key, values);
  } else if (key == "match.min_iou") {
    c.match.min_iou = number<double>(key, values);
  } else if (key == "match.jitter") {
    c.match.jitter = boolean(key, values);
  } else if (key == "volume.width") {
    c.volume.width = number<int>(key, values);
  } else if (key == "volume.height") {
    c.volume.height = number<int>(key, values);
  } else if (key == "volume.depth") {
    c.volume.depth = number<int>(key, values);
  } else if (key == "volume.epsilon") {
    const auto parts = split_list(values);
    if (parts.size() == 1 && parts[0] == "auto") {
      c.epsilon.reset();
    } else if (parts.size() == 3) {
      c.epsilon = VoxelCoord{number<int>(key, {parts[0]}), number<int>(key, {parts[1]}),
                             number<int>(key, {parts[2]})};
    } else {
      fail(ErrorCode::ConfigError, "volume.epsilon takes 'auto' or three integers");
    }
  } else if (key == "volume.cull") {
    c.cull = boolean(key, values);
  } else if (key == "camera.width") {
    c.image_width = number<int>(key, values);
  } else if (key == "camera.height") {
    c.image_height = number<int>(key, values);
  } else if (key == "plan.structural") {
    c.structural = split_list(values);
  } else if (key == "paths.block_table") {
    c.block_table = resolve_path(single(key, values), base_dir);
  } else if (key == "paths.templates") {
    c.templates = resolve_path(single(key, values), base_dir);
  } else if (key == "paths.class_map") {
    c.class_map = resolve_path(single(key, values), base_dir);
  } else if (key == "rcon.host") {
    c.rcon.host = single(key, values);
  } else if (key == "rcon.port") {
    const auto port = number<int>(key, values);
    if (port <= 0 || port > 65535) fail(ErrorCode::ConfigError, "rcon.port out of range");
    c.rcon.port = static_cast<std::uint16_t>(port);
  } else if (key == "rcon.password_env") {
    c.rcon.password_env = single(key, values);
  } else if (key == "rcon.throttle") {
    c.rcon.throttle = number<double>(key, values);
  } else if (key == "rcon.timeout_ms") {
    c.rcon.timeout_ms = number<int>(key, values);
  } else {
    fail(ErrorCode::ConfigError, "unknown config key '" + std::string(key) + "'");
  }
}

PipelineConfig parse_pipeline_config(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig config;
  std::vector<CLI::ConfigItem> items;
  try {
    std::istringstream is{std::string(text)};
    items = CLI::ConfigINI().from_config(is);
  } catch (const std::exception& e) {
    fail(ErrorCode::ConfigError, std::string("config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& p : item.parents) {
      if (p == "default") continue;
      key += p;
      key += '.';
    }
    key += item.name;
    set_config_value(config, key, item.inputs, base_dir);
  }
  config.validate();
  return config;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file_text(path);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, e.what());
  }
  return parse_pipeline_config(text, path.parent_path());
}

std::string pipeline_config_to_ini(const PipelineConfig& c) {
  std::ostringstream os;
  os << "[centers]\nkernel = " << c.centers.kernel << "\ntau = " << c.centers.tau
     << "\neta = " << c.centers.eta << "\nmin_pts = " << c.centers.min_pts << "\n\n[match]\nrotations = ";
  for (std::size_t i = 0; i < c.match.rotations.size(); ++i) {
    os << (i ? " " : "") << c.match.rotations[i];
  }
  os << "\nradius = " << c.match.crop_radius << "\nmin_iou = " << c.match.min_iou
     << "\njitter = " << (c.match.jitter ? "true" : "false") << "\n\n[volume]\nwidth = "
     << c.volume.width << "\nheight = " << c.volume.height << "\ndepth = " << c.volume.depth
     << "\nepsilon = ";
  if (c.epsilon) {
    os << c.epsilon->x << ' ' << c.epsilon->y << ' ' << c.epsilon->z;
  } else {
    os << "auto";
  }
  os << "\ncull = " << (c.cull ? "true" : "false") << "\n\n[camera]\nwidth = " << c.image_width
     << "\nheight = " << c.image_height << "\n\n[plan]\nstructural = ";
  for (std::size_t i = 0; i < c.structural.size(); ++i) os << (i ? " " : "") << c.structural[i];
  os << "\n\n[paths]\n";
  if (!c.block_table.empty()) os << "block_table = " << c.block_table.string() << '\n';
  if (!c.templates.empty()) os << "templates = " << c.templates.string() << '\n';
  if (!c.class_map.empty()) os << "class_map = " << c.class_map.string() << '\n';
  os << "\n[rcon]\nhost = " << c.rcon.host << "\nport = " << c.rcon.port
     << "\npassword_env = " << c.rcon.password_env << "\nthrottle = " << c.rcon.throttle
     << "\ntimeout_ms = " << c.rcon.timeout_ms << '\n';
  return os.str();
}

namespace {

// Block names of the default block table mapped back to their classes.
ClassMap default_block_class_map(const ClassTable& table, const BlockTable& blocks) {
  ClassMap map;
  for (const auto& [id, block] : blocks.entries()) map.entries.emplace(block, table.name(id));
  if (!table.find("objects")) map.default_target.reset();
  return map;
}

}  // namespace

PipelineResources load_resources(const PipelineConfig& config,
                                 std::shared_ptr<const ClassTable> table) {
  PipelineResources r;
  r.table = table ? std::move(table)
                  : std::shared_ptr<const ClassTable>(std::shared_ptr<void>{}, &ClassTable::indoor());
  const auto& t = *r.table;
  const auto guarded = [](const std::filesystem::path& path, auto&& load) {
    try {
      return load();
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, path.string() + ": " + e.what());
    }
  };
  r.blocks = config.block_table.empty()
                 ? BlockTable::defaults(t)
                 : guarded(config.block_table, [&] { return load_block_table(config.block_table, t); });
  if (!config.templates.empty()) {
    r.library = guarded(config.templates, [&] { return load_templates(config.templates, t); });
  }
  if (config.class_map.empty()) {
    r.class_map = default_block_class_map(t, r.blocks);
  } else {
    r.class_map = guarded(config.class_map, [&] {
      auto m = load_class_map(config.class_map);
      m.validate(t);
      return m;
    });
  }
  for (const auto& name : config.structural) {
    const auto id = t.find(name);
    if (!id || *id == kEmptyClass) {
      fail(ErrorCode::ConfigError, "structural class '" + name + "' is not in the class table");
    }
    r.structural.insert(*id);
  }
  return r;
}

std::optional<Aabb> observation_bounds(std::span<const ViewObservation> observations) {
  std::optional<VoxelCoord> lo, hi;
  for (const auto& obs : observations) {
    for (const auto& vote : transform_view_to_world(obs)) {
      if (!lo) {
        lo = hi = vote.position;
        continue;
      }
      lo = VoxelCoord{std::min(lo->x, vote.position.x), std::min(lo->y, vote.position.y),
                      std::min(lo->z, vote.position.z)};
      hi = VoxelCoord{std::max(hi->x, vote.position.x), std::max(hi->y, vote.position.y),
                      std::max(hi->z, vote.position.z)};
    }
  }
  if (!lo) return std::nullopt;
  return Aabb(*lo, *hi);
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

PipelineResult plan_from_centers(const SemanticGrid& grid, const CenterSet& centers,
                                 const PipelineConfig& config, const PipelineResources& resources,
                                 const PlanPatch& patch) {
  PipelineResult result{grid, centers, {}, {}};
  result.matches = stage("match", [&] {
    return match_instances(grid, centers, resources.library, config.match);
  });
  result.plan = stage("plan", [&] {
    PlanConfig pc{resources.structural, resources.blocks, config.match, patch};
    return emit_plan(grid, centers, result.matches, resources.library, pc);
  });
  return result;
}

PipelineResult reconstruct_scene(std::span<const ViewObservation> observations,
                                 const Aabb& out_bounds, const PipelineConfig& config,
                                 const PipelineResources& resources) {
  auto fused = stage("fuse", [&] { return fuse_views(observations, out_bounds); });
  auto centers = stage("centers", [&] { return extract_centers(fused, config.centers); });
  return plan_from_centers(fused, centers, config, resources);
}

std::string diagnostics_to_json(const PipelineResult& result) {
  const auto& d = result.plan.diagnostics;
  std::size_t fills = 0, setblocks = 0;
  for (const auto& cmd : result.plan.commands) {
    if (std::holds_alternative<Fill>(cmd)) ++fills;
    if (std::holds_alternative<SetBlock>(cmd)) ++setblocks;
  }
  json conflicts = json::array();
  for (const auto& c : d.conflicts) {
    conflicts.push_back({{"pos", {c.pos.x, c.pos.y, c.pos.z}},
                         {"previous", c.previous},
                         {"replacement", c.replacement},
                         {"center", c.center_id}});
  }
  json doc{{"fused_voxels", result.fused.count_non_empty()},
           {"candidates", result.centers.candidate_count},
           {"noise_dropped", result.centers.noise_dropped},
           {"centers", result.centers.centers.size()},
           {"template_instances", d.template_instances},
           {"fallback_instances", d.fallback_instances},
           {"dropped_out_of_bounds", d.dropped_out_of_bounds},
           {"commands", result.plan.commands.size()},
           {"fills", fills},
           {"setblocks", setblocks},
           {"conflicts", std::move(conflicts)}};
  return doc.dump(2) + "\n";
}

ExtractedView extract_view(const WorldMap& world, const FramePose& pose,
                           const PipelineConfig& config, const PipelineResources& resources) {
  ExtractedView view{pose, {}, {}, SemanticGrid::empty(Aabb{}, resources.table)};
  const auto p = pose.pose();
  view.view_case = classify_view_case(p.yaw);
  const auto player = floor_to_block(p.position);
  const auto eps = config.epsilon.value_or(default_offset(view.view_case));
  view.volume = apply_offset(compute_view_volume(player, view.view_case, config.volume), eps);
  view.grid = extract_occupancy(world, view.volume, resources.class_map, resources.table);
  if (config.cull) {
    view.grid = frustum_cull(view.grid, extrinsics_from_pose(p),
                             pose.intrinsics(config.image_width, config.image_height));
  }
  return view;
}

DirectoryLock::DirectoryLock(const std::filesystem::path& dir) {
  const auto path = dir / ".voxcraft.lock";
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) fail(ErrorCode::IoError, "open " + path.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    const int err = errno;
    ::close(fd_);
    fd_ = -1;
    if (err == EWOULDBLOCK) fail(ErrorCode::LockHeld, dir.string() + " is in use by another process");
    fail(ErrorCode::IoError, "lock " + path.string() + ": " + std::strerror(err));
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace voxcraft

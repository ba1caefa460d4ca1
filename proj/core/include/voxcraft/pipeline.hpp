// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_PIPELINE_HPP
#define VOXCRAFT_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "voxcraft/build_plan.hpp"
#include "voxcraft/camera.hpp"
#include "voxcraft/centers.hpp"
#include "voxcraft/fusion.hpp"
#include "voxcraft/template_match.hpp"
#include "voxcraft/view_volume.hpp"
#include "voxcraft/world_map.hpp"

namespace voxcraft {

// Environment variable naming a config file when --config is not given.
inline constexpr const char* kConfigEnvVar = "VOXCRAFT_CONFIG";
inline constexpr const char* kDefaultPasswordEnvVar = "VOXCRAFT_RCON_PASSWORD";

struct RconEndpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 25575;
  std::string password_env = kDefaultPasswordEnvVar;
  double throttle = 20.0;
  int timeout_ms = 5000;
};

// Every free parameter of the pipeline. Paths are resolved against the
// directory of the config file they came from.
struct PipelineConfig {
  CenterParams centers;
  MatchOptions match;
  VolumeSpec volume;
  std::optional<VoxelCoord> epsilon;  // default_offset() per view when unset
  bool cull = true;
  int image_width = 640;
  int image_height = 480;
  std::vector<std::string> structural{"ceiling", "floor", "wall", "window"};
  std::filesystem::path block_table;
  std::filesystem::path templates;
  std::filesystem::path class_map;
  RconEndpoint rcon;

  // Throws ConfigError naming the first bad field.
  void validate() const;
};

// INI-style key = value file; keys may be grouped in [centers], [match],
// [volume], [camera], [plan], [paths] and [rcon] sections or written as
// section.key. Unknown keys are a ConfigError.
PipelineConfig parse_pipeline_config(std::string_view text,
                                     const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
std::string pipeline_config_to_ini(const PipelineConfig& config);

// Applies one config key to `config`; shared by the file parser and the CLI.
void set_config_value(PipelineConfig& config, std::string_view key,
                      const std::vector<std::string>& values,
                      const std::filesystem::path& base_dir = {});

// Files named by the config, loaded once.
struct PipelineResources {
  std::shared_ptr<const ClassTable> table;
  TemplateLibrary library;
  BlockTable blocks;
  std::set<ClassId> structural;
  ClassMap class_map;
};

// Missing optional paths fall back to an empty library, the default block
// table and the identity class map. Throws ConfigError with the failing path.
PipelineResources load_resources(const PipelineConfig& config,
                                 std::shared_ptr<const ClassTable> table = nullptr);

struct PipelineResult {
  SemanticGrid fused;
  CenterSet centers;
  std::vector<InstanceMatch> matches;
  BuildPlan plan;
};

// Bounding box of every occupied voxel after transforming into the world;
// nullopt if nothing is occupied.
std::optional<Aabb> observation_bounds(std::span<const ViewObservation> observations);

// fuse -> centers -> match -> emit. Errors are rethrown with the failing stage
// prefixed to the message and their original code.
PipelineResult reconstruct_scene(std::span<const ViewObservation> observations,
                                 const Aabb& out_bounds, const PipelineConfig& config,
                                 const PipelineResources& resources);

// match -> emit on an existing grid and centre set.
PipelineResult plan_from_centers(const SemanticGrid& grid, const CenterSet& centers,
                                 const PipelineConfig& config, const PipelineResources& resources,
                                 const PlanPatch& patch = {});

// Candidate counts, dropped noise, fallbacks and conflicts as JSON.
std::string diagnostics_to_json(const PipelineResult& result);

// One labelled view volume of the dataset direction.
struct ExtractedView {
  FramePose pose;
  ViewCase view_case;
  Aabb volume;
  SemanticGrid grid;
};

// View volume per pose (offset by config.epsilon or the default), labels from
// the world through the class map, then frustum culling if config.cull.
ExtractedView extract_view(const WorldMap& world, const FramePose& pose,
                           const PipelineConfig& config, const PipelineResources& resources);

// Exclusive advisory lock on `dir`/.voxcraft.lock. Throws LockHeld if another
// process holds it.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;
  ~DirectoryLock();

 private:
  int fd_ = -1;
};

}  // namespace voxcraft

#endif  // VOXCRAFT_PIPELINE_HPP

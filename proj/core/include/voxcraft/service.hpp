// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOXCRAFT_SERVICE_HPP
#define VOXCRAFT_SERVICE_HPP

#include <filesystem>
#include <memory>
#include <string>

#include "voxcraft/pipeline.hpp"

namespace voxcraft {

// A project is a directory below `projects_dir` holding the fused grid
// (fused.vxg, fused.json or occ.json) and optionally centers.json,
// patch.json and voxcraft.ini. Centre edits are persisted next to the grid
// with a revision file.
struct ServiceOptions {
  std::filesystem::path projects_dir;
  std::string cors_origin = "*";
  // Used for projects without their own voxcraft.ini.
  PipelineConfig config;
};

// HTTP/JSON service for the centre editor.
//   GET  /projects
//   GET  /projects/{id}/occ[?stride=n]
//   GET  /projects/{id}/centers
//   PUT  /projects/{id}/centers        If-Match: <revision>
//   POST /projects/{id}/plan
//   POST /projects/{id}/apply          {"dry_run":bool,"throttle":x,"wait":bool}
//   GET  /projects/{id}/status
//   POST /projects/{id}/cancel
class Service {
 public:
  explicit Service(ServiceOptions options);
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;
  ~Service();

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port; throws ConnectionError if binding fails.
  int start(const std::string& host, int port);
  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace voxcraft

#endif  // VOXCRAFT_SERVICE_HPP

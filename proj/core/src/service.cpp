// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <shared_mutex>
#include <thread>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"
#include "voxcraft/rcon.hpp"

namespace voxcraft {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct HttpError {
  int status;
  std::string code;
  std::string message;
  json detail = nullptr;
};

[[noreturn]] void http_fail(int status, std::string code, std::string message, json detail = nullptr) {
  throw HttpError{status, std::move(code), std::move(message), std::move(detail)};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

json coord_json(VoxelCoord v) { return {v.x, v.y, v.z}; }

VoxelCoord coord_of(const json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number_integer() || !j[1].is_number_integer() ||
      !j[2].is_number_integer()) {
    fail(ErrorCode::FormatError, "expected an integer [x,y,z]");
  }
  return {j[0].get<std::int32_t>(), j[1].get<std::int32_t>(), j[2].get<std::int32_t>()};
}

Eigen::Vector3d position_of(const json& j) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number()) {
    fail(ErrorCode::FormatError, "expected a numeric [x,y,z]");
  }
  Eigen::Vector3d p{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
  if (!p.allFinite()) fail(ErrorCode::FormatError, "position is not finite");
  return p;
}

json patch_to_json(const PlanPatch& patch) {
  json adds = json::array();
  for (const auto& a : patch.additions) adds.push_back({{"pos", coord_json(a.pos)}, {"block", a.block}});
  json removals = json::array();
  for (const auto& r : patch.removals) removals.push_back(coord_json(r));
  return {{"additions", std::move(adds)}, {"removals", std::move(removals)}};
}

PlanPatch patch_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::FormatError, "patch must be an object");
  PlanPatch patch;
  try {
    for (const auto& a : j.value("additions", json::array())) {
      auto block = a.at("block").get<std::string>();
      if (block.empty()) fail(ErrorCode::FormatError, "patch addition without a block");
      patch.additions.push_back({coord_of(a.at("pos")), std::move(block)});
    }
    for (const auto& r : j.value("removals", json::array())) patch.removals.push_back(coord_of(r));
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("patch: ") + e.what());
  }
  return patch;
}

json report_json(const rcon::DispatchReport& report) {
  json failures = json::array();
  for (std::size_t i = 0; i < report.results.size(); ++i) {
    const auto& r = report.results[i];
    if (r.ok) continue;
    failures.push_back(
        {{"index", i}, {"command", r.command}, {"attempts", r.attempts}, {"error", r.error}});
  }
  return {{"total", report.total},
          {"sent", report.results.size()},
          {"succeeded", report.succeeded},
          {"failed", report.failed},
          {"aborted", report.aborted},
          {"cancelled", report.cancelled},
          {"duration_s", report.duration.count()},
          {"failures", std::move(failures)}};
}

std::uint64_t parse_revision(std::string text) {
  if (text.starts_with("W/")) text.erase(0, 2);
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
  if (text.empty() || !std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isdigit(c); })) {
    http_fail(400, "BadRequest", "If-Match must carry a revision number");
  }
  return std::stoull(text);
}

std::string etag(std::uint64_t revision) { return "\"" + std::to_string(revision) + "\""; }

struct DispatchStatus {
  std::string state = "idle";
  std::size_t sent = 0;
  std::size_t total = 0;
  std::size_t failed = 0;
  std::uint64_t revision = 0;
  json report = nullptr;
  std::string error;
};

struct Project {
  Project(std::string id_, fs::path dir_, PipelineConfig config_, SemanticGrid grid_)
      : id(std::move(id_)), dir(std::move(dir_)), config(std::move(config_)), grid(std::move(grid_)) {}

  std::string id;
  fs::path dir;
  PipelineConfig config;
  SemanticGrid grid;
  PipelineResources resources;

  std::shared_mutex mu;
  CenterSet centers;
  std::uint64_t revision = 0;
  PlanPatch patch;

  std::mutex job_mu;
  std::jthread job;
  DispatchStatus status;

  void persist() const {
    write_file_atomic(dir / "centers.json", centers_to_json(centers, *resources.table));
    write_file_atomic(dir / "patch.json", patch_to_json(patch).dump(2) + "\n");
    write_file_atomic(dir / "revision", std::to_string(revision) + "\n");
  }
};

std::optional<fs::path> find_grid(const fs::path& dir) {
  for (const char* name : {"fused.vxg", "fused.json", "occ.json"}) {
    if (fs::is_regular_file(dir / name)) return dir / name;
  }
  return std::nullopt;
}

std::unique_ptr<Project> load_project(const std::string& id, const fs::path& dir,
                                      const PipelineConfig& fallback) {
  const auto grid_path = find_grid(dir);
  if (!grid_path) return nullptr;
  auto config = fs::is_regular_file(dir / "voxcraft.ini") ? load_pipeline_config(dir / "voxcraft.ini")
                                                          : fallback;
  auto p = std::make_unique<Project>(id, dir, std::move(config), load_grid(*grid_path));
  p->resources = load_resources(p->config, p->grid.class_table_ptr());
  const auto& table = *p->resources.table;
  if (fs::is_regular_file(dir / "centers.json")) {
    p->centers = load_centers(dir / "centers.json", table);
  } else {
    p->centers = extract_centers(p->grid, p->config.centers);
  }
  if (fs::is_regular_file(dir / "revision")) {
    p->revision = std::stoull(read_file_text(dir / "revision"));
  }
  if (fs::is_regular_file(dir / "patch.json")) {
    try {
      p->patch = patch_from_json(json::parse(read_file_text(dir / "patch.json")));
    } catch (const json::exception& e) {
      fail(ErrorCode::FormatError, "patch.json: " + std::string(e.what()));
    }
  }
  return p;
}

int next_center_id(const CenterSet& set) {
  int id = 0;
  for (const auto& c : set.centers) id = std::max(id, c.id + 1);
  return id;
}

std::vector<Center>::iterator find_center(CenterSet& set, const json& op) {
  const auto id = op.at("id").get<int>();
  auto it = std::find_if(set.centers.begin(), set.centers.end(), [&](const Center& c) { return c.id == id; });
  if (it == set.centers.end()) fail(ErrorCode::InvalidParameter, "no center with id " + std::to_string(id));
  return it;
}

ClassId class_of(const json& j, const ClassTable& table) {
  const auto id = j.is_string() ? table.id(j.get<std::string>()) : j.get<ClassId>();
  if (id == kEmptyClass || id >= table.size()) {
    fail(ErrorCode::TargetIdOutOfRange, "center class must be a non-empty class of the table");
  }
  return id;
}

// Edit verbs of the PUT payload, applied in order.
void apply_op(CenterSet& set, const json& op, const ClassTable& table) {
  const auto verb = op.at("op").get<std::string>();
  if (verb == "move") {
    find_center(set, op)->position = position_of(op.at("pos"));
  } else if (verb == "delete") {
    set.centers.erase(find_center(set, op));
  } else if (verb == "reassign") {
    find_center(set, op)->label = class_of(op.at("class"), table);
  } else if (verb == "delete_class") {
    const auto cls = class_of(op.at("class"), table);
    std::erase_if(set.centers, [&](const Center& c) { return c.label == cls; });
  } else if (verb == "add") {
    Center c;
    c.id = next_center_id(set);
    c.label = class_of(op.at("class"), table);
    c.position = position_of(op.at("pos"));
    c.member_count = 1;
    set.centers.push_back(std::move(c));
  } else if (verb == "split") {
    const auto it = find_center(set, op);
    const Center base = *it;
    std::array<Eigen::Vector3d, 2> pos{base.position - Eigen::Vector3d::UnitX(),
                                       base.position + Eigen::Vector3d::UnitX()};
    if (op.contains("positions")) {
      const auto& ps = op["positions"];
      if (!ps.is_array() || ps.size() != 2) fail(ErrorCode::FormatError, "split takes two positions");
      pos = {position_of(ps[0]), position_of(ps[1])};
    }
    set.centers.erase(it);
    const auto first = next_center_id(set);
    for (int k = 0; k < 2; ++k) {
      Center c = base;
      c.id = std::max(first, base.id + 1) + k;
      c.position = pos[static_cast<std::size_t>(k)];
      c.member_count = std::max<std::size_t>(1, (base.member_count + 1 - static_cast<std::size_t>(k)) / 2);
      c.members.clear();
      set.centers.push_back(std::move(c));
    }
  } else {
    fail(ErrorCode::InvalidParameter, "unknown edit op '" + verb + "'");
  }
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  httplib::Server server;
  std::thread worker;
  std::mutex projects_mu;
  std::map<std::string, std::unique_ptr<Project>> projects;

  explicit Impl(ServiceOptions o) : options(std::move(o)) { routes(); }

  ~Impl() {
    server.stop();
    if (worker.joinable()) worker.join();
    std::lock_guard lock(projects_mu);
    for (auto& [id, p] : projects) {
      if (p->job.joinable()) {
        p->job.request_stop();
        p->job.join();
      }
    }
  }

  Project& project(const std::string& id) {
    static const std::regex kId("[A-Za-z0-9_.-]+");
    if (!std::regex_match(id, kId) || id == "." || id == "..") {
      http_fail(404, "NotFound", "unknown project '" + id + "'");
    }
    std::lock_guard lock(projects_mu);
    if (auto it = projects.find(id); it != projects.end()) return *it->second;
    auto p = load_project(id, options.projects_dir / id, options.config);
    if (!p) http_fail(404, "NotFound", "unknown project '" + id + "'");
    return *projects.emplace(id, std::move(p)).first->second;
  }

  template <class F>
  httplib::Server::Handler guarded(F f) {
    return [this, f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const HttpError& e) {
        json body{{"error", e.code}, {"message", e.message}};
        if (!e.detail.is_null()) body["detail"] = e.detail;
        send_json(res, body, e.status);
      } catch (const Error& e) {
        send_json(res, {{"error", std::string(to_string(e.code()))}, {"message", e.what()}}, 500);
      } catch (const std::exception& e) {
        send_json(res, {{"error", "Internal"}, {"message", e.what()}}, 500);
      }
    };
  }

  static json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      return json::parse(req.body);
    } catch (const json::parse_error& e) {
      http_fail(400, "BadRequest", std::string("body is not JSON: ") + e.what());
    }
  }

  json centers_payload(Project& p) {
    return {{"revision", p.revision},
            {"centers", json::parse(centers_to_json(p.centers, *p.resources.table))},
            {"patch", patch_to_json(p.patch)}};
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", options.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type, If-Match"},
                                {"Access-Control-Expose-Headers", "ETag"}});
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.Get("/projects", guarded([this](const httplib::Request&, httplib::Response& res) {
      json ids = json::array();
      std::error_code ec;
      std::vector<std::string> names;
      for (const auto& entry : fs::directory_iterator(options.projects_dir, ec)) {
        if (entry.is_directory() && find_grid(entry.path())) names.push_back(entry.path().filename().string());
      }
      std::sort(names.begin(), names.end());
      for (auto& n : names) ids.push_back(std::move(n));
      send_json(res, {{"projects", std::move(ids)}});
    }));

    server.Get(R"(/projects/([^/]+)/occ)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto& p = project(req.matches[1]);
                 std::uint32_t stride = 1;
                 if (req.has_param("stride")) {
                   const auto s = req.get_param_value("stride");
                   if (s.empty() || s.size() > 6 ||
                       !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); }) ||
                       std::stoul(s) == 0) {
                     http_fail(400, "BadRequest", "stride must be a positive integer");
                   }
                   stride = static_cast<std::uint32_t>(std::stoul(s));
                 }
                 res.status = 200;
                 res.set_content(encode_occ_json(p.grid, stride), "application/json");
               }));

    server.Get(R"(/projects/([^/]+)/centers)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto& p = project(req.matches[1]);
                 std::shared_lock lock(p.mu);
                 res.set_header("ETag", etag(p.revision));
                 send_json(res, centers_payload(p));
               }));

    server.Put(R"(/projects/([^/]+)/centers)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto& p = project(req.matches[1]);
                 if (!req.has_header("If-Match")) {
                   http_fail(428, "PreconditionRequired", "PUT requires If-Match: <revision>");
                 }
                 const auto expected = parse_revision(req.get_header_value("If-Match"));
                 const auto body = parse_body(req);
                 if (!body.is_object()) http_fail(422, "FormatError", "body must be an object");

                 std::unique_lock lock(p.mu);
                 if (expected != p.revision) {
                   http_fail(409, "RevisionConflict",
                             "revision " + std::to_string(expected) + " is stale",
                             {{"revision", p.revision}});
                 }
                 CenterSet next = p.centers;
                 PlanPatch patch = p.patch;
                 const auto& table = *p.resources.table;
                 try {
                   if (body.contains("centers")) next = parse_centers_json(body["centers"].dump(), table);
                   if (body.contains("ops")) {
                     if (!body["ops"].is_array()) fail(ErrorCode::FormatError, "ops must be a list");
                     for (const auto& op : body["ops"]) apply_op(next, op, table);
                   }
                   if (body.contains("patch")) patch = patch_from_json(body["patch"]);
                   std::sort(next.centers.begin(), next.centers.end(),
                             [](const Center& a, const Center& b) { return a.id < b.id; });
                   // Round trip through the schema check.
                   next = parse_centers_json(centers_to_json(next, table), table);
                 } catch (const Error& e) {
                   http_fail(422, std::string(to_string(e.code())), e.what());
                 } catch (const json::exception& e) {
                   http_fail(422, "FormatError", e.what());
                 }
                 next.params = p.centers.params;
                 p.centers = std::move(next);
                 p.patch = std::move(patch);
                 ++p.revision;
                 p.persist();
                 res.set_header("ETag", etag(p.revision));
                 send_json(res, centers_payload(p));
               }));

    server.Post(R"(/projects/([^/]+)/plan)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto& p = project(req.matches[1]);
                  std::shared_lock lock(p.mu);
                  const auto result = plan_from_centers(p.grid, p.centers, p.config, p.resources, p.patch);
                  write_file_atomic(p.dir / "plan.json", plan_to_json(result.plan, *p.resources.table));
                  auto summary = json::parse(diagnostics_to_json(result));
                  summary["revision"] = p.revision;
                  summary["instances"] = result.plan.diagnostics.instances;
                  summary["conflict_count"] = result.plan.diagnostics.conflicts.size();
                  send_json(res, summary);
                }));

    server.Post(R"(/projects/([^/]+)/apply)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  apply(project(req.matches[1]), parse_body(req), res);
                }));

    server.Get(R"(/projects/([^/]+)/status)",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 auto& p = project(req.matches[1]);
                 std::lock_guard lock(p.job_mu);
                 send_json(res, status_json(p.status));
               }));

    server.Post(R"(/projects/([^/]+)/cancel)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  auto& p = project(req.matches[1]);
                  std::lock_guard lock(p.job_mu);
                  const bool running = p.status.state == "running";
                  if (running) p.job.request_stop();
                  send_json(res, {{"cancelling", running}});
                }));
  }

  static json status_json(const DispatchStatus& s) {
    json j{{"state", s.state},   {"sent", s.sent}, {"total", s.total},
           {"failed", s.failed}, {"revision", s.revision}};
    if (!s.report.is_null()) j["report"] = s.report;
    if (!s.error.empty()) j["error"] = s.error;
    return j;
  }

  void apply(Project& p, const json& body, httplib::Response& res) {
    if (!body.is_object()) http_fail(400, "BadRequest", "body must be an object");
    const bool dry_run = body.value("dry_run", false);
    const bool wait = body.value("wait", false);
    const double throttle = body.value("throttle", p.config.rcon.throttle);
    if (!(throttle > 0.0) || !std::isfinite(throttle)) {
      http_fail(400, "BadRequest", "throttle must be a positive number");
    }

    BuildPlan plan;
    std::uint64_t revision = 0;
    {
      std::shared_lock lock(p.mu);
      plan = plan_from_centers(p.grid, p.centers, p.config, p.resources, p.patch).plan;
      revision = p.revision;
    }
    auto commands = render_commands(plan, Dialect::Vanilla);
    if (dry_run) {
      send_json(res, {{"dry_run", true}, {"revision", revision}, {"count", commands.size()},
                      {"commands", commands}});
      return;
    }

    std::unique_lock job_lock(p.job_mu);
    if (p.status.state == "running") http_fail(409, "Busy", "a dispatch is already running");
    if (p.job.joinable()) p.job.join();

    const char* password = std::getenv(p.config.rcon.password_env.c_str());
    std::optional<rcon::Session> session;
    try {
      session.emplace(rcon::Session::connect_and_auth(
          p.config.rcon.host, p.config.rcon.port, password ? password : "",
          {std::chrono::milliseconds(p.config.rcon.timeout_ms)}));
    } catch (const Error& e) {
      http_fail(502, std::string(to_string(e.code())), e.what());
    }
    p.status = DispatchStatus{"running", 0, commands.size(), 0, revision, nullptr, {}};

    auto run = [&p, throttle, commands = std::move(commands),
                s = std::move(*session)](std::stop_token stop) mutable {
      rcon::DispatchOptions opts;
      opts.throttle = throttle;
      opts.stop = stop;
      opts.on_progress = [&p](const rcon::DispatchProgress& prog) {
        std::lock_guard lock(p.job_mu);
        p.status.sent = prog.sent;
        p.status.failed = prog.failed;
      };
      DispatchStatus final;
      try {
        const auto report = rcon::dispatch_commands(s, commands, opts);
        final.report = report_json(report);
        final.state = report.cancelled ? "cancelled"
                      : (report.failed > 0 || report.aborted) ? "failed"
                                                              : "done";
      } catch (const Error& e) {
        final.state = "failed";
        final.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      std::lock_guard lock(p.job_mu);
      p.status.state = final.state;
      p.status.report = std::move(final.report);
      p.status.error = std::move(final.error);
      if (!p.status.report.is_null()) {
        p.status.sent = p.status.report["sent"].get<std::size_t>();
        p.status.failed = p.status.report["failed"].get<std::size_t>();
      }
    };

    if (!wait) {
      p.job = std::jthread(std::move(run));
      send_json(res, status_json(p.status), 202);
      return;
    }
    job_lock.unlock();
    run(std::stop_token{});
    std::lock_guard lock(p.job_mu);
    if (p.status.state != "done") {
      http_fail(502, "DispatchFailed", "one or more commands failed", status_json(p.status));
    }
    send_json(res, status_json(p.status));
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) fail(ErrorCode::ConnectionError, "cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    fail(ErrorCode::ConnectionError, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::run(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) {
    fail(ErrorCode::ConnectionError, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace voxcraft

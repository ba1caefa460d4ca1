// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

namespace voxcraft::testing {

std::shared_ptr<const ClassTable> indoor() {
  static const auto table = std::make_shared<const ClassTable>(ClassTable::indoor().names());
  return table;
}

SemanticGrid random_grid(Rng& rng, int max_dim, double fill, const std::vector<ClassId>& classes,
                         VoxelCoord origin) {
  std::uniform_int_distribution<std::uint32_t> dim(1, static_cast<std::uint32_t>(max_dim));
  const Dims d{dim(rng), dim(rng), dim(rng)};
  std::bernoulli_distribution occupied(fill);
  std::uniform_int_distribution<std::size_t> pick(0, classes.size() - 1);
  std::vector<ClassId> labels(d.volume(), kEmptyClass);
  for (auto& l : labels) {
    if (occupied(rng)) l = classes[pick(rng)];
  }
  return SemanticGrid(origin, d, std::move(labels), indoor());
}

std::vector<std::uint32_t> brute_window_counts(const SemanticGrid& grid, int k) {
  const auto d = grid.dims();
  const int r = k / 2;
  std::vector<std::uint32_t> counts(grid.size(), 0);
  for (int z = 0; z < static_cast<int>(d.z); ++z)
    for (int y = 0; y < static_cast<int>(d.y); ++y)
      for (int x = 0; x < static_cast<int>(d.x); ++x) {
        std::uint32_t n = 0;
        for (int dz = -r; dz <= r; ++dz)
          for (int dy = -r; dy <= r; ++dy)
            for (int dx = -r; dx <= r; ++dx) {
              const int xx = x + dx, yy = y + dy, zz = z + dz;
              if (xx < 0 || yy < 0 || zz < 0 || xx >= static_cast<int>(d.x) ||
                  yy >= static_cast<int>(d.y) || zz >= static_cast<int>(d.z)) {
                continue;
              }
              if (grid.at(xx, yy, zz) != kEmptyClass) ++n;
            }
        counts[grid.index(x, y, z)] = n;
      }
  return counts;
}

std::vector<Candidate> brute_candidates(const SemanticGrid& grid, int k, double tau) {
  const auto counts = brute_window_counts(grid, k);
  const double volume = static_cast<double>(k) * k * k;
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto label = grid.labels()[i];
    if (label == kEmptyClass) continue;
    if (counts[i] / volume >= tau) out.push_back({grid.world_of(i), label});
  }
  return out;
}

DbscanResult reference_dbscan(const std::vector<Eigen::Vector3d>& points, double eta, int min_pts) {
  const auto n = points.size();
  const auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      if ((points[i] - points[j]).norm() <= eta) out.push_back(j);
    }
    return out;
  };
  constexpr int kUnvisited = -2, kNoise = -1;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    const auto seeds = neighbours(i);
    if (static_cast<int>(seeds.size()) < min_pts) {
      label[i] = kNoise;
      continue;
    }
    label[i] = cluster;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      const auto q = queue.front();
      queue.pop_front();
      if (label[q] == kNoise) label[q] = cluster;
      if (label[q] != kUnvisited) continue;
      label[q] = cluster;
      const auto more = neighbours(q);
      if (static_cast<int>(more.size()) >= min_pts) queue.insert(queue.end(), more.begin(), more.end());
    }
    ++cluster;
  }
  DbscanResult r;
  r.clusters.resize(static_cast<std::size_t>(cluster));
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] == kNoise) {
      r.noise.push_back(i);
    } else {
      r.clusters[static_cast<std::size_t>(label[i])].push_back(i);
    }
  }
  return r;
}

std::set<std::vector<std::size_t>> partition_of(const DbscanResult& r) {
  std::set<std::vector<std::size_t>> out;
  for (auto c : r.clusters) {
    std::sort(c.begin(), c.end());
    out.insert(std::move(c));
  }
  return out;
}

Eigen::Matrix3d rotation_by_product(double yaw, double pitch) {
  const Eigen::Matrix3d rx = Eigen::AngleAxisd(pitch + std::numbers::pi, Eigen::Vector3d::UnitX()).toRotationMatrix();
  const Eigen::Matrix3d ry = Eigen::AngleAxisd(yaw + std::numbers::pi, Eigen::Vector3d::UnitY()).toRotationMatrix();
  return rx * ry;
}

bool projects_inside(VoxelCoord v, const Eigen::Vector3d& cam_pos, double yaw, double pitch,
                     const Intrinsics& k) {
  const Eigen::Matrix3d r = rotation_by_product(yaw, pitch);
  const Eigen::Vector3d centre{v.x + 0.5, v.y + 0.5, v.z + 0.5};
  const Eigen::Vector3d c = r.transpose() * (centre - cam_pos);
  if (c.z() <= 0.0) return false;
  const double u = k.fx * c.x() / c.z() + k.cx;
  const double w = k.fy * c.y() / c.z() + k.cy;
  return u >= 0.0 && u <= k.width && w >= 0.0 && w <= k.height;
}

std::vector<ClassId> replay_plan(const BuildPlan& plan, const Aabb& bounds,
                                 const std::map<std::string, ClassId, std::less<>>& class_of) {
  const auto e = bounds.extents();
  std::vector<ClassId> out(static_cast<std::size_t>(bounds.volume()), kEmptyClass);
  const auto put = [&](VoxelCoord p, ClassId c) {
    if (!bounds.contains(p)) return;
    const auto l = p - bounds.min();
    out[static_cast<std::size_t>(l.x) + e.x * (static_cast<std::size_t>(l.y) + e.y * static_cast<std::size_t>(l.z))] = c;
  };
  const auto cls = [&](const std::string& block) {
    if (is_air_block(block)) return kEmptyClass;
    return class_of.at(block);
  };
  for (const auto& cmd : plan.commands) {
    if (const auto* c = std::get_if<Clear>(&cmd)) {
      for (int z = c->box.min().z; z <= c->box.max().z; ++z)
        for (int y = c->box.min().y; y <= c->box.max().y; ++y)
          for (int x = c->box.min().x; x <= c->box.max().x; ++x) put({x, y, z}, kEmptyClass);
    } else if (const auto* f = std::get_if<Fill>(&cmd)) {
      const auto id = cls(f->block);
      for (int z = f->box.min().z; z <= f->box.max().z; ++z)
        for (int y = f->box.min().y; y <= f->box.max().y; ++y)
          for (int x = f->box.min().x; x <= f->box.max().x; ++x) put({x, y, z}, id);
    } else {
      const auto& s = std::get<SetBlock>(cmd);
      put(s.pos, cls(s.block));
    }
  }
  return out;
}

std::vector<ClassId> brute_extract(const WorldMap& world, const Aabb& box, const ClassMap& map,
                                   const ClassTable& table) {
  std::vector<ClassId> out;
  for (int z = box.min().z; z <= box.max().z; ++z)
    for (int y = box.min().y; y <= box.max().y; ++y)
      for (int x = box.min().x; x <= box.max().x; ++x) {
        const auto name = world.query({x, y, z});
        out.push_back(is_air_block(name) ? kEmptyClass : map.resolve(name, table));
      }
  return out;
}

VoxelCoord turn_clockwise(VoxelCoord v, int quarter_turns) {
  Eigen::Matrix3i m;
  m << 0, 0, -1,  //
      0, 1, 0,    //
      1, 0, 0;
  Eigen::Vector3i p(v.x, v.y, v.z);
  for (int i = 0; i < ((quarter_turns % 4) + 4) % 4; ++i) p = m * p;
  return {p.x(), p.y(), p.z()};
}

namespace {

std::vector<VoxelCoord> normalised(std::vector<VoxelCoord> vs) {
  VoxelCoord lo = vs.front();
  for (auto v : vs) lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
  for (auto& v : vs) v = v - lo;
  std::sort(vs.begin(), vs.end());
  return vs;
}

}  // namespace

TemplateLibrary asymmetric_library(Rng& rng, int count, ClassId label) {
  std::uniform_int_distribution<int> side(2, 4);
  std::bernoulli_distribution keep(0.55);
  TemplateLibrary lib;
  std::set<std::vector<VoxelCoord>> shapes;
  while (static_cast<int>(lib.templates.size()) < count) {
    const int sx = side(rng), sy = side(rng), sz = side(rng);
    std::vector<VoxelCoord> vs;
    for (int x = 0; x < sx; ++x)
      for (int y = 0; y < sy; ++y)
        for (int z = 0; z < sz; ++z)
          if (keep(rng)) vs.push_back({x, y, z});
    if (vs.size() < 4) continue;
    std::vector<std::vector<VoxelCoord>> turns;
    for (int q = 0; q < 4; ++q) {
      std::vector<VoxelCoord> r;
      for (auto v : vs) r.push_back(turn_clockwise(v, q));
      turns.push_back(normalised(std::move(r)));
    }
    bool distinct = true;
    for (int a = 0; a < 4 && distinct; ++a) {
      if (shapes.count(turns[a])) distinct = false;
      for (int b = a + 1; b < 4; ++b)
        if (turns[a] == turns[b]) distinct = false;
    }
    if (!distinct) continue;
    for (auto& t : turns) shapes.insert(t);
    lib.templates.push_back(
        make_template("t" + std::to_string(lib.templates.size()), label, std::move(vs)));
  }
  return lib;
}

}  // namespace voxcraft::testing

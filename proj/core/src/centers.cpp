// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include "voxcraft/centers.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "voxcraft/error.hpp"
#include "voxcraft/grid_io.hpp"

namespace voxcraft {

using nlohmann::json;

BinaryGrid binarize(const SemanticGrid& grid) {
  BinaryGrid out{grid.origin(), grid.dims(), std::vector<std::uint8_t>(grid.size())};
  std::transform(grid.labels().begin(), grid.labels().end(), out.cells.begin(),
                 [](ClassId id) -> std::uint8_t { return id != kEmptyClass ? 1 : 0; });
  return out;
}

std::vector<double> DensityField::values() const {
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = value(i);
  return out;
}

namespace {

// In-place zero-padded box sum of radius r along one axis. `stride` is the
// distance between neighbours along the axis, `n` the axis length, and
// `lines` enumerates the first element of every line.
void box_sum_axis(std::vector<std::uint32_t>& data, std::size_t n, std::size_t stride,
                  const std::vector<std::size_t>& lines, int r) {
  std::vector<std::uint32_t> prefix(n + 1);
  for (const auto start : lines) {
    prefix[0] = 0;
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + data[start + i * stride];
    for (std::size_t i = 0; i < n; ++i) {
      const auto lo = i >= static_cast<std::size_t>(r) ? i - r : 0;
      const auto hi = std::min(n, i + r + 1);
      data[start + i * stride] = prefix[hi] - prefix[lo];
    }
  }
}

}  // namespace

DensityField density_map(const BinaryGrid& binary, int kernel) {
  if (kernel < 1 || kernel % 2 == 0) {
    fail(ErrorCode::InvalidKernel,
         "kernel size must be odd and positive, got " + std::to_string(kernel));
  }
  const auto [nx, ny, nz] = binary.dims;
  DensityField field{binary.dims, kernel,
                     std::vector<std::uint32_t>(binary.cells.begin(), binary.cells.end())};
  const int r = kernel / 2;
  if (r == 0) return field;

  std::vector<std::size_t> lines;
  lines.reserve(static_cast<std::size_t>(ny) * nz);
  for (std::uint32_t z = 0; z < nz; ++z)
    for (std::uint32_t y = 0; y < ny; ++y) lines.push_back(binary.index(0, y, z));
  box_sum_axis(field.counts, nx, 1, lines, r);

  lines.clear();
  for (std::uint32_t z = 0; z < nz; ++z)
    for (std::uint32_t x = 0; x < nx; ++x) lines.push_back(binary.index(x, 0, z));
  box_sum_axis(field.counts, ny, nx, lines, r);

  lines.clear();
  for (std::uint32_t y = 0; y < ny; ++y)
    for (std::uint32_t x = 0; x < nx; ++x) lines.push_back(binary.index(x, y, 0));
  box_sum_axis(field.counts, nz, static_cast<std::size_t>(nx) * ny, lines, r);
  return field;
}

std::vector<Candidate> extract_candidates(const SemanticGrid& grid, const DensityField& density,
                                          double tau) {
  if (density.dims != grid.dims() || density.counts.size() != grid.size()) {
    fail(ErrorCode::DimensionMismatch, "density field does not match grid dimensions");
  }
  std::vector<Candidate> out;
  const auto labels = grid.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kEmptyClass && density.value(i) >= tau) {
      out.push_back({grid.world_of(i), labels[i]});
    }
  }
  return out;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller index as root so roots are component minima.
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

struct CellKey {
  std::int64_t x, y, z;
  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) + 0x94D049BB133111EBull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Uniform hash grid whose cells are slightly wider than eta, so any pair
// within eta lies in the same or an adjacent cell.
class NeighborIndex {
 public:
  NeighborIndex(std::span<const Eigen::Vector3d> points, double eta)
      : points_(points), eta_sq_(eta * eta), cell_(eta * (1.0 + 1e-6)) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i])].push_back(i);
  }

  template <typename F>
  void for_each_neighbor(std::size_t i, F&& f) const {
    const auto& p = points_[i];
    const auto k = key(p);
    for (std::int64_t dz = -1; dz <= 1; ++dz) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
          auto it = cells_.find({k.x + dx, k.y + dy, k.z + dz});
          if (it == cells_.end()) continue;
          for (const auto j : it->second) {
            if (within(p, points_[j])) f(j);
          }
        }
      }
    }
  }

 private:
  CellKey key(const Eigen::Vector3d& p) const {
    return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
            static_cast<std::int64_t>(std::floor(p.y() / cell_)),
            static_cast<std::int64_t>(std::floor(p.z() / cell_))};
  }
  bool within(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    const double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz <= eta_sq_;
  }

  std::span<const Eigen::Vector3d> points_;
  double eta_sq_;
  double cell_;
  std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells_;
};

}  // namespace

DbscanResult dbscan(std::span<const Eigen::Vector3d> points, double eta, int min_pts) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::InvalidParameter, "dbscan: eta must be positive and finite");
  }
  if (min_pts < 1) fail(ErrorCode::InvalidParameter, "dbscan: min_pts must be >= 1");
  const std::size_t n = points.size();
  DbscanResult result;
  if (n == 0) return result;

  const NeighborIndex index(points, eta);
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t count = 0;
    index.for_each_neighbor(i, [&](std::size_t) { ++count; });
    core[i] = count >= static_cast<std::size_t>(min_pts);
  }

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    index.for_each_neighbor(i, [&](std::size_t j) {
      if (core[j]) uf.unite(i, j);
    });
  }

  // Roots are the smallest core index of each component, so ascending root
  // order is discovery order.
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> cluster_of_root(n, kNone);
  std::vector<std::size_t> assignment(n, kNone);
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    const auto root = uf.find(i);
    if (cluster_of_root[root] == kNone) {
      cluster_of_root[root] = result.clusters.size();
      result.clusters.emplace_back();
    }
    assignment[i] = cluster_of_root[root];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    std::size_t best = kNone;
    index.for_each_neighbor(i, [&](std::size_t j) {
      if (core[j]) best = std::min(best, assignment[j]);
    });
    assignment[i] = best;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] == kNone) {
      result.noise.push_back(i);
    } else {
      result.clusters[assignment[i]].push_back(i);
    }
  }
  return result;
}

void CenterParams::validate() const {
  if (kernel < 1 || kernel % 2 == 0) {
    fail(ErrorCode::InvalidKernel, "kernel size must be odd and positive");
  }
  if (!std::isfinite(tau)) fail(ErrorCode::InvalidParameter, "tau must be finite");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    fail(ErrorCode::InvalidParameter, "eta must be positive");
  }
  if (min_pts < 1) fail(ErrorCode::InvalidParameter, "min_pts must be >= 1");
}

CenterSet cluster_centroids(std::span<const Candidate> candidates, double eta, int min_pts) {
  CenterSet set;
  set.params.eta = eta;
  set.params.min_pts = min_pts;
  set.candidate_count = candidates.size();

  std::map<ClassId, std::vector<VoxelCoord>> by_class;
  for (const auto& c : candidates) by_class[c.label].push_back(c.position);

  int next_id = 0;
  for (const auto& [label, coords] : by_class) {
    std::vector<Eigen::Vector3d> points;
    points.reserve(coords.size());
    for (const auto& v : coords) points.emplace_back(v.x, v.y, v.z);
    const auto clusters = dbscan(points, eta, min_pts);
    set.noise_dropped += clusters.noise.size();
    for (const auto& members : clusters.clusters) {
      Center center;
      center.id = next_id++;
      center.label = label;
      center.member_count = members.size();
      std::int64_t sx = 0, sy = 0, sz = 0;
      for (const auto m : members) {
        center.members.push_back(coords[m]);
        sx += coords[m].x;
        sy += coords[m].y;
        sz += coords[m].z;
      }
      const auto n = static_cast<double>(members.size());
      center.position = {static_cast<double>(sx) / n, static_cast<double>(sy) / n,
                         static_cast<double>(sz) / n};
      set.centers.push_back(std::move(center));
    }
  }
  return set;
}

CenterSet extract_centers(const SemanticGrid& grid, const CenterParams& params) {
  params.validate();
  const auto density = density_map(binarize(grid), params.kernel);
  const auto candidates = extract_candidates(grid, density, params.tau);
  auto set = cluster_centroids(candidates, params.eta, params.min_pts);
  set.params = params;
  return set;
}

std::string centers_to_json(const CenterSet& set, const ClassTable& table) {
  json doc = json::array();
  for (const auto& c : set.centers) {
    doc.push_back({{"id", c.id},
                   {"class", table.name(c.label)},
                   {"pos", {c.position.x(), c.position.y(), c.position.z()}},
                   {"members", c.member_count}});
  }
  return doc.dump(2) + "\n";
}

CenterSet parse_centers_json(std::string_view text, const ClassTable& table) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::FormatError, std::string("centers.json: ") + e.what());
  }
  // Also accept {"centers":[...]} as served by the HTTP service.
  if (doc.is_object() && doc.contains("centers")) doc = doc["centers"];
  if (!doc.is_array()) fail(ErrorCode::FormatError, "centers.json: expected a list");
  CenterSet set;
  std::set<int> ids;
  for (const auto& entry : doc) {
    if (!entry.is_object()) fail(ErrorCode::FormatError, "centers.json: entries must be objects");
    Center c;
    try {
      c.id = entry.at("id").get<int>();
      const auto& cls = entry.at("class");
      c.label = cls.is_string() ? table.id(cls.get<std::string>())
                                : static_cast<ClassId>(cls.get<int>());
      const auto& pos = entry.at("pos");
      if (!pos.is_array() || pos.size() != 3) {
        fail(ErrorCode::FormatError, "centers.json: \"pos\" must be [x,y,z]");
      }
      c.position = {pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>()};
      c.member_count = entry.value("members", std::size_t{1});
    } catch (const json::exception& e) {
      fail(ErrorCode::FormatError, std::string("centers.json: ") + e.what());
    }
    if (c.label == kEmptyClass || c.label >= table.size()) {
      fail(ErrorCode::UnknownClass, "centers.json: center " + std::to_string(c.id) +
                                        " has no valid object class");
    }
    if (!c.position.allFinite()) {
      fail(ErrorCode::InvalidParameter,
           "centers.json: center " + std::to_string(c.id) + " has a non-finite position");
    }
    if (c.member_count < 1) {
      fail(ErrorCode::InvalidParameter, "centers.json: member count must be >= 1");
    }
    if (!ids.insert(c.id).second) {
      fail(ErrorCode::InvalidParameter, "centers.json: duplicate id " + std::to_string(c.id));
    }
    set.centers.push_back(std::move(c));
  }
  return set;
}

CenterSet load_centers(const std::filesystem::path& path, const ClassTable& table) {
  return parse_centers_json(read_file_text(path), table);
}

}  // namespace voxcraft

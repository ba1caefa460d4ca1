// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "voxcraft/centers.hpp"
#include "voxcraft/error.hpp"

using namespace voxcraft;

namespace {

std::vector<Eigen::Vector3d> random_points(testing::Rng& rng, std::size_t n, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

// Union-find over all pairs within eta.
std::set<std::vector<std::size_t>> eta_components(const std::vector<Eigen::Vector3d>& pts,
                                                  double eta) {
  std::vector<std::size_t> parent(pts.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).norm() <= eta) parent[find(i)] = find(j);
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pts.size(); ++i) groups[find(i)].push_back(i);
  std::set<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.insert(members);
  return out;
}

}  // namespace

TEST_CASE("density of a single voxel") {
  auto g = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{5, 5, 5}, testing::indoor());
  std::vector<ClassId> labels(g.size(), 0);
  labels[g.index(2, 2, 2)] = 3;
  g = g.with_labels(labels);
  const auto d = density_map(binarize(g), 3);
  CHECK(d.value(g.index(2, 2, 2)) == doctest::Approx(1.0 / 27));
  CHECK(d.value(g.index(3, 2, 2)) == doctest::Approx(1.0 / 27));
  CHECK(d.value(g.index(1, 1, 1)) == doctest::Approx(1.0 / 27));
  CHECK(d.value(g.index(4, 2, 2)) == 0.0);
  CHECK(d.value(g.index(0, 0, 0)) == 0.0);
}

TEST_CASE("density of a full 5^3 block") {
  auto g = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{5, 5, 5}, testing::indoor());
  g = g.with_labels(std::vector<ClassId>(g.size(), 1));
  const auto d = density_map(binarize(g), 3);
  CHECK(d.value(g.index(2, 2, 2)) == 1.0);
  CHECK(d.value(g.index(1, 3, 2)) == 1.0);
  CHECK(d.value(g.index(0, 0, 0)) == doctest::Approx(8.0 / 27));
  CHECK(d.value(g.index(4, 4, 0)) == doctest::Approx(8.0 / 27));
  CHECK(d.value(g.index(0, 2, 2)) == doctest::Approx(18.0 / 27));
}

TEST_CASE("density and candidates match the brute-force window sum") {
  testing::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = testing::random_grid(rng, 12, 0.3, {1, 2, 3}, {-4, 0, 7});
    for (int k : {1, 3, 5}) {
      const auto d = density_map(binarize(g), k);
      CHECK(d.counts == testing::brute_window_counts(g, k));
      for (double tau : {0.0, 0.2, 0.5}) {
        CHECK(extract_candidates(g, d, tau) == testing::brute_candidates(g, k, tau));
      }
    }
  }
}

TEST_CASE("density kernel must be odd and positive") {
  const auto g = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{2, 2, 2}, testing::indoor());
  for (int k : {0, -1, 2, 4}) {
    try {
      density_map(binarize(g), k);
      FAIL("expected InvalidKernel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidKernel);
    }
  }
}

TEST_CASE("candidates require a matching density field") {
  const auto a = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{2, 2, 2}, testing::indoor());
  const auto b = SemanticGrid::empty(VoxelCoord{0, 0, 0}, Dims{3, 2, 2}, testing::indoor());
  try {
    extract_candidates(a, density_map(binarize(b), 3), 0.1);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("dbscan examples") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {1, 0, 0}, {10, 0, 0}};
  const auto r = dbscan(pts, 2.0, 1);
  REQUIRE(r.clusters.size() == 2);
  CHECK(r.clusters[0] == std::vector<std::size_t>{0, 1});
  CHECK(r.clusters[1] == std::vector<std::size_t>{2});
  CHECK(r.noise.empty());

  const std::vector<Eigen::Vector3d> one = {{4, 5, 6}};
  CHECK(dbscan(one, 0.1, 1).clusters.size() == 1);

  const auto noisy = dbscan(pts, 2.0, 3);
  CHECK(noisy.clusters.empty());
  CHECK(noisy.noise.size() == 3);
}

TEST_CASE("dbscan distance threshold is inclusive") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}, {2, 0, 0}};
  CHECK(dbscan(pts, 2.0, 1).clusters.size() == 1);
  CHECK(dbscan(pts, 1.999, 1).clusters.size() == 2);
}

TEST_CASE("dbscan rejects bad parameters") {
  const std::vector<Eigen::Vector3d> pts = {{0, 0, 0}};
  for (auto [eta, mp] : {std::pair{0.0, 1}, std::pair{-1.0, 1}, std::pair{1.0, 0}}) {
    try {
      dbscan(pts, eta, mp);
      FAIL("expected InvalidParameter");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidParameter);
    }
  }
}

TEST_CASE("dbscan equals the quadratic reference") {
  testing::Rng rng(23);
  std::uniform_real_distribution<double> eta_dist(0.5, 4.0);
  std::uniform_int_distribution<std::size_t> n_dist(1, 200);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_points(rng, n_dist(rng), 20.0);
    const double eta = eta_dist(rng);
    for (int mp : {1, 3}) {
      const auto got = dbscan(pts, eta, mp);
      const auto want = testing::reference_dbscan(pts, eta, mp);
      CHECK(got.clusters == want.clusters);
      CHECK(got.noise == want.noise);
    }
  }
}

TEST_CASE("dbscan with min_pts 1 equals eta-connected components") {
  testing::Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = random_points(rng, 150, 15.0);
    const double eta = 1.0 + 0.1 * trial;
    const auto r = dbscan(pts, eta, 1);
    CHECK(r.noise.empty());
    CHECK(testing::partition_of(r) == eta_components(pts, eta));
  }
}

TEST_CASE("dbscan clusters are disjoint and cover every point") {
  testing::Rng rng(31);
  const auto pts = random_points(rng, 180, 12.0);
  const auto r = dbscan(pts, 1.5, 4);
  std::vector<int> seen(pts.size(), 0);
  for (const auto& c : r.clusters)
    for (auto i : c) ++seen[i];
  for (auto i : r.noise) ++seen[i];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("cluster_centroids are pure per-class means") {
  testing::Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_grid(rng, 10, 0.25, {1, 2, 6}, {3, -1, 0});
    const auto set = extract_centers(g, CenterParams{3, 0.1, 1.5, 2});
    std::size_t members = 0;
    for (const auto& c : set.centers) {
      REQUIRE(!c.members.empty());
      CHECK(c.member_count == c.members.size());
      Eigen::Vector3d mean = Eigen::Vector3d::Zero();
      for (auto m : c.members) {
        CHECK(g.at_world(m) == c.label);
        mean += Eigen::Vector3d(m.x, m.y, m.z);
      }
      mean /= static_cast<double>(c.members.size());
      CHECK((mean - c.position).norm() < 1e-9);
      members += c.members.size();
    }
    CHECK(members + set.noise_dropped == set.candidate_count);
    for (std::size_t i = 0; i < set.centers.size(); ++i) CHECK(set.centers[i].id == static_cast<int>(i));
  }
}

TEST_CASE("centroids are translation equivariant") {
  testing::Rng rng(41);
  std::uniform_int_distribution<int> shift(-50, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testing::random_grid(rng, 9, 0.3, {1, 5}, {0, 0, 0});
    const VoxelCoord t{shift(rng), shift(rng), shift(rng)};
    const SemanticGrid shifted(g.origin() + t, g.dims(),
                               std::vector<ClassId>(g.labels().begin(), g.labels().end()),
                               g.class_table_ptr());
    const CenterParams p{3, 0.15, 1.8, 1};
    const auto a = extract_centers(g, p);
    const auto b = extract_centers(shifted, p);
    REQUIRE(a.centers.size() == b.centers.size());
    for (std::size_t i = 0; i < a.centers.size(); ++i) {
      CHECK(a.centers[i].label == b.centers[i].label);
      const Eigen::Vector3d d = b.centers[i].position - a.centers[i].position;
      CHECK((d - Eigen::Vector3d(t.x, t.y, t.z)).norm() < 1e-9);
    }
  }
}

TEST_CASE("centers.json round trip") {
  testing::Rng rng(43);
  const auto g = testing::random_grid(rng, 8, 0.4, {1, 2, 3}, {});
  const auto set = extract_centers(g, CenterParams{});
  const auto& table = ClassTable::indoor();
  const auto back = parse_centers_json(centers_to_json(set, table), table);
  REQUIRE(back.centers.size() == set.centers.size());
  for (std::size_t i = 0; i < set.centers.size(); ++i) {
    CHECK(back.centers[i].id == set.centers[i].id);
    CHECK(back.centers[i].label == set.centers[i].label);
    CHECK(back.centers[i].member_count == set.centers[i].member_count);
    CHECK((back.centers[i].position - set.centers[i].position).norm() < 1e-9);
  }
}

TEST_CASE("centers.json errors") {
  const auto& table = ClassTable::indoor();
  auto code = [&](std::string_view text) {
    try {
      parse_centers_json(text, table);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoError;
  };
  CHECK(code("{not json") == ErrorCode::FormatError);
  CHECK(code(R"([{"id":0,"class":"dragon","pos":[0,0,0]}])") == ErrorCode::UnknownClass);
  CHECK(code(R"([{"id":0,"class":"chair","pos":[0,0,0]},{"id":0,"class":"bed","pos":[1,1,1]}])") ==
        ErrorCode::InvalidParameter);
}

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "voxcraft/build_plan.hpp"
#include "voxcraft/template_match.hpp"

using namespace voxcraft;

namespace {

void BM_CoalesceRoom(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  auto table = std::make_shared<const ClassTable>(ClassTable::indoor().names());
  std::vector<ClassId> labels(static_cast<std::size_t>(n) * n * n, kEmptyClass);
  auto g = SemanticGrid({0, 0, 0}, {n, n, n}, labels, table);
  for (std::uint32_t z = 0; z < n; ++z)
    for (std::uint32_t y = 0; y < n; ++y)
      for (std::uint32_t x = 0; x < n; ++x) {
        const bool shell = x == 0 || z == 0 || x == n - 1 || z == n - 1;
        if (y == 0) labels[g.index(x, y, z)] = 2;
        else if (y == n - 1) labels[g.index(x, y, z)] = 1;
        else if (shell) labels[g.index(x, y, z)] = (y % 4 == 2 && x % 5 == 2) ? 4 : 3;
      }
  g = g.with_labels(labels);
  const auto blocks = BlockTable::defaults(*table);
  const std::set<ClassId> classes = default_structural_classes(*table);
  for (auto _ : state) benchmark::DoNotOptimize(coalesce_cuboids(g, classes, blocks));
}
BENCHMARK(BM_CoalesceRoom)->Arg(32)->Arg(64);

void BM_BestMatch(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::bernoulli_distribution keep(0.5);
  TemplateLibrary lib;
  for (int t = 0; t < state.range(0); ++t) {
    std::vector<VoxelCoord> vs;
    for (int x = 0; x < 4; ++x)
      for (int y = 0; y < 3; ++y)
        for (int z = 0; z < 4; ++z)
          if (keep(rng)) vs.push_back({x, y, z});
    if (vs.empty()) vs.push_back({0, 0, 0});
    lib.templates.push_back(make_template("t" + std::to_string(t), 5, std::move(vs)));
  }
  const auto inst = rotate_template(lib.templates.back(), 90).voxels;
  for (auto _ : state) benchmark::DoNotOptimize(best_match(inst, lib, 5));
}
BENCHMARK(BM_BestMatch)->Arg(10)->Arg(100);

}  // namespace

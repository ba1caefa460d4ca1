// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "voxcraft/centers.hpp"

using namespace voxcraft;

namespace {

SemanticGrid noisy_grid(std::uint32_t n, double fill) {
  auto table = std::make_shared<const ClassTable>(ClassTable::indoor().names());
  std::mt19937_64 rng(1);
  std::bernoulli_distribution occupied(fill);
  std::uniform_int_distribution<ClassId> cls(1, 11);
  std::vector<ClassId> labels(static_cast<std::size_t>(n) * n * n, kEmptyClass);
  for (auto& l : labels)
    if (occupied(rng)) l = cls(rng);
  return SemanticGrid({0, 0, 0}, {n, n, n}, std::move(labels), table);
}

void BM_DensityMap(benchmark::State& state) {
  const auto g = noisy_grid(static_cast<std::uint32_t>(state.range(0)), 0.3);
  const auto b = binarize(g);
  for (auto _ : state) benchmark::DoNotOptimize(density_map(b, static_cast<int>(state.range(1))));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_DensityMap)->Args({32, 3})->Args({64, 3})->Args({64, 5});

void BM_Dbscan(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 40.0);
  std::vector<Eigen::Vector3d> pts(static_cast<std::size_t>(state.range(0)));
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(dbscan(pts, 2.0, 3));
}
BENCHMARK(BM_Dbscan)->Arg(1000)->Arg(10000);

void BM_ExtractCenters(benchmark::State& state) {
  const auto g = noisy_grid(48, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(extract_centers(g, CenterParams{}));
}
BENCHMARK(BM_ExtractCenters)->Unit(benchmark::kMillisecond);

}  // namespace

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "voxcraft/rcon.hpp"

using namespace voxcraft;

namespace {

void BM_EncodePacket(benchmark::State& state) {
  const rcon::Packet p{7, rcon::kTypeExec, "fill 0 64 0 15 64 15 minecraft:oak_planks"};
  for (auto _ : state) benchmark::DoNotOptimize(rcon::encode_packet(p));
}
BENCHMARK(BM_EncodePacket);

void BM_DecodePacket(benchmark::State& state) {
  const auto bytes =
      rcon::encode_packet({7, rcon::kTypeExec, "setblock 3 65 4 minecraft:oak_stairs[facing=east]"});
  for (auto _ : state) benchmark::DoNotOptimize(rcon::decode_packet(bytes));
}
BENCHMARK(BM_DecodePacket);

}  // namespace

// SPDX-FileCopyrightText: 2026 voxcraft contributors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

BENCHMARK_MAIN();

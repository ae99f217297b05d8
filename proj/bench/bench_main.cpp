// Copyright 2026 The brh Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Parallel kernels against their serial references.
#include <random>

#include <benchmark/benchmark.h>
#include <omp.h>

#include "brh/frontier.hpp"
#include "brh/hedge.hpp"
#include "brh/numeric.hpp"
#include "brh/selftest.hpp"

namespace brh {
namespace {

DiscreteProblem BenchProblem() {
  std::mt19937_64 rng(42);
  return RandomProblem(8, 8, rng);
}

SolveConfig BenchConfig() {
  SolveConfig c;
  c.tol = 1e-10;
  return c;
}

void BM_EffectiveLossGrid(benchmark::State& state) {
  const DiscreteProblem p = BenchProblem();
  const auto betas = GeometricGrid(0.1, 100.0, 64);
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(EffectiveLossGrid(Generator::PearsonChi2(), p, betas, betas, BenchConfig()));
  }
}
BENCHMARK(BM_EffectiveLossGrid)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EffectiveLossGridSerial(benchmark::State& state) {
  const DiscreteProblem p = BenchProblem();
  const auto betas = GeometricGrid(0.1, 100.0, 64);
  for (auto _ : state) {
    benchmark::DoNotOptimize(EffectiveLossGridSerial(Generator::PearsonChi2(), p, betas, betas, BenchConfig()));
  }
}
BENCHMARK(BM_EffectiveLossGridSerial)->Unit(benchmark::kMillisecond);

void BM_Trace(benchmark::State& state) {
  const DiscreteProblem p = BenchProblem();
  const auto betas = GeometricGrid(0.1, 100.0, 64);
  TraceConfig tc;
  tc.solve = BenchConfig();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Trace(Generator::SqHellinger(), p, betas, tc));
}
BENCHMARK(BM_Trace)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TraceSerial(benchmark::State& state) {
  const DiscreteProblem p = BenchProblem();
  const auto betas = GeometricGrid(0.1, 100.0, 64);
  TraceConfig tc;
  tc.solve = BenchConfig();
  for (auto _ : state) benchmark::DoNotOptimize(TraceSerial(Generator::SqHellinger(), p, betas, tc));
}
BENCHMARK(BM_TraceSerial)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace brh

BENCHMARK_MAIN();

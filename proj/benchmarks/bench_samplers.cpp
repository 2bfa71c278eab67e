// Copyright 2026 The qbmrl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "qbmrl/boltzmann.hpp"
#include "qbmrl/rng.hpp"
#include "qbmrl/samplers.hpp"

namespace {

using namespace qbmrl;

ClampedModel clamped_dbm(std::uint64_t seed) {
  Rng rng(seed);
  auto bm = BoltzmannMachine::dbm(14, 5, {8, 8});
  bm.randomize(rng);
  return clamp(bm, VisibleAssignment::one_hot(14, 5, 3, 1));
}

void BM_SaSample(benchmark::State& state) {
  const auto model = clamped_dbm(1).ising;
  SaSchedule schedule;
  schedule.n_sweeps = static_cast<std::size_t>(state.range(0));
  schedule.n_reads = static_cast<std::size_t>(state.range(1));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sa_sample(model, schedule, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) * 16);
}
BENCHMARK(BM_SaSample)->Args({500, 150})->Args({1000, 150})->Unit(benchmark::kMillisecond);

void BM_SqaSample(benchmark::State& state) {
  const auto model = clamped_dbm(2).ising;
  SqaSchedule schedule;
  schedule.n_sweeps = static_cast<std::size_t>(state.range(0));
  schedule.n_reads = static_cast<std::size_t>(state.range(1));
  schedule.n_replicas = static_cast<std::size_t>(state.range(2));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sqa_sample(model, schedule, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1) *
                          state.range(2) * 16);
}
BENCHMARK(BM_SqaSample)
    ->Args({300, 150, 25})
    ->Args({100, 50, 25})
    ->Args({50, 30, 25})
    ->Unit(benchmark::kMillisecond);

void BM_RbmFreeEnergy(benchmark::State& state) {
  Rng rng(3);
  auto bm = BoltzmannMachine::rbm(14, 5, 16);
  bm.randomize(rng);
  const auto v = VisibleAssignment::one_hot(14, 5, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rbm_free_energy(bm, v));
}
BENCHMARK(BM_RbmFreeEnergy);

}  // namespace

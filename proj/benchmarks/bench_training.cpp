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

#include "qbmrl/maze.hpp"
#include "qbmrl/rng.hpp"
#include "qbmrl/training.hpp"

namespace {

using namespace qbmrl;

void BM_QValue(benchmark::State& state) {
  const auto maze = parse_maze("R....\n..W..\n..P..\n");
  auto config = TrainingConfig::defaults(static_cast<Algorithm>(state.range(0)));
  config.sa.n_sweeps = 500;
  config.sqa.n_sweeps = 100;
  config.sqa.n_reads = 50;
  Rng rng(4);
  auto bm = make_machine(config, maze.n_states(), kNumActions);
  bm.randomize(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(q_value(bm, maze, 5, Action::kDown, config, rng));
  }
}
BENCHMARK(BM_QValue)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

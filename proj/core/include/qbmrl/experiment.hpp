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

#ifndef QBMRL_EXPERIMENT_HPP
#define QBMRL_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qbmrl/maze.hpp"
#include "qbmrl/training.hpp"

namespace qbmrl {

inline constexpr std::size_t kDeskRuns = 40;
inline constexpr std::size_t kFullRuns = 1440;

struct ExperimentSpec {
  std::string maze_text;
  /// Recorded in the manifest only.
  std::string maze_path;
  TransitionKernel kernel = TransitionKernel::clear();
  /// One configuration per algorithm; tags must be distinct.
  std::vector<TrainingConfig> algorithms;
  std::size_t n_runs = kDeskRuns;
  std::size_t n_samples = 500;
  std::uint64_t base_seed = 0;
  std::filesystem::path output_dir;
  std::vector<std::size_t> windows = {500, 250, 10};
  /// 0 picks QBMRL_WORKERS, falling back to the hardware concurrency.
  std::size_t n_workers = 0;
  /// Every run reuses base_seed. Only useful for determinism checks.
  bool same_seed_every_run = false;

  void validate() const;
};

/// Seed of run `run`: base_seed XOR splitmix64(run).
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run);

/// Fraction of free states whose recorded action is optimal, per snapshot.
std::vector<double> run_fidelity(const PolicyTrace& trace,
                                 const OptimalPolicySet& oracle);

/// Index i holds fid(i); index 0 is the untrained policy.
struct FidelityTrace {
  std::vector<double> mean;
  std::vector<double> std;  // sample std across runs, 0 for a single run
  std::vector<std::vector<double>> per_run;

  std::size_t n_samples() const { return mean.empty() ? 0 : mean.size() - 1; }
  std::size_t n_runs() const { return per_run.size(); }
};

FidelityTrace fidelity(std::span<const PolicyTrace> traces,
                       const OptimalPolicySet& oracle);

/// Mean of fid(i) for i = T_s - ell .. T_s inclusive.
double average_fidelity(const FidelityTrace& trace, std::size_t ell);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Fidelity of uniformly random policies estimated from `draws` samples.
MonteCarloEstimate monte_carlo_random_fidelity(const Maze& maze,
                                               const OptimalPolicySet& oracle,
                                               std::size_t draws,
                                               std::uint64_t seed);

/// QBMRL_WORKERS if set and positive, otherwise the hardware concurrency.
std::size_t default_worker_count();

/// T_r independent training runs merged in run order.
std::vector<PolicyTrace> run_training(const Maze& maze,
                                      const TransitionKernel& kernel,
                                      const TrainingConfig& config,
                                      std::size_t n_runs,
                                      std::uint64_t base_seed,
                                      std::size_t n_workers,
                                      bool same_seed_every_run = false);

/// Header `sample,mean_fid,std_fid` then rows i = 1..T_s.
void write_fidelity_csv(std::ostream& out, const FidelityTrace& trace);

/// %.17g, so every double round-trips.
std::string format_double(double x);

struct AlgorithmResult {
  std::string tag;
  FidelityTrace trace;
  std::vector<std::pair<std::size_t, double>> averages;  // (ell, av_ell)
  std::filesystem::path csv_path;
};

struct ExperimentResult {
  OptimalPolicySet oracle;
  double random_baseline = 0.0;
  std::vector<AlgorithmResult> algorithms;
  std::filesystem::path summary_path;
  std::filesystem::path manifest_path;
};

/// Writes fidelity_<tag>.csv per algorithm, average_fidelity.csv and
/// manifest.json into output_dir. A failing run leaves a manifest with
/// "complete": false and rethrows.
ExperimentResult run_experiment(const ExperimentSpec& spec);

std::string version_string();

}  // namespace qbmrl

#endif  // QBMRL_EXPERIMENT_HPP

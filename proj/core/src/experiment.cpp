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

#include "qbmrl/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "qbmrl/error.hpp"
#include "qbmrl/rng.hpp"

#ifndef QBMRL_VERSION
#define QBMRL_VERSION "0.0.0"
#endif

namespace qbmrl {

namespace {

using nlohmann::json;

json schedule_json(const TrainingConfig& c) {
  json j;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["hidden_layers"] = c.hidden_layers;
  j["n_samples"] = c.n_samples;
  j["strategy"] = std::string(to_string(c.strategy));
  j["policy_refresh"] =
      c.policy_refresh == PolicyRefresh::kVisitedState ? "visited-state" : "full";
  j["weight_stddev"] = c.weight_stddev;
  j["rate"] = {{"initial", c.rate.initial_rate},
               {"delta", c.rate.delta},
               {"max_factor", c.rate.max_factor}};
  if (c.algorithm == Algorithm::kDbmRlSa) {
    j["sa"] = {{"beta_initial", c.sa.beta_initial},
               {"beta_final", c.sa.beta_final},
               {"sweeps", c.sa.n_sweeps},
               {"reads", c.sa.n_reads}};
  } else if (c.algorithm != Algorithm::kRbmRl) {
    j["sqa"] = {{"gamma_initial", c.sqa.gamma_initial},
                {"gamma_final", c.sqa.gamma_final},
                {"beta", c.sqa.beta},
                {"replicas", c.sqa.n_replicas},
                {"sweeps", c.sqa.n_sweeps},
                {"reads", c.sqa.n_reads}};
  }
  return j;
}

void write_manifest(const std::filesystem::path& path, const ExperimentSpec& spec,
                    bool complete, const std::string& failure) {
  json j;
  j["version"] = version_string();
  j["complete"] = complete;
  if (!failure.empty()) j["failure"] = failure;
  j["maze_path"] = spec.maze_path;
  j["maze"] = spec.maze_text;
  j["kernel"] = std::string(to_string(spec.kernel.kind));
  j["p_intended"] = spec.kernel.p_intended;
  j["runs"] = spec.n_runs;
  j["samples"] = spec.n_samples;
  j["base_seed"] = spec.base_seed;
  j["same_seed_every_run"] = spec.same_seed_every_run;
  j["windows"] = spec.windows;
  std::vector<std::uint64_t> seeds;
  for (std::size_t r = 0; r < spec.n_runs; ++r) {
    seeds.push_back(spec.same_seed_every_run ? spec.base_seed
                                             : run_seed(spec.base_seed, r));
  }
  j["run_seeds"] = seeds;
  json algos = json::array();
  for (const auto& c : spec.algorithms) {
    auto a = schedule_json(c);
    a["n_samples"] = spec.n_samples;
    algos.push_back(std::move(a));
  }
  j["algorithms"] = std::move(algos);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string version_string() { return QBMRL_VERSION; }

void ExperimentSpec::validate() const {
  if (n_runs == 0) throw ParameterError("at least one run is required");
  if (algorithms.empty()) throw ParameterError("no algorithm selected");
  std::set<std::string_view> tags;
  for (const auto& c : algorithms) {
    if (!tags.insert(to_string(c.algorithm)).second) {
      throw ParameterError("duplicate algorithm " +
                           std::string(to_string(c.algorithm)));
    }
    c.validate();
  }
  for (auto ell : windows) {
    if (ell > n_samples) {
      throw ParameterError("window " + std::to_string(ell) +
                           " exceeds the number of samples");
    }
  }
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t run) {
  return base_seed ^ splitmix64(run);
}

std::vector<double> run_fidelity(const PolicyTrace& trace,
                                 const OptimalPolicySet& oracle) {
  const std::size_t n = oracle.optimal.size();
  std::vector<double> out;
  out.reserve(trace.snapshots.size());
  for (const auto& policy : trace.snapshots) {
    if (policy.size() != n) {
      throw DimensionError("policy has " + std::to_string(policy.size()) +
                           " states, oracle has " + std::to_string(n));
    }
    std::size_t hits = 0;
    for (std::size_t s = 0; s < n; ++s) hits += oracle.is_optimal(s, policy[s]);
    out.push_back(static_cast<double>(hits) / static_cast<double>(n));
  }
  return out;
}

FidelityTrace fidelity(std::span<const PolicyTrace> traces,
                       const OptimalPolicySet& oracle) {
  if (traces.empty()) throw ParameterError("no traces to aggregate");
  FidelityTrace out;
  for (const auto& t : traces) {
    out.per_run.push_back(run_fidelity(t, oracle));
    if (out.per_run.back().size() != out.per_run.front().size()) {
      throw DimensionError("traces differ in length");
    }
  }
  const std::size_t len = out.per_run.front().size();
  const double runs = static_cast<double>(out.per_run.size());
  out.mean.assign(len, 0.0);
  out.std.assign(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& r : out.per_run) sum += r[i];
    const double mean = sum / runs;
    double ss = 0.0;
    for (const auto& r : out.per_run) ss += (r[i] - mean) * (r[i] - mean);
    out.mean[i] = mean;
    out.std[i] = out.per_run.size() > 1 ? std::sqrt(ss / (runs - 1.0)) : 0.0;
  }
  return out;
}

double average_fidelity(const FidelityTrace& trace, std::size_t ell) {
  const std::size_t ts = trace.n_samples();
  if (trace.mean.empty()) throw ParameterError("empty fidelity trace");
  if (ell > ts) {
    throw ParameterError("window " + std::to_string(ell) + " exceeds T_s = " +
                         std::to_string(ts));
  }
  double sum = 0.0;
  for (std::size_t i = ts - ell; i <= ts; ++i) sum += trace.mean[i];
  return sum / static_cast<double>(ell + 1);
}

MonteCarloEstimate monte_carlo_random_fidelity(const Maze& maze,
                                               const OptimalPolicySet& oracle,
                                               std::size_t draws,
                                               std::uint64_t seed) {
  if (draws < 2) throw ParameterError("need at least two draws");
  Rng rng(seed);
  std::vector<std::vector<Action>> adm(maze.n_states());
  for (std::size_t s = 0; s < maze.n_states(); ++s) adm[s] = admissible_actions(maze, s);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t d = 0; d < draws; ++d) {
    std::size_t hits = 0;
    for (std::size_t s = 0; s < maze.n_states(); ++s) {
      hits += oracle.is_optimal(s, adm[s][rng.below(adm[s].size())]);
    }
    const double f = static_cast<double>(hits) / static_cast<double>(maze.n_states());
    sum += f;
    sum_sq += f * f;
  }
  const double n = static_cast<double>(draws);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

std::size_t default_worker_count() {
  if (const char* env = std::getenv("QBMRL_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<PolicyTrace> run_training(const Maze& maze,
                                      const TransitionKernel& kernel,
                                      const TrainingConfig& config,
                                      std::size_t n_runs,
                                      std::uint64_t base_seed,
                                      std::size_t n_workers,
                                      bool same_seed_every_run) {
  config.validate();
  std::vector<PolicyTrace> traces(n_runs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t run = next.fetch_add(1);
      if (run >= n_runs) return;
      {
        std::lock_guard lock(failure_mutex);
        if (failure) return;
      }
      try {
        const auto seed = same_seed_every_run ? base_seed : run_seed(base_seed, run);
        traces[run] = train(maze, kernel, config, seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const std::size_t workers =
      std::min(std::max<std::size_t>(1, n_workers == 0 ? default_worker_count() : n_workers),
               std::max<std::size_t>(1, n_runs));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_fidelity_csv(std::ostream& out, const FidelityTrace& trace) {
  out << "sample,mean_fid,std_fid\n";
  for (std::size_t i = 1; i < trace.mean.size(); ++i) {
    out << i << ',' << format_double(trace.mean[i]) << ','
        << format_double(trace.std[i]) << '\n';
  }
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Maze maze = parse_maze(spec.maze_text);
  std::filesystem::create_directories(spec.output_dir);

  ExperimentResult result;
  result.oracle = value_iteration(maze, spec.kernel);
  result.random_baseline = random_policy_fidelity(maze, result.oracle);
  result.manifest_path = spec.output_dir / "manifest.json";
  result.summary_path = spec.output_dir / "average_fidelity.csv";

  try {
    for (auto config : spec.algorithms) {
      config.n_samples = spec.n_samples;
      AlgorithmResult ar;
      ar.tag = std::string(to_string(config.algorithm));
      const auto traces = run_training(maze, spec.kernel, config, spec.n_runs,
                                       spec.base_seed, spec.n_workers,
                                       spec.same_seed_every_run);
      ar.trace = fidelity(traces, result.oracle);
      for (auto ell : spec.windows) {
        ar.averages.emplace_back(ell, average_fidelity(ar.trace, ell));
      }
      ar.csv_path = spec.output_dir / ("fidelity_" + ar.tag + ".csv");
      auto csv = open_output(ar.csv_path);
      write_fidelity_csv(csv, ar.trace);
      result.algorithms.push_back(std::move(ar));
    }

    auto summary = open_output(result.summary_path);
    summary << "algorithm,ell,av_ell\n";
    for (const auto& ar : result.algorithms) {
      for (const auto& [ell, av] : ar.averages) {
        summary << ar.tag << ',' << ell << ',' << format_double(av) << '\n';
      }
    }
    for (auto ell : spec.windows) {
      summary << "random," << ell << ',' << format_double(result.random_baseline)
              << '\n';
    }
  } catch (const std::exception& e) {
    write_manifest(result.manifest_path, spec, false, e.what());
    throw;
  }
  write_manifest(result.manifest_path, spec, true, "");
  return result;
}

}  // namespace qbmrl

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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qbmrl/error.hpp"
#include "qbmrl/experiment.hpp"
#include "qbmrl/maze.hpp"
#include "qbmrl/training.hpp"

namespace {

using namespace qbmrl;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TransitionKernel kernel_from(const std::string& tag) {
  return tag == "windy" ? TransitionKernel::windy() : TransitionKernel::clear();
}

std::string join_actions(const std::vector<Action>& actions) {
  std::string out;
  for (auto a : actions) {
    if (!out.empty()) out += '|';
    out += to_string(a);
  }
  return out;
}

struct TrainArgs {
  std::string maze;
  std::string kernel = "clear";
  std::vector<std::string> algos = {"rbm", "dbm-sa", "dbm-sqa", "qbm"};
  std::size_t runs = 0;
  std::size_t samples = 500;
  std::string strategy = "sweep";
  std::uint64_t seed = 0;
  std::string out = "results";
  bool full = false;
  std::vector<std::size_t> hidden;
  std::vector<std::size_t> windows = {500, 250, 10};
  std::size_t workers = 0;
  std::size_t sa_reads = 0, sa_sweeps = 0;
  std::size_t sqa_reads = 0, sqa_sweeps = 0, replicas = 0;
  std::string refresh = "visited";
  double rate = 0.0;
  double init_std = -1.0;
};

int run_train(const TrainArgs& args) {
  ExperimentSpec spec;
  spec.maze_path = args.maze;
  spec.maze_text = read_file(args.maze);
  spec.kernel = kernel_from(args.kernel);
  spec.n_runs = args.runs != 0 ? args.runs : (args.full ? kFullRuns : kDeskRuns);
  spec.n_samples = args.samples;
  spec.base_seed = args.seed;
  spec.output_dir = args.out;
  spec.n_workers = args.workers;
  spec.windows.clear();
  for (auto ell : args.windows) {
    if (ell <= args.samples) spec.windows.push_back(ell);
  }

  const auto strategy = strategy_from_string(args.strategy);
  for (const auto& tag : args.algos) {
    const auto algo = algorithm_from_string(tag);
    if (!algo) throw UsageError("unknown algorithm " + tag);
    auto config = args.full ? TrainingConfig::defaults(*algo)
                            : TrainingConfig::desk_scale(*algo);
    config.strategy = *strategy;
    if (!args.hidden.empty()) {
      config.hidden_layers = args.hidden;
      if (*algo == Algorithm::kRbmRl && args.hidden.size() > 1) {
        std::size_t m = 0;
        for (auto h : args.hidden) m += h;
        config.hidden_layers = {m};
      }
    }
    if (args.sa_reads) config.sa.n_reads = args.sa_reads;
    if (args.sa_sweeps) config.sa.n_sweeps = args.sa_sweeps;
    if (args.sqa_reads) config.sqa.n_reads = args.sqa_reads;
    if (args.sqa_sweeps) config.sqa.n_sweeps = args.sqa_sweeps;
    if (args.replicas) config.sqa.n_replicas = args.replicas;
    if (args.rate > 0.0) config.rate.initial_rate = args.rate;
    if (args.init_std >= 0.0) config.weight_stddev = args.init_std;
    config.policy_refresh = args.refresh == "full" ? PolicyRefresh::kFullSnapshot
                                                   : PolicyRefresh::kVisitedState;
    spec.algorithms.push_back(config);
  }

  const auto result = run_experiment(spec);
  for (const auto& ar : result.algorithms) {
    std::cout << ar.tag;
    for (const auto& [ell, av] : ar.averages) {
      std::cout << "  av_" << ell << '=' << format_double(av);
    }
    std::cout << "  -> " << ar.csv_path.string() << '\n';
  }
  std::cout << "random  baseline=" << format_double(result.random_baseline) << '\n';
  std::cout << "manifest: " << result.manifest_path.string() << '\n';
  return 0;
}

int run_oracle(const std::string& maze_path, const std::string& kernel,
               const std::string& out_path) {
  const auto maze = parse_maze(read_file(maze_path));
  const auto oracle = value_iteration(maze, kernel_from(kernel));
  std::ostringstream table;
  table << "row,col,value,optimal\n";
  for (std::size_t s = 0; s < maze.n_states(); ++s) {
    const auto p = maze.position(s);
    table << p.row << ',' << p.col << ',' << format_double(oracle.value[s]) << ','
          << join_actions(oracle.optimal[s]) << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << table.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement learning with Boltzmann-machine Q-functions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", qbmrl::version_string());

  TrainArgs t;
  auto* train = app.add_subcommand("train", "Run T_r training runs per algorithm");
  train->add_option("--maze", t.maze, "Maze file")->required()->check(CLI::ExistingFile);
  train->add_option("--kernel", t.kernel)->check(CLI::IsMember({"clear", "windy"}));
  train->add_option("--algo", t.algos, "rbm, dbm-sa, dbm-sqa, qbm")
      ->delimiter(',')
      ->check(CLI::IsMember({"rbm", "dbm-sa", "dbm-sqa", "qbm"}));
  train->add_option("--runs", t.runs, "T_r (default 40, 1440 with --full)");
  train->add_option("--samples", t.samples, "T_s")->check(CLI::PositiveNumber);
  train->add_option("--strategy", t.strategy)
      ->check(CLI::IsMember({"sweep", "sweep-sas", "uniform"}));
  train->add_option("--seed", t.seed);
  train->add_option("--out", t.out, "Output directory");
  train->add_flag("--full", t.full, "Full-scale runs and sampler budgets");
  train->add_option("--hidden", t.hidden, "Hidden layer sizes, e.g. 8,8")
      ->delimiter(',');
  train->add_option("--windows", t.windows, "av_ell windows")->delimiter(',');
  train->add_option("--workers", t.workers, "Overrides QBMRL_WORKERS");
  train->add_option("--sa-reads", t.sa_reads);
  train->add_option("--sa-sweeps", t.sa_sweeps);
  train->add_option("--sqa-reads", t.sqa_reads);
  train->add_option("--sqa-sweeps", t.sqa_sweeps);
  train->add_option("--replicas", t.replicas);
  train->add_option("--rate", t.rate, "Initial adaptive learning rate");
  train->add_option("--init-std", t.init_std, "Std of the initial weights");
  train->add_option("--refresh", t.refresh, "Policy refresh after each update")
      ->check(CLI::IsMember({"visited", "full"}));

  std::string o_maze, o_kernel = "clear", o_out = "-";
  auto* oracle = app.add_subcommand("oracle", "Optimal-action table by value iteration");
  oracle->add_option("--maze", o_maze)->required()->check(CLI::ExistingFile);
  oracle->add_option("--kernel", o_kernel)->check(CLI::IsMember({"clear", "windy"}));
  oracle->add_option("--out", o_out, "Output CSV ('-' for stdout)");

  std::string b_maze, b_kernel = "clear";
  auto* baseline = app.add_subcommand("baseline", "Random-policy fidelity");
  baseline->add_option("--maze", b_maze)->required()->check(CLI::ExistingFile);
  baseline->add_option("--kernel", b_kernel)->check(CLI::IsMember({"clear", "windy"}));

  std::string g_family = "nx5";
  std::size_t g_n = 3;
  auto* generate = app.add_subcommand("generate-maze", "Print a maze of a family");
  generate->add_option("--family", g_family)->check(CLI::IsMember({"nx5"}));
  generate->add_option("--n", g_n)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(t);
    if (*oracle) return run_oracle(o_maze, o_kernel, o_out);
    if (*baseline) {
      const auto maze = parse_maze(read_file(b_maze));
      const auto opt = value_iteration(maze, kernel_from(b_kernel));
      std::cout << format_double(random_policy_fidelity(maze, opt)) << '\n';
      return 0;
    }
    if (*generate) {
      std::cout << nx5_maze(g_n).to_text();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

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

#include "qbmrl/training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbmrl/error.hpp"
#include "qbmrl/rng.hpp"

namespace qbmrl {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kRbmRl:
      return "rbm";
    case Algorithm::kDbmRlSa:
      return "dbm-sa";
    case Algorithm::kDbmRlSqa:
      return "dbm-sqa";
    case Algorithm::kQbmRl:
      return "qbm";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(std::string_view tag) {
  for (auto a : {Algorithm::kRbmRl, Algorithm::kDbmRlSa, Algorithm::kDbmRlSqa,
                 Algorithm::kQbmRl}) {
    if (to_string(a) == tag) return a;
  }
  return std::nullopt;
}

std::string_view to_string(SampleStrategy strategy) {
  switch (strategy) {
    case SampleStrategy::kSweepSA:
      return "sweep";
    case SampleStrategy::kSweepSAS:
      return "sweep-sas";
    case SampleStrategy::kUniform:
      return "uniform";
  }
  return "?";
}

std::optional<SampleStrategy> strategy_from_string(std::string_view tag) {
  for (auto s : {SampleStrategy::kSweepSA, SampleStrategy::kSweepSAS,
                 SampleStrategy::kUniform}) {
    if (to_string(s) == tag) return s;
  }
  return std::nullopt;
}

AdaptiveRate::AdaptiveRate(std::size_t n_weights, AdaptiveRateConfig config)
    : config_(config), accum_(n_weights, 0.0) {
  if (!(config.initial_rate >= 0.0) || !(config.delta > 0.0) ||
      !(config.max_factor > 0.0)) {
    throw ParameterError("adaptive rate needs eps0 >= 0, delta > 0, cap > 0");
  }
}

double AdaptiveRate::rate(std::size_t weight) const {
  const double eps = config_.initial_rate / std::sqrt(accum_.at(weight) + config_.delta);
  return std::min(eps, config_.initial_rate * config_.max_factor);
}

double AdaptiveRate::observe(std::size_t weight, double gradient) {
  accum_.at(weight) += gradient * gradient;
  return rate(weight);
}

TrainingConfig TrainingConfig::defaults(Algorithm algorithm) {
  TrainingConfig c;
  c.algorithm = algorithm;
  if (algorithm == Algorithm::kRbmRl) {
    c.hidden_layers = {16};
  } else {
    c.hidden_layers = {8, 8};
  }
  c.sqa.gamma_final = algorithm == Algorithm::kQbmRl ? 2.00 : 0.01;
  return c;
}

TrainingConfig TrainingConfig::desk_scale(Algorithm algorithm) {
  auto c = defaults(algorithm);
  c.sa.n_reads = 100;
  c.sa.n_sweeps = 200;
  c.sqa.n_reads = 20;
  c.sqa.n_sweeps = 40;
  return c;
}

std::size_t TrainingConfig::n_hidden() const {
  std::size_t m = 0;
  for (auto h : hidden_layers) m += h;
  return m;
}

void TrainingConfig::validate() const {
  if (hidden_layers.empty() ||
      std::any_of(hidden_layers.begin(), hidden_layers.end(),
                  [](std::size_t h) { return h == 0; })) {
    throw ParameterError("hidden layer sizes must be positive");
  }
  if (algorithm == Algorithm::kRbmRl && hidden_layers.size() != 1) {
    throw ParameterError("RBM-RL uses a single hidden layer");
  }
  if (!(rate.initial_rate > 0.0)) throw ParameterError("initial rate must be positive");
  if (!(weight_stddev >= 0.0)) throw ParameterError("weight stddev must be >= 0");
  switch (algorithm) {
    case Algorithm::kDbmRlSa:
      sa.validate();
      break;
    case Algorithm::kDbmRlSqa:
    case Algorithm::kQbmRl:
      sqa.validate();
      break;
    case Algorithm::kRbmRl:
      break;
  }
}

BoltzmannMachine make_machine(const TrainingConfig& config, std::size_t n_states,
                              std::size_t n_actions) {
  if (config.algorithm == Algorithm::kRbmRl) {
    return BoltzmannMachine::rbm(n_states, n_actions, config.hidden_layers.front());
  }
  return BoltzmannMachine::dbm(n_states, n_actions, config.hidden_layers);
}

QEvaluation q_value(const BoltzmannMachine& bm, const Maze& maze,
                    std::size_t state, Action a, const TrainingConfig& config,
                    Rng& rng) {
  if (!is_admissible(maze, state, a)) {
    throw UsageError("q_value: action " + std::string(to_string(a)) +
                     " is inadmissible at state " + std::to_string(state));
  }
  const auto v = VisibleAssignment::one_hot(bm.n_states(), bm.n_actions(), state,
                                            static_cast<std::size_t>(a));
  QEvaluation out;
  switch (config.algorithm) {
    case Algorithm::kRbmRl: {
      out.q = -rbm_free_energy(bm, v).value;
      out.expectations.n_hidden = bm.n_hidden();
      out.expectations.mean = rbm_hidden_activations(bm, v);
      return out;
    }
    case Algorithm::kDbmRlSa: {
      const auto clamped = clamp(bm, v);
      const auto samples = sa_sample(clamped.ising, config.sa, rng.next_seed());
      out.q = -classical_free_energy(bm, v, samples, config.sa.beta_final).value;
      out.expectations = to_binary_expectations(slice_expectations(samples));
      out.sample_count = samples.size();
      return out;
    }
    case Algorithm::kDbmRlSqa: {
      const auto clamped = clamp(bm, v);
      const auto samples = sqa_sample(clamped.ising, config.sqa, rng.next_seed());
      out.q = -classical_free_energy(bm, v, samples, config.sqa.beta).value;
      out.expectations = to_binary_expectations(slice_expectations(samples));
      out.sample_count = samples.size() * samples.n_slices;
      return out;
    }
    case Algorithm::kQbmRl: {
      const auto clamped = clamp(bm, v);
      const auto samples = sqa_sample(clamped.ising, config.sqa, rng.next_seed());
      QuantumFreeEnergyOptions options;
      options.energy_offset = clamped.offset;
      out.q = -quantum_free_energy(samples, config.sqa.beta, options).value;
      out.expectations = to_binary_expectations(slice_expectations(samples));
      out.sample_count = samples.size();
      return out;
    }
  }
  throw UsageError("unknown algorithm");
}

GreedyChoice greedy_action(const BoltzmannMachine& bm, const Maze& maze,
                           std::size_t state, const TrainingConfig& config,
                           Rng& rng) {
  GreedyChoice best;
  bool first = true;
  for (auto a : admissible_actions(maze, state)) {
    const double q = q_value(bm, maze, state, a, config, rng).q;
    if (first || q > best.q) {
      best = GreedyChoice{a, q};
      first = false;
    }
  }
  return best;
}

double td_update(BoltzmannMachine& bm, AdaptiveRate& rate,
                 const Transition& transition, const QEvaluation& q1,
                 double q2, double discount) {
  const double td = transition.reward + discount * q2 - q1.q;
  const auto& ex = q1.expectations;
  if (ex.mean.size() != bm.n_hidden()) {
    throw DimensionError("expectations do not match the machine");
  }
  auto update_visible = [&](std::size_t node) {
    for (const auto& link : bm.links_of_visible(node)) {
      const double g = td * ex.mean[link.hidden];
      bm.add_to_weight(link.edge, rate.observe(link.edge, g) * g);
    }
  };
  update_visible(bm.state_node(transition.s1));
  update_visible(bm.action_node(static_cast<std::size_t>(transition.a1)));
  if (!bm.hidden_pairs().empty()) {
    if (ex.pair.size() != bm.n_hidden() * bm.n_hidden()) {
      throw DimensionError("pair expectations missing for hidden-hidden weights");
    }
    for (const auto& p : bm.hidden_pairs()) {
      const double g = td * ex.pair_mean(p.first, p.second);
      bm.add_to_weight(p.edge, rate.observe(p.edge, g) * g);
    }
  }
  return td;
}

std::vector<TrainingSample> generate_samples(const Maze& maze,
                                             const TransitionKernel& kernel,
                                             SampleStrategy strategy,
                                             std::size_t n, Rng& rng) {
  if (n == 0) throw UsageError("number of training samples must be positive");
  std::vector<TrainingSample> pairs;
  for (std::size_t s = 0; s < maze.n_states(); ++s) {
    for (auto a : admissible_actions(maze, s)) pairs.push_back({s, a, std::nullopt});
  }

  std::vector<TrainingSample> out;
  out.reserve(n);
  switch (strategy) {
    case SampleStrategy::kSweepSA:
      for (std::size_t i = 0; i < n; ++i) out.push_back(pairs[i % pairs.size()]);
      break;
    case SampleStrategy::kSweepSAS: {
      if (kernel.kind != KernelKind::kWindy) {
        throw UsageError("the (s, a, s') sweep needs a windy kernel");
      }
      std::vector<TrainingSample> triples;
      for (const auto& p : pairs) {
        for (const auto& [t, prob] : transition_distribution(maze, kernel, p.s1, p.a1)) {
          if (prob > 0.0) triples.push_back({p.s1, p.a1, t});
        }
      }
      for (std::size_t i = 0; i < n; ++i) out.push_back(triples[i % triples.size()]);
      break;
    }
    case SampleStrategy::kUniform:
      for (std::size_t i = 0; i < n; ++i) out.push_back(pairs[rng.below(pairs.size())]);
      break;
  }
  return out;
}

PolicyTrace train(const Maze& maze, const TransitionKernel& kernel,
                  const TrainingConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  auto bm = make_machine(config, maze.n_states(), kNumActions);
  bm.randomize(rng, config.weight_stddev);
  AdaptiveRate rate(bm.n_weights(), config.rate);

  std::vector<Action> policy(maze.n_states());
  auto refresh_all = [&] {
    for (std::size_t s = 0; s < maze.n_states(); ++s) {
      policy[s] = greedy_action(bm, maze, s, config, rng).action;
    }
  };
  refresh_all();

  PolicyTrace trace;
  trace.snapshots.reserve(config.n_samples + 1);
  trace.snapshots.push_back(policy);
  if (config.n_samples == 0) return trace;

  const auto samples =
      generate_samples(maze, kernel, config.strategy, config.n_samples, rng);
  trace.td_errors.reserve(samples.size());
  for (const auto& sample : samples) {
    Transition t;
    t.s1 = sample.s1;
    t.a1 = sample.a1;
    if (sample.s2) {
      t.s2 = *sample.s2;
      t.reward = maze.sample_reward(t.s2, rng);
    } else {
      const auto next = step(maze, kernel, t.s1, t.a1, rng);
      t.s2 = next.next_state;
      t.reward = next.reward;
    }
    t.a2 = greedy_action(bm, maze, t.s2, config, rng).action;

    const auto q1 = q_value(bm, maze, t.s1, t.a1, config, rng);
    const double q2 = q_value(bm, maze, t.s2, t.a2, config, rng).q;
    trace.td_errors.push_back(td_update(bm, rate, t, q1, q2, maze.discount()));

    if (config.policy_refresh == PolicyRefresh::kFullSnapshot) {
      refresh_all();
    } else {
      policy[t.s1] = greedy_action(bm, maze, t.s1, config, rng).action;
    }
    trace.snapshots.push_back(policy);
  }
  return trace;
}

}  // namespace qbmrl

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

#ifndef QBMRL_TRAINING_HPP
#define QBMRL_TRAINING_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qbmrl/boltzmann.hpp"
#include "qbmrl/maze.hpp"
#include "qbmrl/samplers.hpp"

namespace qbmrl {

class Rng;

enum class Algorithm { kRbmRl, kDbmRlSa, kDbmRlSqa, kQbmRl };

/// CLI tags: rbm, dbm-sa, dbm-sqa, qbm.
std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> algorithm_from_string(std::string_view tag);

enum class SampleStrategy { kSweepSA, kSweepSAS, kUniform };

/// CLI tags: sweep, sweep-sas, uniform.
std::string_view to_string(SampleStrategy strategy);
std::optional<SampleStrategy> strategy_from_string(std::string_view tag);

/// Which greedy actions are recomputed after each update. kVisitedState only
/// refreshes the policy at the sample's s1; kFullSnapshot re-evaluates every
/// state.
enum class PolicyRefresh { kVisitedState, kFullSnapshot };

/// Per-weight adaptive step size: G_w += g^2, eps_w = eps0 / sqrt(G_w + delta),
/// capped at eps0 * max_factor.
struct AdaptiveRateConfig {
  double initial_rate = 0.01;
  double delta = 1e-8;
  double max_factor = 100.0;
};

class AdaptiveRate {
 public:
  AdaptiveRate(std::size_t n_weights, AdaptiveRateConfig config = {});

  /// Folds g into the accumulator of `weight` and returns the step size to
  /// apply to this gradient.
  double observe(std::size_t weight, double gradient);
  /// Step size implied by the current history, without updating it.
  double rate(std::size_t weight) const;
  double accumulator(std::size_t weight) const { return accum_.at(weight); }
  const AdaptiveRateConfig& config() const { return config_; }

 private:
  AdaptiveRateConfig config_;
  std::vector<double> accum_;
};

struct TrainingConfig {
  Algorithm algorithm = Algorithm::kRbmRl;
  /// One entry for an RBM; two or more for a DBM.
  std::vector<std::size_t> hidden_layers = {16};
  std::size_t n_samples = 500;
  SampleStrategy strategy = SampleStrategy::kSweepSA;
  AdaptiveRateConfig rate;
  SaSchedule sa;
  SqaSchedule sqa;
  double weight_stddev = 1.0;
  PolicyRefresh policy_refresh = PolicyRefresh::kVisitedState;

  /// RBM: 16 hidden; DBM/QBM: 8 + 8. SQA ends at 0.01 for DBM-RL and at 2.00
  /// for QBM-RL.
  static TrainingConfig defaults(Algorithm algorithm);
  /// defaults() with sampler budgets cut to what a single core can run
  /// T_r = 40 times in about an hour: SA 100 reads x 200 sweeps, SQA 20
  /// reads x 40 sweeps (25 slices kept).
  static TrainingConfig desk_scale(Algorithm algorithm);
  void validate() const;
  std::size_t n_hidden() const;
};

BoltzmannMachine make_machine(const TrainingConfig& config, std::size_t n_states,
                              std::size_t n_actions);

/// Q(s, a) = -F(s, a) together with the hidden expectations gathered in the
/// same pass (used by the weight update).
struct QEvaluation {
  double q = 0.0;
  HiddenExpectations expectations;
  std::size_t sample_count = 0;
};

/// Dispatches on the algorithm: closed-form RBM free energy; sampled
/// classical free energy (SA or SQA at small Gamma); or the effective-model
/// quantum free energy (SQA at finite Gamma). Sampler seeds come from rng.
/// UsageError if a is inadmissible at s.
QEvaluation q_value(const BoltzmannMachine& bm, const Maze& maze,
                    std::size_t state, Action a, const TrainingConfig& config,
                    Rng& rng);

struct GreedyChoice {
  Action action = Action::kStay;
  double q = 0.0;
};

/// argmax over admissible actions of q_value; ties go to the earlier action in
/// kAllActions order.
GreedyChoice greedy_action(const BoltzmannMachine& bm, const Maze& maze,
                           std::size_t state, const TrainingConfig& config,
                           Rng& rng);

struct Transition {
  std::size_t s1 = 0;
  Action a1 = Action::kStay;
  double reward = 0.0;
  std::size_t s2 = 0;
  Action a2 = Action::kStay;
};

/// TD(0) step with the bootstrapped target held fixed:
///   E = r + gamma Q(s2, a2) - Q(s1, a1)
///   dw^{vh} = eps_w E v <h>,  dw^{hh'} = eps_w E <h h'>.
/// Only weights on the active state/action node and hidden-hidden weights
/// move. Returns E.
double td_update(BoltzmannMachine& bm, AdaptiveRate& rate,
                 const Transition& transition, const QEvaluation& q1,
                 double q2, double discount);

struct TrainingSample {
  std::size_t s1 = 0;
  Action a1 = Action::kStay;
  std::optional<std::size_t> s2;  // set by the (s, a, s') sweep
};

/// Training-sample stream. Sweeps cycle over admissible pairs (or kernel-
/// supported triples) in row-major state order and kAllActions order.
/// Throws UsageError for n == 0 or a (s, a, s') sweep on a clear kernel.
std::vector<TrainingSample> generate_samples(const Maze& maze,
                                             const TransitionKernel& kernel,
                                             SampleStrategy strategy,
                                             std::size_t n, Rng& rng);

/// Greedy action per state after each training sample. Index 0 is the policy
/// of the freshly initialised machine.
struct PolicyTrace {
  std::vector<std::vector<Action>> snapshots;
  std::vector<double> td_errors;
};

PolicyTrace train(const Maze& maze, const TransitionKernel& kernel,
                  const TrainingConfig& config, std::uint64_t seed);

}  // namespace qbmrl

#endif  // QBMRL_TRAINING_HPP

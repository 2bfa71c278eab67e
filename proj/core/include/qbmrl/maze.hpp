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

#ifndef QBMRL_MAZE_HPP
#define QBMRL_MAZE_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qbmrl {

class Rng;

enum class Cell { kNeutral, kWall, kPit, kReward, kStochasticReward };

enum class Action { kUp = 0, kDown = 1, kLeft = 2, kRight = 3, kStay = 4 };

inline constexpr std::size_t kNumActions = 5;
/// Fixed order used for tie-breaking and serialisation.
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::kUp, Action::kDown, Action::kLeft, Action::kRight, Action::kStay};

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view name);

struct Position {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

struct RewardValues {
  double reward = 200.0;
  double pit = 0.0;
  double neutral = 100.0;
  /// Stochastic cells pay stochastic_scale * Bernoulli(stochastic_p).
  double stochastic_scale = 200.0;
  double stochastic_p = 0.5;

  double stochastic_mean() const { return stochastic_scale * stochastic_p; }
};

/// Rectangular grid world. States are the non-wall cells, numbered in
/// row-major order.
class Maze {
 public:
  Maze(std::size_t rows, std::size_t cols, std::vector<Cell> cells,
       RewardValues values = {}, double discount = 0.8);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Cell cell(Position p) const { return cells_.at(p.row * cols_ + p.col); }
  double discount() const { return discount_; }
  const RewardValues& values() const { return values_; }

  std::size_t n_states() const { return state_positions_.size(); }
  Position position(std::size_t state) const { return state_positions_.at(state); }
  /// nullopt for walls.
  std::optional<std::size_t> state_at(Position p) const;

  /// Reward for entering the state; stochastic cells use their expectation.
  double expected_reward(std::size_t state) const;
  /// Reward for entering the state, drawing stochastic cells fresh.
  double sample_reward(std::size_t state, Rng& rng) const;

  /// Rows joined by '\n' using the parse_maze alphabet.
  std::string to_text() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Cell> cells_;
  RewardValues values_;
  double discount_;
  std::vector<Position> state_positions_;
  std::vector<std::optional<std::size_t>> state_index_;
};

/// '.' neutral, 'W' wall, 'R' reward, 'P' pit, 'S' stochastic reward. A
/// trailing newline is accepted; ragged rows, empty input and unknown
/// characters are ParseErrors.
Maze parse_maze(std::string_view text);

/// n x 5 scaling family: reward at (0,0), pit at (n-1,2), stochastic rewards
/// at (0,4) and (n-1,0), walls at (k,2) for k = 1..n-2. Requires n >= 2.
Maze nx5_maze(std::size_t n);

/// Destination of `a` from `state`, or nullopt when the move is inadmissible.
std::optional<std::size_t> destination(const Maze& maze, std::size_t state,
                                       Action a);

/// Admissible actions at `state` in kAllActions order. Stand-still is always
/// admissible.
std::vector<Action> admissible_actions(const Maze& maze, std::size_t state);
bool is_admissible(const Maze& maze, std::size_t state, Action a);

enum class KernelKind { kClear, kWindy };

struct TransitionKernel {
  KernelKind kind = KernelKind::kClear;
  double p_intended = 0.8;

  static TransitionKernel clear() { return {KernelKind::kClear, 1.0}; }
  static TransitionKernel windy(double p = 0.8) { return {KernelKind::kWindy, p}; }
};

std::string_view to_string(KernelKind kind);

/// Next-state law P(s' | s, a) as (state, probability) pairs sorted by state.
/// Windy: the intended destination keeps p_intended; the rest is split evenly
/// over the other destinations of admissible actions at s (s itself included).
std::vector<std::pair<std::size_t, double>> transition_distribution(
    const Maze& maze, const TransitionKernel& kernel, std::size_t state,
    Action a);

struct StepResult {
  std::size_t next_state = 0;
  double reward = 0.0;
};

/// Samples s' from the kernel and the reward of entering it. UsageError for
/// inadmissible actions.
StepResult step(const Maze& maze, const TransitionKernel& kernel,
                std::size_t state, Action a, Rng& rng);

/// Optimal values and optimal-action sets.
struct OptimalPolicySet {
  std::vector<double> value;                  // V*(s)
  std::vector<std::array<double, kNumActions>> q;  // Q*(s, a); -inf if inadmissible
  std::vector<std::vector<Action>> optimal;   // alpha*(s), kAllActions order
  std::size_t iterations = 0;

  bool is_optimal(std::size_t state, Action a) const;
};

struct ValueIterationOptions {
  double tolerance = 1e-12;
  double tie_tolerance = 1e-9;
  std::size_t max_iterations = 100000;
};

/// Bellman iteration over admissible actions with stochastic cells replaced
/// by their expectation. Throws std::logic_error if an iterate ever fails the
/// gamma-contraction bound.
OptimalPolicySet value_iteration(const Maze& maze, const TransitionKernel& kernel,
                                 const ValueIterationOptions& options = {});

/// Expected fidelity of a policy drawing uniformly among admissible actions:
/// mean over states of |alpha*(s)| / |adm(s)|.
double random_policy_fidelity(const Maze& maze, const OptimalPolicySet& oracle);

}  // namespace qbmrl

#endif  // QBMRL_MAZE_HPP

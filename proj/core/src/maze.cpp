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

#include "qbmrl/maze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qbmrl/error.hpp"
#include "qbmrl/rng.hpp"

namespace qbmrl {

std::string_view to_string(Action a) {
  switch (a) {
    case Action::kUp:
      return "up";
    case Action::kDown:
      return "down";
    case Action::kLeft:
      return "left";
    case Action::kRight:
      return "right";
    case Action::kStay:
      return "stay";
  }
  return "?";
}

std::optional<Action> action_from_string(std::string_view name) {
  for (auto a : kAllActions) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::kClear ? "clear" : "windy";
}

Maze::Maze(std::size_t rows, std::size_t cols, std::vector<Cell> cells,
           RewardValues values, double discount)
    : rows_(rows),
      cols_(cols),
      cells_(std::move(cells)),
      values_(values),
      discount_(discount) {
  if (rows == 0 || cols == 0) throw DomainError("maze must be non-empty");
  if (cells_.size() != rows * cols) throw DimensionError("cell count mismatch");
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw ParameterError("discount must lie in [0, 1)");
  }
  for (double x : {values.reward, values.pit, values.neutral,
                   values.stochastic_scale, values.stochastic_p}) {
    if (!std::isfinite(x)) throw ParameterError("maze values must be finite");
  }
  state_index_.resize(cells_.size());
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (cells_[r * cols + c] == Cell::kWall) continue;
      state_index_[r * cols + c] = state_positions_.size();
      state_positions_.push_back(Position{r, c});
    }
  }
  if (state_positions_.empty()) throw DomainError("maze has no free cell");
}

std::optional<std::size_t> Maze::state_at(Position p) const {
  if (p.row >= rows_ || p.col >= cols_) return std::nullopt;
  return state_index_[p.row * cols_ + p.col];
}

double Maze::expected_reward(std::size_t state) const {
  switch (cell(position(state))) {
    case Cell::kReward:
      return values_.reward;
    case Cell::kPit:
      return values_.pit;
    case Cell::kStochasticReward:
      return values_.stochastic_mean();
    case Cell::kNeutral:
    case Cell::kWall:
      break;
  }
  return values_.neutral;
}

double Maze::sample_reward(std::size_t state, Rng& rng) const {
  if (cell(position(state)) == Cell::kStochasticReward) {
    return rng.bernoulli(values_.stochastic_p) ? values_.stochastic_scale : 0.0;
  }
  return expected_reward(state);
}

std::string Maze::to_text() const {
  std::string out;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      switch (cells_[r * cols_ + c]) {
        case Cell::kNeutral:
          out += '.';
          break;
        case Cell::kWall:
          out += 'W';
          break;
        case Cell::kPit:
          out += 'P';
          break;
        case Cell::kReward:
          out += 'R';
          break;
        case Cell::kStochasticReward:
          out += 'S';
          break;
      }
    }
    out += '\n';
  }
  return out;
}

Maze parse_maze(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError("maze text is empty");

  const std::size_t cols = lines.front().size();
  std::vector<Cell> cells;
  cells.reserve(lines.size() * cols);
  for (std::size_t r = 0; r < lines.size(); ++r) {
    if (lines[r].size() != cols) {
      throw ParseError("ragged maze: row " + std::to_string(r) + " has " +
                       std::to_string(lines[r].size()) + " cells, expected " +
                       std::to_string(cols));
    }
    for (char ch : lines[r]) {
      switch (ch) {
        case '.':
          cells.push_back(Cell::kNeutral);
          break;
        case 'W':
          cells.push_back(Cell::kWall);
          break;
        case 'R':
          cells.push_back(Cell::kReward);
          break;
        case 'P':
          cells.push_back(Cell::kPit);
          break;
        case 'S':
          cells.push_back(Cell::kStochasticReward);
          break;
        default:
          throw ParseError(std::string("unknown maze character '") + ch +
                           "' in row " + std::to_string(r));
      }
    }
  }
  return Maze(lines.size(), cols, std::move(cells));
}

Maze nx5_maze(std::size_t n) {
  if (n < 2) throw ParameterError("n x 5 family needs n >= 2");
  constexpr std::size_t kCols = 5;
  std::vector<Cell> cells(n * kCols, Cell::kNeutral);
  cells[0] = Cell::kReward;
  cells[(n - 1) * kCols + 2] = Cell::kPit;
  cells[4] = Cell::kStochasticReward;
  cells[(n - 1) * kCols + 0] = Cell::kStochasticReward;
  for (std::size_t k = 1; k + 1 < n; ++k) cells[k * kCols + 2] = Cell::kWall;
  return Maze(n, kCols, std::move(cells));
}

std::optional<std::size_t> destination(const Maze& maze, std::size_t state,
                                       Action a) {
  const Position p = maze.position(state);
  Position q = p;
  switch (a) {
    case Action::kUp:
      if (p.row == 0) return std::nullopt;
      q.row = p.row - 1;
      break;
    case Action::kDown:
      q.row = p.row + 1;
      break;
    case Action::kLeft:
      if (p.col == 0) return std::nullopt;
      q.col = p.col - 1;
      break;
    case Action::kRight:
      q.col = p.col + 1;
      break;
    case Action::kStay:
      return state;
  }
  return maze.state_at(q);
}

std::vector<Action> admissible_actions(const Maze& maze, std::size_t state) {
  if (state >= maze.n_states()) throw DomainError("state is not a free cell");
  std::vector<Action> out;
  for (auto a : kAllActions) {
    if (destination(maze, state, a)) out.push_back(a);
  }
  return out;
}

bool is_admissible(const Maze& maze, std::size_t state, Action a) {
  return destination(maze, state, a).has_value();
}

std::vector<std::pair<std::size_t, double>> transition_distribution(
    const Maze& maze, const TransitionKernel& kernel, std::size_t state,
    Action a) {
  const auto intended = destination(maze, state, a);
  if (!intended) {
    throw UsageError("action " + std::string(to_string(a)) +
                     " is inadmissible at state " + std::to_string(state));
  }
  if (kernel.kind == KernelKind::kClear) return {{*intended, 1.0}};

  std::vector<std::size_t> others;
  for (auto b : admissible_actions(maze, state)) {
    const auto d = *destination(maze, state, b);
    if (d != *intended) others.push_back(d);
  }
  std::vector<std::pair<std::size_t, double>> out;
  if (others.empty()) return {{*intended, 1.0}};
  out.emplace_back(*intended, kernel.p_intended);
  const double share =
      (1.0 - kernel.p_intended) / static_cast<double>(others.size());
  for (auto d : others) out.emplace_back(d, share);
  std::sort(out.begin(), out.end());
  return out;
}

StepResult step(const Maze& maze, const TransitionKernel& kernel,
                std::size_t state, Action a, Rng& rng) {
  const auto dist = transition_distribution(maze, kernel, state, a);
  std::size_t next = dist.back().first;
  if (dist.size() > 1) {
    double u = rng.uniform();
    for (const auto& [s, p] : dist) {
      if (u < p) {
        next = s;
        break;
      }
      u -= p;
    }
  }
  return StepResult{next, maze.sample_reward(next, rng)};
}

bool OptimalPolicySet::is_optimal(std::size_t state, Action a) const {
  const auto& set = optimal.at(state);
  return std::find(set.begin(), set.end(), a) != set.end();
}

OptimalPolicySet value_iteration(const Maze& maze, const TransitionKernel& kernel,
                                 const ValueIterationOptions& options) {
  const std::size_t n = maze.n_states();
  const double gamma = maze.discount();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Cache the per-(s, a) law and expected immediate reward.
  struct Row {
    Action action;
    double reward;
    std::vector<std::pair<std::size_t, double>> law;
  };
  std::vector<std::vector<Row>> rows(n);
  for (std::size_t s = 0; s < n; ++s) {
    for (auto a : admissible_actions(maze, s)) {
      Row row{a, 0.0, transition_distribution(maze, kernel, s, a)};
      for (const auto& [t, p] : row.law) row.reward += p * maze.expected_reward(t);
      rows[s].push_back(std::move(row));
    }
  }

  auto backup = [&](const std::vector<double>& v, std::size_t s,
                    std::array<double, kNumActions>& q) {
    q.fill(kNegInf);
    double best = kNegInf;
    for (const auto& row : rows[s]) {
      double x = row.reward;
      for (const auto& [t, p] : row.law) x += gamma * p * v[t];
      q[static_cast<std::size_t>(row.action)] = x;
      best = std::max(best, x);
    }
    return best;
  };

  OptimalPolicySet out;
  out.value.assign(n, 0.0);
  out.q.resize(n);
  std::vector<double> next(n);
  double previous_change = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double change = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      next[s] = backup(out.value, s, out.q[s]);
      change = std::max(change, std::abs(next[s] - out.value[s]));
    }
    out.value.swap(next);
    out.iterations = it + 1;
    // Contraction: |T^{k+1}V - T^k V| <= gamma |T^k V - T^{k-1} V|.
    if (change > gamma * previous_change + 1e-9) {
      throw std::logic_error("value iteration violated the contraction bound");
    }
    previous_change = change;
    if (change < options.tolerance) break;
  }

  out.optimal.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double best = backup(out.value, s, out.q[s]);
    for (auto a : kAllActions) {
      const double q = out.q[s][static_cast<std::size_t>(a)];
      if (q != kNegInf && best - q <= options.tie_tolerance) {
        out.optimal[s].push_back(a);
      }
    }
  }
  return out;
}

double random_policy_fidelity(const Maze& maze, const OptimalPolicySet& oracle) {
  if (oracle.optimal.size() != maze.n_states()) {
    throw DimensionError("oracle does not match the maze");
  }
  double sum = 0.0;
  for (std::size_t s = 0; s < maze.n_states(); ++s) {
    sum += static_cast<double>(oracle.optimal[s].size()) /
           static_cast<double>(admissible_actions(maze, s).size());
  }
  return sum / static_cast<double>(maze.n_states());
}

}  // namespace qbmrl

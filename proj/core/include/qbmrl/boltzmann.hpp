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

#ifndef QBMRL_BOLTZMANN_HPP
#define QBMRL_BOLTZMANN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "qbmrl/ising.hpp"
#include "qbmrl/samplers.hpp"

namespace qbmrl {

class Rng;

enum class Layout { kRbm, kDbm, kGbm };

std::string_view to_string(Layout layout);

/// Boltzmann machine over state, action and hidden nodes.
///
/// Node ids: states occupy [0, S), actions [S, S + A), hidden nodes
/// [S + A, S + A + m). Only edges allowed by the layout exist; each edge owns
/// one weight, addressed by its position in edges().
class BoltzmannMachine {
 public:
  struct Edge {
    std::size_t u = 0;  // u < v
    std::size_t v = 0;
  };
  /// A visible-hidden edge seen from the visible side.
  struct HiddenLink {
    std::size_t hidden = 0;  // 0-based hidden index
    std::size_t edge = 0;
  };
  struct HiddenPair {
    std::size_t first = 0;  // hidden indices, first < second
    std::size_t second = 0;
    std::size_t edge = 0;
  };

  /// Complete bipartite graph between visibles and one hidden layer.
  static BoltzmannMachine rbm(std::size_t n_states, std::size_t n_actions,
                              std::size_t n_hidden);
  /// States feed the first hidden layer, actions the last; consecutive hidden
  /// layers are fully connected.
  static BoltzmannMachine dbm(std::size_t n_states, std::size_t n_actions,
                              std::vector<std::size_t> hidden_layers);
  /// Every visible-hidden and hidden-hidden pair is an edge.
  static BoltzmannMachine gbm(std::size_t n_states, std::size_t n_actions,
                              std::size_t n_hidden);

  Layout layout() const { return layout_; }
  std::size_t n_states() const { return n_states_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t n_visible() const { return n_states_ + n_actions_; }
  std::size_t n_hidden() const { return n_hidden_; }
  const std::vector<std::size_t>& hidden_layers() const { return hidden_layers_; }

  std::size_t state_node(std::size_t s) const { return s; }
  std::size_t action_node(std::size_t a) const { return n_states_ + a; }
  std::size_t hidden_node(std::size_t h) const { return n_visible() + h; }

  std::size_t n_weights() const { return weights_.size(); }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t edge) const { return weights_.at(edge); }
  void set_weight(std::size_t edge, double value);
  void add_to_weight(std::size_t edge, double delta);
  std::optional<std::size_t> edge_between(std::size_t node_a,
                                          std::size_t node_b) const;

  std::span<const HiddenLink> links_of_visible(std::size_t visible_node) const;
  std::span<const HiddenPair> hidden_pairs() const { return hidden_pairs_; }

  /// Independent N(0, stddev^2) draws for every weight, in edge order.
  void randomize(Rng& rng, double stddev = 1.0);

 private:
  BoltzmannMachine(Layout layout, std::size_t n_states, std::size_t n_actions,
                   std::vector<std::size_t> hidden_layers);
  void add_edge(std::size_t a, std::size_t b);
  void finalize();

  Layout layout_ = Layout::kRbm;
  std::size_t n_states_ = 0;
  std::size_t n_actions_ = 0;
  std::size_t n_hidden_ = 0;
  std::vector<std::size_t> hidden_layers_;
  std::vector<Edge> edges_;
  std::vector<double> weights_;
  std::vector<std::vector<HiddenLink>> visible_links_;
  std::vector<HiddenPair> hidden_pairs_;
};

/// Weight count of an RBM with m hidden nodes and n visible nodes: m n.
std::size_t rbm_weight_count(std::size_t n_visible, std::size_t n_hidden);
/// Weight count of a two-layer DBM with m/2 + m/2 hidden nodes: m (2n + m) / 4.
std::size_t dbm_weight_count(std::size_t n_visible, std::size_t n_hidden);

/// One-hot state and action vectors clamped onto the visible nodes.
struct VisibleAssignment {
  std::vector<std::uint8_t> state_vec;
  std::vector<std::uint8_t> action_vec;

  static VisibleAssignment one_hot(std::size_t n_states, std::size_t n_actions,
                                   std::size_t state, std::size_t action);
  /// Index of the single active state (after validation).
  std::size_t state() const;
  std::size_t action() const;
};

/// Throws EncodingError unless both vectors match the machine and are one-hot.
void validate_assignment(const BoltzmannMachine& bm,
                         const VisibleAssignment& v);

/// Hidden-node Ising problem left after clamping. For spins sigma = 2h - 1,
///   E_v(h) = classical_energy(ising, sigma) + offset.
struct ClampedModel {
  IsingModel ising;
  double offset = 0.0;
};

ClampedModel clamp(const BoltzmannMachine& bm, const VisibleAssignment& v);

/// E_v(h) in the {0,1} convention; bit k of hidden_bits is h_k.
double binary_energy(const BoltzmannMachine& bm, const VisibleAssignment& v,
                     std::uint64_t hidden_bits);

enum class Estimator {
  kRbmClosed,
  kClassicalSampled,
  kQuantumSampled,
  kExactEnumeration
};

struct FreeEnergyEstimate {
  double value = 0.0;
  Estimator estimator = Estimator::kExactEnumeration;
  std::size_t sample_count = 0;
};

/// Sigmoid of the visible input to each hidden node. RBM layout only.
std::vector<double> rbm_hidden_activations(const BoltzmannMachine& bm,
                                           const VisibleAssignment& v);

/// Closed-form RBM free energy at beta = 1. Activations are clipped to
/// [1e-12, 1 - 1e-12] before the entropy logs.
FreeEnergyEstimate rbm_free_energy(const BoltzmannMachine& bm,
                                   const VisibleAssignment& v);

inline constexpr double kActivationClip = 1e-12;

/// Probability mass over hidden configurations, keyed by bit pattern
/// (bit k = h_k). Sorted by key; probabilities sum to one.
struct HiddenDistribution {
  std::size_t n_hidden = 0;
  std::vector<std::pair<std::uint64_t, double>> mass;
  std::size_t sample_count = 0;

  double entropy() const;
};

/// Normalised frequencies of the per-slice hidden configurations in a sample
/// set (every read and every slice counts once).
HiddenDistribution empirical_hidden_distribution(const SampleSet& samples);

/// Exact Boltzmann distribution exp(-beta E_v(h)) / Z by enumeration.
HiddenDistribution exact_hidden_distribution(const BoltzmannMachine& bm,
                                             const VisibleAssignment& v,
                                             double beta);

/// <h_k> and <h_k h_l> in the {0,1} convention.
struct HiddenExpectations {
  std::size_t n_hidden = 0;
  std::vector<double> mean;
  std::vector<double> pair;  // row-major m x m

  double pair_mean(std::size_t k, std::size_t l) const {
    return pair[k * n_hidden + l];
  }
};

HiddenExpectations expectations_of(const HiddenDistribution& distribution);
/// Converts spin averages with h = (sigma + 1) / 2.
HiddenExpectations to_binary_expectations(const SliceExpectations& spins);

/// Sampled classical free energy
///   -F = sum w^{vh} v <h> + sum w^{hh'} <h h'> - (1/beta) sum P log P.
FreeEnergyEstimate classical_free_energy(const BoltzmannMachine& bm,
                                         const VisibleAssignment& v,
                                         const HiddenDistribution& distribution,
                                         double beta);
/// Same, with expectations from slice_expectations and P the empirical
/// frequency of distinct hidden configurations.
FreeEnergyEstimate classical_free_energy(const BoltzmannMachine& bm,
                                         const VisibleAssignment& v,
                                         const SampleSet& samples, double beta);

struct QuantumFreeEnergyOptions {
  /// Added once to <H_eff>; clamp() offset when the samples come from a
  /// clamped machine.
  double energy_offset = 0.0;
  /// Subtract (1/beta) ln C so the estimate targets the quantum free energy
  /// rather than the extended classical one.
  bool include_trotter_normalization = false;
};

/// F = <H_eff> + (1/beta) sum_c P(c) log P(c), with P the frequency of each
/// distinct whole extended configuration. Requires SQA samples.
FreeEnergyEstimate quantum_free_energy(const SampleSet& samples, double beta,
                                       const QuantumFreeEnergyOptions& options = {});

inline constexpr std::size_t kMaxEnumeratedHidden = 16;
inline constexpr std::size_t kMaxDenseHidden = kMaxDenseSpins;

/// -(1/beta) ln sum_h exp(-beta E_v(h)); at most 16 hidden nodes.
double exact_free_energy(const BoltzmannMachine& bm, const VisibleAssignment& v,
                         double beta);
/// -(1/beta) ln tr exp(-beta H_v) with H_v the clamped spin Hamiltonian plus
/// -Gamma sum sigma^x; at most 10 hidden nodes.
double exact_quantum_free_energy(const BoltzmannMachine& bm,
                                 const VisibleAssignment& v, double beta,
                                 double gamma);

}  // namespace qbmrl

#endif  // QBMRL_BOLTZMANN_HPP

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

#include "qbmrl/boltzmann.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qbmrl/error.hpp"
#include "qbmrl/rng.hpp"

namespace qbmrl {

namespace {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clip_activation(double p) {
  return std::clamp(p, kActivationClip, 1.0 - kActivationClip);
}

// sum_v w^{vh} v for every hidden node.
std::vector<double> visible_input(const BoltzmannMachine& bm,
                                  const VisibleAssignment& v) {
  std::vector<double> input(bm.n_hidden(), 0.0);
  auto accumulate = [&](std::size_t node, std::uint8_t value) {
    if (value == 0) return;
    for (const auto& link : bm.links_of_visible(node)) {
      input[link.hidden] += bm.weight(link.edge) * value;
    }
  };
  for (std::size_t s = 0; s < bm.n_states(); ++s) {
    accumulate(bm.state_node(s), v.state_vec[s]);
  }
  for (std::size_t a = 0; a < bm.n_actions(); ++a) {
    accumulate(bm.action_node(a), v.action_vec[a]);
  }
  return input;
}

double log_sum_exp(const std::vector<double>& x) {
  const double m = *std::max_element(x.begin(), x.end());
  double s = 0.0;
  for (double xi : x) s += std::exp(xi - m);
  return m + std::log(s);
}

// -F = <visible-hidden term> + <hidden-hidden term> + entropy / beta.
double negative_free_energy(const BoltzmannMachine& bm,
                            const VisibleAssignment& v,
                            const HiddenExpectations& ex, double entropy,
                            double beta) {
  const auto input = visible_input(bm, v);
  double energy_term = 0.0;
  for (std::size_t k = 0; k < bm.n_hidden(); ++k) {
    energy_term += input[k] * ex.mean[k];
  }
  for (const auto& p : bm.hidden_pairs()) {
    energy_term += bm.weight(p.edge) * ex.pair_mean(p.first, p.second);
  }
  return energy_term + entropy / beta;
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::kRbm:
      return "rbm";
    case Layout::kDbm:
      return "dbm";
    case Layout::kGbm:
      return "gbm";
  }
  return "unknown";
}

BoltzmannMachine::BoltzmannMachine(Layout layout, std::size_t n_states,
                                   std::size_t n_actions,
                                   std::vector<std::size_t> hidden_layers)
    : layout_(layout),
      n_states_(n_states),
      n_actions_(n_actions),
      hidden_layers_(std::move(hidden_layers)) {
  if (n_states == 0 || n_actions == 0) {
    throw LayoutError("machine needs at least one state and one action node");
  }
  if (hidden_layers_.empty()) throw LayoutError("machine needs hidden nodes");
  for (auto size : hidden_layers_) {
    if (size == 0) throw LayoutError("hidden layers must be non-empty");
    n_hidden_ += size;
  }
  if (n_hidden_ > 64) throw LayoutError("at most 64 hidden nodes are supported");
  visible_links_.resize(n_visible());
}

void BoltzmannMachine::add_edge(std::size_t a, std::size_t b) {
  if (a > b) std::swap(a, b);
  edges_.push_back(Edge{a, b});
}

void BoltzmannMachine::finalize() {
  weights_.assign(edges_.size(), 0.0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto [u, v] = edges_[e];
    if (u < n_visible() && v >= n_visible()) {
      visible_links_[u].push_back(HiddenLink{v - n_visible(), e});
    } else if (u >= n_visible()) {
      hidden_pairs_.push_back(HiddenPair{u - n_visible(), v - n_visible(), e});
    } else {
      throw LayoutError("visible-visible edges are not supported");
    }
  }
}

BoltzmannMachine BoltzmannMachine::rbm(std::size_t n_states,
                                       std::size_t n_actions,
                                       std::size_t n_hidden) {
  BoltzmannMachine bm(Layout::kRbm, n_states, n_actions, {n_hidden});
  for (std::size_t node = 0; node < bm.n_visible(); ++node) {
    for (std::size_t h = 0; h < n_hidden; ++h) bm.add_edge(node, bm.hidden_node(h));
  }
  bm.finalize();
  return bm;
}

BoltzmannMachine BoltzmannMachine::dbm(std::size_t n_states,
                                       std::size_t n_actions,
                                       std::vector<std::size_t> hidden_layers) {
  BoltzmannMachine bm(Layout::kDbm, n_states, n_actions, std::move(hidden_layers));
  const auto& layers = bm.hidden_layers_;
  std::vector<std::size_t> first(layers.size());
  for (std::size_t l = 1; l < layers.size(); ++l) first[l] = first[l - 1] + layers[l - 1];

  for (std::size_t s = 0; s < n_states; ++s) {
    for (std::size_t h = 0; h < layers.front(); ++h) {
      bm.add_edge(bm.state_node(s), bm.hidden_node(first.front() + h));
    }
  }
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    for (std::size_t h = 0; h < layers[l]; ++h) {
      for (std::size_t g = 0; g < layers[l + 1]; ++g) {
        bm.add_edge(bm.hidden_node(first[l] + h), bm.hidden_node(first[l + 1] + g));
      }
    }
  }
  for (std::size_t a = 0; a < n_actions; ++a) {
    for (std::size_t h = 0; h < layers.back(); ++h) {
      bm.add_edge(bm.action_node(a), bm.hidden_node(first.back() + h));
    }
  }
  bm.finalize();
  return bm;
}

BoltzmannMachine BoltzmannMachine::gbm(std::size_t n_states,
                                       std::size_t n_actions,
                                       std::size_t n_hidden) {
  BoltzmannMachine bm(Layout::kGbm, n_states, n_actions, {n_hidden});
  for (std::size_t node = 0; node < bm.n_visible(); ++node) {
    for (std::size_t h = 0; h < n_hidden; ++h) bm.add_edge(node, bm.hidden_node(h));
  }
  for (std::size_t h = 0; h < n_hidden; ++h) {
    for (std::size_t g = h + 1; g < n_hidden; ++g) {
      bm.add_edge(bm.hidden_node(h), bm.hidden_node(g));
    }
  }
  bm.finalize();
  return bm;
}

void BoltzmannMachine::set_weight(std::size_t edge, double value) {
  if (!std::isfinite(value)) throw ParameterError("weight must be finite");
  weights_.at(edge) = value;
}

void BoltzmannMachine::add_to_weight(std::size_t edge, double delta) {
  set_weight(edge, weights_.at(edge) + delta);
}

std::optional<std::size_t> BoltzmannMachine::edge_between(
    std::size_t node_a, std::size_t node_b) const {
  if (node_a > node_b) std::swap(node_a, node_b);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].u == node_a && edges_[e].v == node_b) return e;
  }
  return std::nullopt;
}

std::span<const BoltzmannMachine::HiddenLink>
BoltzmannMachine::links_of_visible(std::size_t visible_node) const {
  if (visible_node >= n_visible()) throw DimensionError("not a visible node");
  return visible_links_[visible_node];
}

void BoltzmannMachine::randomize(Rng& rng, double stddev) {
  for (auto& w : weights_) w = stddev * rng.normal();
}

std::size_t rbm_weight_count(std::size_t n_visible, std::size_t n_hidden) {
  return n_visible * n_hidden;
}

std::size_t dbm_weight_count(std::size_t n_visible, std::size_t n_hidden) {
  return n_hidden * (2 * n_visible + n_hidden) / 4;
}

VisibleAssignment VisibleAssignment::one_hot(std::size_t n_states,
                                             std::size_t n_actions,
                                             std::size_t state,
                                             std::size_t action) {
  if (state >= n_states || action >= n_actions) {
    throw EncodingError("one-hot index out of range");
  }
  VisibleAssignment v;
  v.state_vec.assign(n_states, 0);
  v.action_vec.assign(n_actions, 0);
  v.state_vec[state] = 1;
  v.action_vec[action] = 1;
  return v;
}

namespace {

std::size_t active_index(const std::vector<std::uint8_t>& vec,
                         const char* what) {
  std::size_t count = 0;
  std::size_t index = 0;
  for (std::size_t i = 0; i < vec.size(); ++i) {
    if (vec[i] > 1) throw EncodingError(std::string(what) + " vector must be binary");
    if (vec[i] == 1) {
      ++count;
      index = i;
    }
  }
  if (count != 1) {
    throw EncodingError(std::string(what) + " vector must be one-hot");
  }
  return index;
}

}  // namespace

std::size_t VisibleAssignment::state() const {
  return active_index(state_vec, "state");
}

std::size_t VisibleAssignment::action() const {
  return active_index(action_vec, "action");
}

void validate_assignment(const BoltzmannMachine& bm,
                         const VisibleAssignment& v) {
  if (v.state_vec.size() != bm.n_states() ||
      v.action_vec.size() != bm.n_actions()) {
    throw EncodingError("assignment size does not match the machine");
  }
  (void)v.state();
  (void)v.action();
}

ClampedModel clamp(const BoltzmannMachine& bm, const VisibleAssignment& v) {
  validate_assignment(bm, v);
  const std::size_t m = bm.n_hidden();
  const auto input = visible_input(bm, v);

  // -w h = -(w/2) sigma - w/2 and -w h h' = -(w/4)(sigma sigma' + sigma +
  // sigma' + 1) with h = (sigma + 1) / 2.
  std::vector<double> biases(m, 0.0);
  double offset = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    biases[k] = input[k] / 2.0;
    offset -= input[k] / 2.0;
  }
  std::vector<Coupling> couplings;
  couplings.reserve(bm.hidden_pairs().size());
  for (const auto& p : bm.hidden_pairs()) {
    const double w = bm.weight(p.edge);
    couplings.push_back(Coupling{p.first, p.second, w / 4.0});
    biases[p.first] += w / 4.0;
    biases[p.second] += w / 4.0;
    offset -= w / 4.0;
  }
  return ClampedModel{IsingModel(std::move(biases), std::move(couplings)), offset};
}

double binary_energy(const BoltzmannMachine& bm, const VisibleAssignment& v,
                     std::uint64_t hidden_bits) {
  auto h = [&](std::size_t k) { return static_cast<double>((hidden_bits >> k) & 1U); };
  double e = 0.0;
  for (std::size_t e_id = 0; e_id < bm.n_weights(); ++e_id) {
    const auto [u, w] = bm.edges()[e_id];
    double x = 0.0;
    double y = h(w - bm.n_visible());
    if (u < bm.n_states()) {
      x = v.state_vec[u];
    } else if (u < bm.n_visible()) {
      x = v.action_vec[u - bm.n_states()];
    } else {
      x = h(u - bm.n_visible());
    }
    e -= bm.weight(e_id) * x * y;
  }
  return e;
}

std::vector<double> rbm_hidden_activations(const BoltzmannMachine& bm,
                                           const VisibleAssignment& v) {
  if (bm.layout() != Layout::kRbm) {
    throw LayoutError("closed-form activations need an RBM layout");
  }
  validate_assignment(bm, v);
  auto act = visible_input(bm, v);
  for (auto& x : act) x = sigmoid(x);
  return act;
}

FreeEnergyEstimate rbm_free_energy(const BoltzmannMachine& bm,
                                   const VisibleAssignment& v) {
  const auto act = rbm_hidden_activations(bm, v);
  const auto input = visible_input(bm, v);
  double neg_f = 0.0;
  for (std::size_t k = 0; k < act.size(); ++k) {
    const double p = clip_activation(act[k]);
    neg_f += input[k] * act[k];
    neg_f -= p * std::log(p) + (1.0 - p) * std::log1p(-p);
  }
  return FreeEnergyEstimate{-neg_f, Estimator::kRbmClosed, 0};
}

double HiddenDistribution::entropy() const {
  double s = 0.0;
  for (const auto& [key, p] : mass) {
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

HiddenDistribution empirical_hidden_distribution(const SampleSet& samples) {
  if (samples.empty()) throw UsageError("empty sample set");
  if (samples.n_spins > 64) throw CapacityError("at most 64 hidden spins");
  std::map<std::uint64_t, std::size_t> counts;
  for (std::size_t read = 0; read < samples.size(); ++read) {
    for (std::size_t k = 0; k < samples.n_slices; ++k) {
      const auto s = samples.slice(read, k);
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] > 0) bits |= std::uint64_t{1} << i;
      }
      ++counts[bits];
    }
  }
  HiddenDistribution out;
  out.n_hidden = samples.n_spins;
  out.sample_count = samples.size() * samples.n_slices;
  const double inv = 1.0 / static_cast<double>(out.sample_count);
  out.mass.reserve(counts.size());
  for (const auto& [bits, c] : counts) {
    out.mass.emplace_back(bits, static_cast<double>(c) * inv);
  }
  return out;
}

HiddenDistribution exact_hidden_distribution(const BoltzmannMachine& bm,
                                             const VisibleAssignment& v,
                                             double beta) {
  validate_assignment(bm, v);
  const std::size_t m = bm.n_hidden();
  if (m > kMaxEnumeratedHidden) {
    throw CapacityError("exact enumeration is capped at " +
                        std::to_string(kMaxEnumeratedHidden) + " hidden nodes");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  const std::uint64_t n_configs = std::uint64_t{1} << m;
  std::vector<double> log_w(n_configs);
  for (std::uint64_t b = 0; b < n_configs; ++b) {
    log_w[b] = -beta * binary_energy(bm, v, b);
  }
  const double log_z = log_sum_exp(log_w);
  HiddenDistribution out;
  out.n_hidden = m;
  out.mass.reserve(n_configs);
  for (std::uint64_t b = 0; b < n_configs; ++b) {
    out.mass.emplace_back(b, std::exp(log_w[b] - log_z));
  }
  return out;
}

HiddenExpectations expectations_of(const HiddenDistribution& distribution) {
  const std::size_t m = distribution.n_hidden;
  HiddenExpectations ex;
  ex.n_hidden = m;
  ex.mean.assign(m, 0.0);
  ex.pair.assign(m * m, 0.0);
  for (const auto& [bits, p] : distribution.mass) {
    for (std::size_t k = 0; k < m; ++k) {
      if (((bits >> k) & 1U) == 0U) continue;
      ex.mean[k] += p;
      for (std::size_t l = 0; l < m; ++l) {
        if (((bits >> l) & 1U) != 0U) ex.pair[k * m + l] += p;
      }
    }
  }
  return ex;
}

HiddenExpectations to_binary_expectations(const SliceExpectations& spins) {
  const std::size_t m = spins.n_spins;
  HiddenExpectations ex;
  ex.n_hidden = m;
  ex.mean.resize(m);
  ex.pair.resize(m * m);
  for (std::size_t k = 0; k < m; ++k) ex.mean[k] = 0.5 * (1.0 + spins.spin_mean[k]);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      ex.pair[k * m + l] =
          k == l ? ex.mean[k]
                 : 0.25 * (1.0 + spins.spin_mean[k] + spins.spin_mean[l] +
                           spins.pair(k, l));
    }
  }
  return ex;
}

FreeEnergyEstimate classical_free_energy(const BoltzmannMachine& bm,
                                         const VisibleAssignment& v,
                                         const HiddenDistribution& distribution,
                                         double beta) {
  validate_assignment(bm, v);
  if (distribution.mass.empty()) throw UsageError("empty hidden distribution");
  if (distribution.n_hidden != bm.n_hidden()) {
    throw DimensionError("distribution does not match the machine");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  const double neg_f = negative_free_energy(
      bm, v, expectations_of(distribution), distribution.entropy(), beta);
  return FreeEnergyEstimate{-neg_f, Estimator::kClassicalSampled,
                            distribution.sample_count};
}

FreeEnergyEstimate classical_free_energy(const BoltzmannMachine& bm,
                                         const VisibleAssignment& v,
                                         const SampleSet& samples,
                                         double beta) {
  validate_assignment(bm, v);
  if (samples.empty()) throw UsageError("classical_free_energy: empty samples");
  if (samples.n_spins != bm.n_hidden()) {
    throw DimensionError("samples do not match the machine");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  const auto ex = to_binary_expectations(slice_expectations(samples));
  const auto dist = empirical_hidden_distribution(samples);
  const double neg_f = negative_free_energy(bm, v, ex, dist.entropy(), beta);
  return FreeEnergyEstimate{-neg_f, Estimator::kClassicalSampled,
                            dist.sample_count};
}

FreeEnergyEstimate quantum_free_energy(const SampleSet& samples, double beta,
                                       const QuantumFreeEnergyOptions& options) {
  if (samples.empty()) throw UsageError("quantum_free_energy: empty samples");
  if (samples.kind != SamplerKind::kSimulatedQuantumAnnealing) {
    throw UsageError("quantum_free_energy needs SQA samples");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");

  double mean_energy = 0.0;
  for (double e : samples.effective_energies) mean_energy += e;
  mean_energy /= static_cast<double>(samples.size());

  std::map<SpinConfiguration, std::size_t> counts;
  for (const auto& read : samples.reads) ++counts[read];
  double neg_entropy = 0.0;
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (const auto& [config, c] : counts) {
    const double p = static_cast<double>(c) * inv;
    neg_entropy += p * std::log(p);
  }

  double f = mean_energy + options.energy_offset + neg_entropy / beta;
  if (options.include_trotter_normalization) {
    const auto& sched = std::get<SqaSchedule>(samples.schedule);
    f -= trotter_log_normalization(samples.n_spins, sched.gamma_final, beta,
                                   sched.n_replicas) /
         beta;
  }
  return FreeEnergyEstimate{f, Estimator::kQuantumSampled, samples.size()};
}

double exact_free_energy(const BoltzmannMachine& bm, const VisibleAssignment& v,
                         double beta) {
  validate_assignment(bm, v);
  const std::size_t m = bm.n_hidden();
  if (m > kMaxEnumeratedHidden) {
    throw CapacityError("exact enumeration is capped at " +
                        std::to_string(kMaxEnumeratedHidden) + " hidden nodes");
  }
  if (!(beta > 0.0)) throw ParameterError("beta must be positive");
  const std::uint64_t n_configs = std::uint64_t{1} << m;
  std::vector<double> log_w(n_configs);
  for (std::uint64_t b = 0; b < n_configs; ++b) {
    log_w[b] = -beta * binary_energy(bm, v, b);
  }
  return -log_sum_exp(log_w) / beta;
}

double exact_quantum_free_energy(const BoltzmannMachine& bm,
                                 const VisibleAssignment& v, double beta,
                                 double gamma) {
  if (bm.n_hidden() > kMaxDenseHidden) {
    throw CapacityError("dense quantum oracle is capped at " +
                        std::to_string(kMaxDenseHidden) + " hidden nodes");
  }
  auto clamped = clamp(bm, v);
  clamped.ising.set_transverse_field(gamma);
  return exact_transverse_field_thermal(clamped.ising, beta).free_energy +
         clamped.offset;
}

}  // namespace qbmrl

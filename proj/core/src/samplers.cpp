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

#include "qbmrl/samplers.hpp"

#include <cmath>
#include <string>

#include "qbmrl/error.hpp"
#include "qbmrl/rng.hpp"

namespace qbmrl {

namespace {

// Compressed adjacency of an IsingModel for the Metropolis inner loops.
struct Adjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbors;
  std::vector<double> weights;
  std::vector<double> biases;

  Adjacency(const IsingModel& model, double scale) {
    const std::size_t n = model.n_spins();
    std::vector<std::size_t> degree(n, 0);
    for (const auto& c : model.couplings()) {
      ++degree[c.i];
      ++degree[c.j];
    }
    offsets.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + degree[i];
    neighbors.resize(offsets[n]);
    weights.resize(offsets[n]);
    std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& c : model.couplings()) {
      neighbors[fill[c.i]] = c.j;
      weights[fill[c.i]++] = c.value * scale;
      neighbors[fill[c.j]] = c.i;
      weights[fill[c.j]++] = c.value * scale;
    }
    biases.resize(n);
    for (std::size_t i = 0; i < n; ++i) biases[i] = model.biases()[i] * scale;
  }

  // h_i + sum_j J_ij s_j over one slice.
  double field(std::size_t i, const std::int8_t* slice) const {
    double f = biases[i];
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      f += weights[e] * slice[neighbors[e]];
    }
    return f;
  }
};

void randomize(std::vector<std::int8_t>& spins, Rng& rng) {
  for (auto& s : spins) s = rng.uniform() < 0.5 ? -1 : 1;
}

inline bool metropolis_accept(double delta_e, double beta, Rng& rng) {
  return delta_e <= 0.0 || rng.uniform() < std::exp(-beta * delta_e);
}

double interpolate(double from, double to, std::size_t step,
                   std::size_t n_steps) {
  if (n_steps <= 1) return to;
  const double t =
      static_cast<double>(step) / static_cast<double>(n_steps - 1);
  return from + (to - from) * t;
}

}  // namespace

void SaSchedule::validate() const {
  if (!(beta_initial > 0.0) || !(beta_final >= beta_initial) ||
      !std::isfinite(beta_final)) {
    throw ParameterError("SA schedule needs 0 < beta_initial <= beta_final");
  }
  if (n_sweeps < 1) throw ParameterError("SA schedule needs n_sweeps >= 1");
  if (n_reads < 1) throw ParameterError("SA schedule needs n_reads >= 1");
}

double SaSchedule::beta_at(std::size_t sweep) const {
  return interpolate(beta_initial, beta_final, sweep, n_sweeps);
}

void SqaSchedule::validate() const {
  if (!(gamma_final > 0.0) || !(gamma_initial >= gamma_final) ||
      !std::isfinite(gamma_initial)) {
    throw ParameterError(
        "SQA schedule needs gamma_initial >= gamma_final > 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ParameterError("SQA schedule needs beta > 0");
  }
  if (n_replicas < 2) throw ParameterError("SQA schedule needs n_replicas >= 2");
  if (n_sweeps < 1) throw ParameterError("SQA schedule needs n_sweeps >= 1");
  if (n_reads < 1) throw ParameterError("SQA schedule needs n_reads >= 1");
}

double SqaSchedule::gamma_at(std::size_t sweep) const {
  return interpolate(gamma_initial, gamma_final, sweep, n_sweeps);
}

double SampleSet::sampling_beta() const {
  if (const auto* sa = std::get_if<SaSchedule>(&schedule)) {
    return sa->beta_final;
  }
  return std::get<SqaSchedule>(schedule).beta;
}

std::span<const std::int8_t> SampleSet::slice(std::size_t read,
                                              std::size_t k) const {
  if (read >= reads.size() || k >= n_slices) {
    throw DimensionError("slice index out of range");
  }
  return reads[read].spins().subspan(k * n_spins, n_spins);
}

SampleSet sa_sample(const IsingModel& model, const SaSchedule& schedule,
                    std::uint64_t seed) {
  schedule.validate();
  const std::size_t n = model.n_spins();
  const Adjacency adj(model, 1.0);

  SampleSet out;
  out.kind = SamplerKind::kSimulatedAnnealing;
  out.n_spins = n;
  out.n_slices = 1;
  out.schedule = schedule;
  out.seed = seed;
  out.energy_model = std::make_shared<const IsingModel>(model);
  out.reads.reserve(schedule.n_reads);
  out.effective_energies.reserve(schedule.n_reads);

  std::vector<std::int8_t> spins(n);
  for (std::size_t read = 0; read < schedule.n_reads; ++read) {
    Rng rng(seed ^ static_cast<std::uint64_t>(read));
    randomize(spins, rng);
    for (std::size_t sweep = 0; sweep < schedule.n_sweeps; ++sweep) {
      const double beta = schedule.beta_at(sweep);
      for (std::size_t i = 0; i < n; ++i) {
        const double delta_e = 2.0 * spins[i] * adj.field(i, spins.data());
        if (metropolis_accept(delta_e, beta, rng)) {
          spins[i] = static_cast<std::int8_t>(-spins[i]);
        }
      }
    }
    out.reads.emplace_back(spins);
    out.effective_energies.push_back(
        classical_energy(*out.energy_model, out.reads.back()));
  }
  return out;
}

SampleSet sqa_sample(const IsingModel& model, const SqaSchedule& schedule,
                     std::uint64_t seed) {
  schedule.validate();
  const std::size_t n = model.n_spins();
  const std::size_t r = schedule.n_replicas;
  const double beta = schedule.beta;
  const Adjacency adj(model, 1.0 / static_cast<double>(r));

  SampleSet out;
  out.kind = SamplerKind::kSimulatedQuantumAnnealing;
  out.n_spins = n;
  out.n_slices = r;
  out.schedule = schedule;
  out.seed = seed;
  out.energy_model = std::make_shared<const IsingModel>(
      build_effective_model(model, schedule.gamma_final, beta, r));
  out.reads.reserve(schedule.n_reads);
  out.effective_energies.reserve(schedule.n_reads);

  std::vector<std::int8_t> spins(n * r);
  for (std::size_t read = 0; read < schedule.n_reads; ++read) {
    Rng rng(seed ^ static_cast<std::uint64_t>(read));
    randomize(spins, rng);
    for (std::size_t sweep = 0; sweep < schedule.n_sweeps; ++sweep) {
      const double j_plus = trotter_coupling(schedule.gamma_at(sweep), beta, r);
      for (std::size_t k = 0; k < r; ++k) {
        std::int8_t* slice = spins.data() + k * n;
        const std::int8_t* prev = spins.data() + ((k + r - 1) % r) * n;
        const std::int8_t* next = spins.data() + ((k + 1) % r) * n;
        for (std::size_t i = 0; i < n; ++i) {
          // With r == 2, prev and next are the same slice: the stored bond
          // of weight 2 J+ gives the same local field.
          const double field = adj.field(i, slice) + j_plus * (prev[i] + next[i]);
          const double delta_e = 2.0 * slice[i] * field;
          if (metropolis_accept(delta_e, beta, rng)) {
            slice[i] = static_cast<std::int8_t>(-slice[i]);
          }
        }
      }
    }
    out.reads.emplace_back(spins);
    out.effective_energies.push_back(
        effective_energy(*out.energy_model, out.reads.back()));
  }
  return out;
}

SliceExpectations slice_expectations(const SampleSet& samples) {
  if (samples.empty()) throw UsageError("slice_expectations: empty sample set");
  const std::size_t n = samples.n_spins;
  SliceExpectations out;
  out.n_spins = n;
  out.spin_mean.assign(n, 0.0);
  out.pair_mean.assign(n * n, 0.0);

  std::vector<long long> spin_sum(n, 0);
  std::vector<long long> pair_sum(n * n, 0);
  for (std::size_t read = 0; read < samples.size(); ++read) {
    for (std::size_t k = 0; k < samples.n_slices; ++k) {
      const auto s = samples.slice(read, k);
      for (std::size_t i = 0; i < n; ++i) {
        spin_sum[i] += s[i];
        for (std::size_t j = i + 1; j < n; ++j) pair_sum[i * n + j] += s[i] * s[j];
      }
    }
  }
  out.n_points = samples.size() * samples.n_slices;
  const double inv = 1.0 / static_cast<double>(out.n_points);
  for (std::size_t i = 0; i < n; ++i) {
    out.spin_mean[i] = static_cast<double>(spin_sum[i]) * inv;
    out.pair_mean[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double m = static_cast<double>(pair_sum[i * n + j]) * inv;
      out.pair_mean[i * n + j] = m;
      out.pair_mean[j * n + i] = m;
    }
  }
  return out;
}

}  // namespace qbmrl

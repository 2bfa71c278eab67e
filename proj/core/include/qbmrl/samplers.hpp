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

#ifndef QBMRL_SAMPLERS_HPP
#define QBMRL_SAMPLERS_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "qbmrl/ising.hpp"

namespace qbmrl {

/// Linear inverse-temperature ramp for simulated annealing.
struct SaSchedule {
  double beta_initial = 0.01;
  double beta_final = 2.00;
  std::size_t n_sweeps = 50000;
  std::size_t n_reads = 150;

  void validate() const;
  /// Inverse temperature used during sweep t (0-based).
  double beta_at(std::size_t sweep) const;
};

/// Linear transverse-field ramp at fixed beta for simulated quantum annealing.
struct SqaSchedule {
  double gamma_initial = 20.00;
  double gamma_final = 0.01;
  double beta = 2.00;
  std::size_t n_replicas = 25;
  std::size_t n_sweeps = 300;
  std::size_t n_reads = 150;

  void validate() const;
  double gamma_at(std::size_t sweep) const;
};

enum class SamplerKind { kSimulatedAnnealing, kSimulatedQuantumAnnealing };

/// Output of one sampler invocation. SA reads hold n_spins entries; SQA reads
/// hold the whole extended configuration (n_spins * n_slices, slice-major).
struct SampleSet {
  SamplerKind kind = SamplerKind::kSimulatedAnnealing;
  std::size_t n_spins = 0;
  std::size_t n_slices = 1;
  std::vector<SpinConfiguration> reads;
  /// Energy of each read under energy_model (classical model for SA, the
  /// extended model at gamma_final for SQA).
  std::vector<double> effective_energies;
  std::variant<SaSchedule, SqaSchedule> schedule;
  std::uint64_t seed = 0;
  std::shared_ptr<const IsingModel> energy_model;

  std::size_t size() const { return reads.size(); }
  bool empty() const { return reads.empty(); }
  /// Inverse temperature the final configurations were drawn at.
  double sampling_beta() const;
  std::span<const std::int8_t> slice(std::size_t read, std::size_t k) const;
};

/// n_reads independent Metropolis anneals (read r seeded with seed ^ r). Each
/// sweep visits spins in ascending index order.
SampleSet sa_sample(const IsingModel& model, const SaSchedule& schedule,
                    std::uint64_t seed);

/// Path-integral Monte Carlo on the Trotter-extended model. The inter-slice
/// coupling is recomputed from Gamma_t at the start of each sweep; sites are
/// visited in ascending extended index. The model's own transverse field is
/// ignored in favour of the schedule.
SampleSet sqa_sample(const IsingModel& model, const SqaSchedule& schedule,
                     std::uint64_t seed);

/// Spin and within-slice pair averages over every read and every slice.
struct SliceExpectations {
  std::size_t n_spins = 0;
  std::size_t n_points = 0;
  std::vector<double> spin_mean;  // <sigma_i>
  std::vector<double> pair_mean;  // <sigma_i sigma_j>, row-major n x n

  double pair(std::size_t i, std::size_t j) const {
    return pair_mean[i * n_spins + j];
  }
};

SliceExpectations slice_expectations(const SampleSet& samples);

}  // namespace qbmrl

#endif  // QBMRL_SAMPLERS_HPP

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

#ifndef QBMRL_ISING_HPP
#define QBMRL_ISING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qbmrl {

/// One pairwise term J_ij s_i s_j, stored with i < j.
struct Coupling {
  std::size_t i = 0;
  std::size_t j = 0;
  double value = 0.0;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

/// Classical or transverse-field Ising problem
///
///   H = - sum_{i<j} J_ij s_i s_j - sum_i h_i s_i - Gamma sum_i sigma^x_i
///
/// Couplings are kept as a sorted list of unordered pairs, so a pair is
/// stored once and lookup is symmetric. Self-couplings and non-finite values
/// are rejected on insertion.
class IsingModel {
 public:
  IsingModel() = default;
  explicit IsingModel(std::size_t n_spins, double transverse_field = 0.0);

  /// Couplings may arrive in any order and with either orientation; a pair
  /// listed twice is a DimensionError.
  IsingModel(std::vector<double> biases, std::vector<Coupling> couplings,
             double transverse_field = 0.0);

  std::size_t n_spins() const { return biases_.size(); }
  std::size_t n_couplings() const { return couplings_.size(); }

  std::span<const double> biases() const { return biases_; }
  double bias(std::size_t i) const;
  void set_bias(std::size_t i, double value);

  std::span<const Coupling> couplings() const { return couplings_; }
  /// Zero when the pair is absent.
  double coupling(std::size_t i, std::size_t j) const;
  void set_coupling(std::size_t i, std::size_t j, double value);
  void add_coupling(std::size_t i, std::size_t j, double value);

  double transverse_field() const { return transverse_field_; }
  void set_transverse_field(double gamma);

 private:
  std::vector<Coupling>::iterator find_slot(std::size_t i, std::size_t j);

  std::vector<double> biases_;
  std::vector<Coupling> couplings_;
  double transverse_field_ = 0.0;
};

/// Vector of +/-1 spins. For an extended (Trotter) model, spin i of slice k
/// lives at index k * n_spins + i.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  /// Throws EncodingError unless every entry is exactly -1 or +1.
  explicit SpinConfiguration(std::vector<std::int8_t> spins);

  static SpinConfiguration uniform(std::size_t n, std::int8_t value = 1);

  std::size_t size() const { return spins_.size(); }
  std::int8_t operator[](std::size_t i) const { return spins_[i]; }
  std::span<const std::int8_t> spins() const { return spins_; }

  void flip(std::size_t i) { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  SpinConfiguration negated() const;

  friend bool operator==(const SpinConfiguration&,
                         const SpinConfiguration&) = default;
  friend auto operator<=>(const SpinConfiguration&,
                          const SpinConfiguration&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

constexpr std::size_t extended_index(std::size_t spin, std::size_t slice,
                                     std::size_t n_spins) {
  return slice * n_spins + spin;
}

/// -sum J_ij s_i s_j - sum h_i s_i. The transverse field is ignored.
double classical_energy(const IsingModel& model,
                        const SpinConfiguration& config);

/// Inter-slice ferromagnetic coupling J+ = (1 / 2 beta) ln coth(Gamma beta / r).
double trotter_coupling(double gamma, double beta, std::size_t n_replicas);

/// ln of the Trotter normalisation C = [sinh(2 beta Gamma / r) / 2]^(n r / 2)
/// relating the extended classical partition function to the quantum one:
/// Z_quantum ~= C * sum_c exp(-beta H_eff(c)).
double trotter_log_normalization(std::size_t n_spins, double gamma,
                                 double beta, std::size_t n_replicas);

/// Classical model on n_spins * n_replicas spins: intra-slice couplings J/r,
/// biases h/r, and periodic inter-slice bonds of strength J+. With two
/// replicas the bonds k->k+1 and k+1->k coincide and are stored once with
/// weight 2 J+.
IsingModel build_effective_model(const IsingModel& model, double gamma,
                                 double beta, std::size_t n_replicas);

/// Classical energy of an extended model.
double effective_energy(const IsingModel& extended_model,
                        const SpinConfiguration& config);

/// Thermal expectations of a transverse-field model at inverse temperature
/// beta, by dense diagonalisation over all 2^n basis states.
struct TransverseFieldThermal {
  double free_energy = 0.0;
  std::vector<double> z_mean;   // <sigma^z_i>
  std::vector<double> zz_mean;  // <sigma^z_i sigma^z_j>, row-major n x n
};

inline constexpr std::size_t kMaxDenseSpins = 10;

/// Uses model.transverse_field() as Gamma. Throws CapacityError above
/// kMaxDenseSpins spins.
TransverseFieldThermal exact_transverse_field_thermal(const IsingModel& model,
                                                      double beta);

}  // namespace qbmrl

#endif  // QBMRL_ISING_HPP
